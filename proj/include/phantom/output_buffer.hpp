#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phantom/errors.hpp"
#include "phantom/sparse_tensor.hpp"

namespace phantom {

// One L1 output headed for the output buffer. key identifies the destination
// output element; (position, lane) is the contributing coordinate whose tag-1
// entry marks that lane's work for the position as finished.
struct TaggedEntry {
  int32_t value = 0;
  bool tag = true;
  int64_t key = 0;
  int32_t position = 0;
  int16_t lane = 0;
};

// Position-keyed accumulation with per-contributor completion tracking. An
// output turns valid once every declared (position, lane) contributor has
// delivered its tag-1 entry; until then the running sum is held as a partial.
class OutputBuffer {
 public:
  OutputBuffer(std::size_t n_keys, std::size_t n_positions, int lanes);

  // Declare that (position, lane) will contribute to key. Must precede the
  // entries (the LAM knows the contributor set before compute starts).
  void expect(int64_t key, int32_t position, int lane);

  void push(const TaggedEntry& e);

  bool is_valid(int64_t key) const;
  int32_t value(int64_t key) const { return sums_[static_cast<std::size_t>(key)]; }

  struct Partial {
    int64_t key = 0;
    int32_t value = 0;
    std::vector<std::pair<int32_t, int>> missing;  // (position, lane) still tagged 0
  };

  // Valid outputs in key order.
  std::vector<std::pair<int64_t, int32_t>> valids() const;
  std::vector<Partial> partials() const;

  std::size_t keys() const { return sums_.size(); }

 private:
  int lanes_;
  std::size_t n_positions_;
  std::vector<int32_t> sums_;
  std::vector<uint32_t> expected_;
  std::vector<uint32_t> delivered_;
  std::vector<uint64_t> expect_bits_;     // per (position, lane)
  std::vector<uint64_t> complete_bits_;   // per (position, lane)
  std::vector<int64_t> coord_key_;        // key per (position, lane), -1 unset

  std::size_t coord(int32_t position, int lane) const {
    return static_cast<std::size_t>(position) * lanes_ + static_cast<std::size_t>(lane);
  }
  static bool get_bit(const std::vector<uint64_t>& bits, std::size_t i) {
    return (bits[i >> 6] >> (i & 63)) & 1u;
  }
  static void set_bit(std::vector<uint64_t>& bits, std::size_t i) {
    bits[i >> 6] |= uint64_t{1} << (i & 63);
  }
};

// Batch form: declare expectations, feed the stream, return valid outputs in
// key order plus retained partials.
std::pair<std::vector<std::pair<int64_t, int32_t>>, std::vector<OutputBuffer::Partial>>
ob_accumulate(const std::vector<TaggedEntry>& entries,
              const std::vector<std::tuple<int64_t, int32_t, int>>& expectations,
              std::size_t n_keys, std::size_t n_positions, int lanes);

// Output sparse mask generation. `values` are the computed outputs of the
// positions whose reduced bit is 1, in position order. With apply_relu,
// outputs <= 0 are zeroed and their mask bits cleared; surviving values are
// compacted. An exact computed zero also clears its bit so the mask stays a
// nonzero indicator.
SparseTensorT<int32_t> relu_encode(const std::vector<int32_t>& values,
                                   const std::vector<uint8_t>& reduced,
                                   bool apply_relu = true);

}  // namespace phantom
