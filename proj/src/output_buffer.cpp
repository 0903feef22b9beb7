#include "phantom/output_buffer.hpp"

#include <tuple>

namespace phantom {

OutputBuffer::OutputBuffer(std::size_t n_keys, std::size_t n_positions, int lanes)
    : lanes_(lanes),
      n_positions_(n_positions),
      sums_(n_keys, 0),
      expected_(n_keys, 0),
      delivered_(n_keys, 0),
      expect_bits_((n_positions * lanes + 63) / 64, 0),
      complete_bits_((n_positions * lanes + 63) / 64, 0),
      coord_key_(n_positions * lanes, -1) {
  if (lanes < 1) throw ValidationError("output buffer needs at least one lane");
}

void OutputBuffer::expect(int64_t key, int32_t position, int lane) {
  if (key < 0 || static_cast<std::size_t>(key) >= sums_.size())
    throw InternalError("output buffer: expectation for unknown key");
  if (position < 0 || static_cast<std::size_t>(position) >= n_positions_ || lane < 0 ||
      lane >= lanes_)
    throw InternalError("output buffer: expectation for unknown coordinate");
  std::size_t c = coord(position, lane);
  if (get_bit(expect_bits_, c))
    throw InternalError("output buffer: duplicate expectation");
  set_bit(expect_bits_, c);
  coord_key_[c] = key;
  ++expected_[static_cast<std::size_t>(key)];
}

void OutputBuffer::push(const TaggedEntry& e) {
  if (e.key < 0 || static_cast<std::size_t>(e.key) >= sums_.size())
    throw InternalError("output buffer: entry for unknown key");
  std::size_t c = coord(e.position, e.lane);
  if (!get_bit(expect_bits_, c) || coord_key_[c] != e.key)
    throw InternalError("output buffer: entry for an undeclared contributor");
  sums_[static_cast<std::size_t>(e.key)] += e.value;
  if (e.tag) {
    if (get_bit(complete_bits_, c))
      throw InternalError("output buffer: tag-1 entry for a completed coordinate");
    set_bit(complete_bits_, c);
    ++delivered_[static_cast<std::size_t>(e.key)];
  }
}

bool OutputBuffer::is_valid(int64_t key) const {
  std::size_t k = static_cast<std::size_t>(key);
  return expected_[k] > 0 && delivered_[k] == expected_[k];
}

std::vector<std::pair<int64_t, int32_t>> OutputBuffer::valids() const {
  std::vector<std::pair<int64_t, int32_t>> out;
  for (std::size_t k = 0; k < sums_.size(); ++k)
    if (expected_[k] > 0 && delivered_[k] == expected_[k])
      out.emplace_back(static_cast<int64_t>(k), sums_[k]);
  return out;
}

std::vector<OutputBuffer::Partial> OutputBuffer::partials() const {
  std::vector<Partial> out;
  for (std::size_t k = 0; k < sums_.size(); ++k) {
    if (expected_[k] == 0 || delivered_[k] == expected_[k]) continue;
    Partial p;
    p.key = static_cast<int64_t>(k);
    p.value = sums_[k];
    for (std::size_t pos = 0; pos < n_positions_; ++pos)
      for (int lane = 0; lane < lanes_; ++lane) {
        std::size_t c = pos * static_cast<std::size_t>(lanes_) + static_cast<std::size_t>(lane);
        if (coord_key_[c] == p.key && get_bit(expect_bits_, c) &&
            !get_bit(complete_bits_, c))
          p.missing.emplace_back(static_cast<int32_t>(pos), lane);
      }
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<std::vector<std::pair<int64_t, int32_t>>, std::vector<OutputBuffer::Partial>>
ob_accumulate(const std::vector<TaggedEntry>& entries,
              const std::vector<std::tuple<int64_t, int32_t, int>>& expectations,
              std::size_t n_keys, std::size_t n_positions, int lanes) {
  OutputBuffer ob(n_keys, n_positions, lanes);
  for (const auto& [key, pos, lane] : expectations) ob.expect(key, pos, lane);
  for (const auto& e : entries) ob.push(e);
  return {ob.valids(), ob.partials()};
}

SparseTensorT<int32_t> relu_encode(const std::vector<int32_t>& values,
                                   const std::vector<uint8_t>& reduced, bool apply_relu) {
  std::size_t n_computed = 0;
  for (uint8_t r : reduced) n_computed += (r != 0);
  if (n_computed != values.size())
    throw ValidationError("relu_encode: one value per reduced-1 position required");

  SparseTensorT<int32_t> out;
  out.shape = {static_cast<uint32_t>(reduced.size())};
  out.mask.assign(mask_words(reduced.size()), 0);
  std::size_t vi = 0;
  for (std::size_t p = 0; p < reduced.size(); ++p) {
    if (!reduced[p]) continue;
    int32_t v = values[vi++];
    bool keep = apply_relu ? (v > 0) : (v != 0);
    if (keep) {
      out.set_bit(p);
      out.values.push_back(v);
    }
  }
  return out;
}

}  // namespace phantom
