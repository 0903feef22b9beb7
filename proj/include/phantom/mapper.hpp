#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "phantom/core_types.hpp"
#include "phantom/lam.hpp"
#include "phantom/tds.hpp"

namespace phantom {

struct OperandPair {
  int8_t weight = 0;
  int8_t activation = 0;
};

// One PE's register image for one compute cycle: threads_per_pe operand pairs
// (zero-padded) plus the 2-bit L1 adder config. In the canonical 3-thread
// configuration this is the 50-bit image (3 x 16 data bits + 2 control).
// position/source_lane are simulator bookkeeping, not register content.
struct PeImage {
  std::vector<OperandPair> pairs;
  std::vector<int> position;  // window position per thread, -1 for padding
  uint8_t l1_config = 0;      // 00 C1, 01 C2, 10 C3, 11 C4

  int used_threads() const {
    int n = 0;
    for (int p : position)
      if (p >= 0) ++n;
    return n;
  }
};

struct ThreadMapImage {
  std::vector<PeImage> pes;
};

inline constexpr uint8_t kL1PassThrough = 0b00;  // C1
inline constexpr uint8_t kL1AddLowPair = 0b01;   // C2: t0+t1, t2 passed
inline constexpr uint8_t kL1AddHighPair = 0b10;  // C3: t0 passed, t1+t2
inline constexpr uint8_t kL1AddAll = 0b11;       // C4: t0+t1+t2

// L1 configurable reduction over one PE's thread products.
std::vector<int32_t> l1_reduce(const std::array<int32_t, 3>& products, uint8_t config);

// Packs one selection iteration into PE register images. Selected entries are
// packed in position order; map vectors are unrotated through `rot` before
// operand lookup, so values and coords always refer to original lanes.
// Lookups: wval(pos, lane, slot), aval(pos, lane, slot) with original lanes.
template <class WVal, class AVal>
ThreadMapImage map_threads(const std::vector<std::vector<SelectedEntry>>& lanes,
                           const CoreConfig& cfg, const RotationSchedule& rot,
                           WVal&& wval, AVal&& aval);

// L1 config from the packed per-position group sizes.
uint8_t l1_config_for_groups(const std::vector<int>& group_sizes);

// 9-bit map patterns with at most 3 ones: the combinations one mapper stores.
int64_t mapper_pattern_count(int map_bits, int max_ones);

// Storage model for the mapper tables: pattern count x 50-bit images,
// reported in kB (1000 bytes) for three mappers vs one reused mapper.
struct MapperStorage {
  int64_t pattern_count = 0;
  int64_t image_bits = 0;
  double three_mapper_kb = 0.0;
  double one_mapper_kb = 0.0;
};

MapperStorage mapper_storage_model();

// --- implementation ---

template <class WVal, class AVal>
ThreadMapImage map_threads(const std::vector<std::vector<SelectedEntry>>& lanes,
                           const CoreConfig& cfg, const RotationSchedule& rot,
                           WVal&& wval, AVal&& aval) {
  ThreadMapImage image;
  image.pes.resize(static_cast<std::size_t>(cfg.pe_count));
  if (static_cast<int>(lanes.size()) > cfg.pe_count)
    throw InternalError("selection spans more lanes than PEs");
  for (int lane = 0; lane < static_cast<int>(lanes.size()); ++lane) {
    PeImage& pe = image.pes[static_cast<std::size_t>(lane)];
    pe.pairs.assign(static_cast<std::size_t>(cfg.threads_per_pe), OperandPair{});
    pe.position.assign(static_cast<std::size_t>(cfg.threads_per_pe), -1);

    std::vector<SelectedEntry> sorted = lanes[static_cast<std::size_t>(lane)];
    std::sort(sorted.begin(), sorted.end(),
              [](const SelectedEntry& a, const SelectedEntry& b) {
                return a.position < b.position;
              });
    int thread = 0;
    std::vector<int> group_sizes;
    for (const SelectedEntry& e : sorted) {
      int src_lane = rot.amount.empty() ? lane : original_lane(rot, e.position, lane);
      int members = 0;
      for (int slot = 0; slot < cfg.threads_per_pe; ++slot) {
        if (!(e.group >> slot & 1)) continue;
        if (thread >= cfg.threads_per_pe)
          throw InternalError("selection overflows the PE thread count");
        pe.pairs[static_cast<std::size_t>(thread)] = {wval(e.position, src_lane, slot),
                                                      aval(e.position, src_lane, slot)};
        pe.position[static_cast<std::size_t>(thread)] = e.position;
        ++thread;
        ++members;
      }
      if (members > 0) group_sizes.push_back(members);
    }
    pe.l1_config = l1_config_for_groups(group_sizes);
  }
  for (int lane = static_cast<int>(lanes.size()); lane < cfg.pe_count; ++lane) {
    PeImage& pe = image.pes[static_cast<std::size_t>(lane)];
    pe.pairs.assign(static_cast<std::size_t>(cfg.threads_per_pe), OperandPair{});
    pe.position.assign(static_cast<std::size_t>(cfg.threads_per_pe), -1);
    pe.l1_config = kL1PassThrough;
  }
  return image;
}

}  // namespace phantom
