#include "phantom/mapper.hpp"

namespace phantom {

std::vector<int32_t> l1_reduce(const std::array<int32_t, 3>& p, uint8_t config) {
  switch (config) {
    case kL1PassThrough: return {p[0], p[1], p[2]};
    case kL1AddLowPair: return {p[0] + p[1], p[2]};
    case kL1AddHighPair: return {p[0], p[1] + p[2]};
    case kL1AddAll: return {p[0] + p[1] + p[2]};
    default: throw ValidationError("L1 config must be a 2-bit code");
  }
}

uint8_t l1_config_for_groups(const std::vector<int>& g) {
  if (g.size() == 1 && g[0] == 3) return kL1AddAll;
  if (g.size() == 1 && g[0] == 2) return kL1AddLowPair;
  if (g.size() == 2 && g[0] == 2 && g[1] == 1) return kL1AddLowPair;
  if (g.size() == 2 && g[0] == 1 && g[1] == 2) return kL1AddHighPair;
  return kL1PassThrough;
}

int64_t mapper_pattern_count(int map_bits, int max_ones) {
  int64_t total = 0;
  for (int k = 0; k <= max_ones; ++k) {
    // C(map_bits, k)
    int64_t c = 1;
    for (int i = 0; i < k; ++i) c = c * (map_bits - i) / (i + 1);
    total += c;
  }
  return total;
}

MapperStorage mapper_storage_model() {
  MapperStorage s;
  s.pattern_count = mapper_pattern_count(9, 3);
  s.image_bits = 50;
  double one_mapper_bytes = static_cast<double>(s.pattern_count * s.image_bits) / 8.0;
  s.one_mapper_kb = one_mapper_bytes / 1000.0;
  s.three_mapper_kb = 3.0 * one_mapper_bytes / 1000.0;
  return s;
}

}  // namespace phantom
