#pragma once

#include <cstdint>

#include "phantom/errors.hpp"

namespace phantom {

enum class TdsVariant { in_order, out_of_order };

// Per-core knobs. lf = 1 models the dense baseline: one cycle per output
// position regardless of sparsity (no lookahead to exploit).
struct CoreConfig {
  int lf = 3;
  int pe_count = 3;
  int threads_per_pe = 3;
  TdsVariant tds = TdsVariant::out_of_order;
  bool intra_balance = false;

  void validate() const {
    if (lf < 1 || lf > 27)
      throw ValidationError("lookahead factor must be in [1, 27]");
    if (pe_count < 1 || pe_count > 8 || threads_per_pe < 1 || threads_per_pe > 8)
      throw ValidationError("pe_count and threads_per_pe must be in [1, 8]");
  }
};

struct CycleStats {
  int64_t cycles = 0;
  int64_t valid_macs = 0;
  int64_t mac_slots = 0;  // cycles * pe_count * threads_per_pe

  double utilization() const {
    return mac_slots > 0 ? static_cast<double>(valid_macs) / static_cast<double>(mac_slots)
                         : 0.0;
  }
};

// Refilling the single shared mapper across the three lanes costs a fixed
// 2-cycle latency once per chunk stream.
inline constexpr int kMapperFillCycles = 2;

}  // namespace phantom
