#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phantom/core_types.hpp"

namespace phantom {

// One lookahead window: the ANDed weight/activation masks for up to lf output
// positions. groups[pos * lanes + lane] holds threads_per_pe bits (bit k =
// slot k); reduced[pos] is the all-zero check over the position's lanes.
struct LamBlock {
  int lanes = 0;
  int slots = 0;
  std::vector<uint8_t> groups;
  std::vector<uint8_t> reduced;

  int positions() const { return static_cast<int>(reduced.size()); }
  uint8_t group(int pos, int lane) const {
    return groups[static_cast<std::size_t>(pos) * lanes + lane];
  }
};

// weight_lanes[lane] and window_lanes[pos][lane] carry slot bits; windows with
// fewer than lf positions are legal (stream boundary, zero-padded upstream).
LamBlock lam_generate(const std::vector<uint8_t>& weight_lanes,
                      const std::vector<std::vector<uint8_t>>& window_lanes, int slots);

// Per-position cross-lane right rotation: position p's lane groups are
// rotated right by (p mod lanes), so lane l's entry at p comes from original
// lane (l - p) mod lanes. amount[p] == 0 everywhere when not applied.
struct RotationSchedule {
  int lanes = 0;
  std::vector<int> amount;

  bool applied() const {
    for (int a : amount)
      if (a != 0) return true;
    return false;
  }
};

inline int original_lane(const RotationSchedule& rot, int pos, int lane) {
  int a = rot.amount[static_cast<std::size_t>(pos)];
  return (lane - a % rot.lanes + rot.lanes) % rot.lanes;
}

// Rebalances lane loads before selection. The rotation is applied only when
// it strictly reduces the window's selection cycles under cfg's TDS variant,
// so balancing never slows a window down. Reduced bits are unchanged.
std::pair<LamBlock, RotationSchedule> intra_balance(const LamBlock& block,
                                                    const CoreConfig& cfg);

// Selection cycles of a window: max over lanes of compute-issuing iterations.
// lf = 1 pins the dense schedule at one cycle per position.
int window_selection_cycles(const LamBlock& block, const CoreConfig& cfg);

}  // namespace phantom
