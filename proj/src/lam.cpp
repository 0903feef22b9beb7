#include "phantom/lam.hpp"

#include <bit>

#include "phantom/tds.hpp"

namespace phantom {

LamBlock lam_generate(const std::vector<uint8_t>& weight_lanes,
                      const std::vector<std::vector<uint8_t>>& window_lanes, int slots) {
  if (slots < 1 || slots > 8) throw ValidationError("slot count must be in [1, 8]");
  const int lanes = static_cast<int>(weight_lanes.size());
  if (lanes < 1) throw ValidationError("lam_generate: no weight lanes");
  const uint8_t width_mask = static_cast<uint8_t>((1u << slots) - 1);
  for (uint8_t g : weight_lanes)
    if (g & ~width_mask) throw ValidationError("weight lane wider than slot count");

  LamBlock block;
  block.lanes = lanes;
  block.slots = slots;
  block.groups.reserve(window_lanes.size() * lanes);
  block.reduced.reserve(window_lanes.size());
  for (const auto& window : window_lanes) {
    if (static_cast<int>(window.size()) != lanes)
      throw ValidationError("window lane count does not match the kernel lanes");
    uint8_t any = 0;
    for (int j = 0; j < lanes; ++j) {
      if (window[j] & ~width_mask)
        throw ValidationError("window lane wider than slot count");
      uint8_t g = static_cast<uint8_t>(weight_lanes[j] & window[j]);
      block.groups.push_back(g);
      any |= g;
    }
    block.reduced.push_back(any ? 1 : 0);
  }
  return block;
}

int window_selection_cycles(const LamBlock& block, const CoreConfig& cfg) {
  cfg.validate();
  if (block.lanes != cfg.pe_count)
    throw ValidationError("lane count does not match the PE count");
  if (cfg.lf == 1) return block.positions() > 0 ? block.positions() : 0;
  int worst = 0;
  SelectionScratch scratch;
  std::vector<uint8_t> lane_entries(static_cast<std::size_t>(block.positions()));
  for (int j = 0; j < block.lanes; ++j) {
    for (int p = 0; p < block.positions(); ++p) lane_entries[p] = block.group(p, j);
    scratch.clear();
    int iters = select_lane(lane_entries.data(), block.positions(), cfg, scratch);
    if (iters > worst) worst = iters;
  }
  return worst;
}

std::pair<LamBlock, RotationSchedule> intra_balance(const LamBlock& block,
                                                    const CoreConfig& cfg) {
  cfg.validate();
  RotationSchedule rot;
  rot.lanes = block.lanes;
  rot.amount.assign(static_cast<std::size_t>(block.positions()), 0);
  if (block.lanes < 2 || block.positions() == 0 || cfg.lf == 1)
    return {block, rot};

  int base_cost = window_selection_cycles(block, cfg);
  if (base_cost <= 1) return {block, rot};

  LamBlock rotated;
  rotated.lanes = block.lanes;
  rotated.slots = block.slots;
  rotated.reduced = block.reduced;
  rotated.groups.resize(block.groups.size());
  for (int p = 0; p < block.positions(); ++p) {
    int amount = p % block.lanes;
    for (int l = 0; l < block.lanes; ++l) {
      int src = (l - amount + block.lanes) % block.lanes;
      rotated.groups[static_cast<std::size_t>(p) * block.lanes + l] = block.group(p, src);
    }
  }
  int rotated_cost = window_selection_cycles(rotated, cfg);
  if (rotated_cost >= base_cost) return {block, rot};

  for (int p = 0; p < block.positions(); ++p) rot.amount[p] = p % block.lanes;
  return {rotated, rot};
}

}  // namespace phantom
