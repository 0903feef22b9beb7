#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "phantom/core_types.hpp"
#include "phantom/lam.hpp"
#include "phantom/output_buffer.hpp"
#include "phantom/sparse_tensor.hpp"
#include "phantom/tds.hpp"

namespace phantom {

// Result of streaming one chunk through a core. values/computed are dense by
// output key; computed marks keys with at least one valid product (the
// reduced-bit OR), which is the pre-ReLU output mask.
struct CoreRunResult {
  CycleStats stats;
  std::vector<int32_t> values;
  std::vector<uint8_t> computed;
};

// Source concept for one chunk stream:
//   int     positions() const                      window position count
//   int     n_keys() const                         dense output key count
//   int64_t key(int pos) const                     output key of a position
//   uint8_t wbits(int pos, int lane) const         weight mask slot bits
//   uint8_t abits(int pos, int lane) const         activation mask slot bits
//   int32_t product(int pos, int lane, uint8_t g)  sum of w*a over set slots
//
// The driver walks lf-sized windows: AND masks per lane, intra-balance when
// configured, TDS selection, operand products accumulated by output key with
// per-contributor completion counting (the position-keyed equivalent of the
// tagged FIFO scheme; equivalence is covered by tests). Window cost is the
// max selection iteration count over lanes; lf = 1 costs one cycle per
// position unconditionally (the dense schedule). A chunk stream that issues
// any compute pays the mapper fill once.
template <class Source>
CoreRunResult run_core_stream(const Source& src, const CoreConfig& cfg) {
  cfg.validate();
  const int lanes = cfg.pe_count;
  const int lf = cfg.lf;
  const int n_pos = src.positions();
  const int n_keys = src.n_keys();

  CoreRunResult res;
  res.values.assign(static_cast<std::size_t>(n_keys), 0);
  res.computed.assign(static_cast<std::size_t>(n_keys), 0);
  std::vector<uint32_t> expected(static_cast<std::size_t>(n_keys), 0);
  std::vector<uint32_t> delivered(static_cast<std::size_t>(n_keys), 0);

  std::vector<uint8_t> groups(static_cast<std::size_t>(lf) * lanes);
  std::vector<uint8_t> rotated(static_cast<std::size_t>(lf) * lanes);
  std::vector<uint8_t> lane_entries(static_cast<std::size_t>(lf));
  std::vector<SelectionScratch> scratch(static_cast<std::size_t>(lanes));
  std::vector<SelectionScratch> scratch_rot(static_cast<std::size_t>(lanes));

  int64_t cycles = 0;
  int64_t ones_total = 0;
  bool any_compute = false;

  for (int w0 = 0; w0 < n_pos; w0 += lf) {
    const int wlen = (n_pos - w0 < lf) ? (n_pos - w0) : lf;
    bool window_has_ones = false;
    for (int p = 0; p < wlen; ++p) {
      const int gp = w0 + p;
      const int64_t k = src.key(gp);
      for (int l = 0; l < lanes; ++l) {
        const uint8_t g = static_cast<uint8_t>(src.wbits(gp, l) & src.abits(gp, l));
        groups[static_cast<std::size_t>(p) * lanes + l] = g;
        if (g) {
          window_has_ones = true;
          res.computed[static_cast<std::size_t>(k)] = 1;
          ++expected[static_cast<std::size_t>(k)];
          ones_total += std::popcount(static_cast<unsigned>(g));
        }
      }
    }
    if (!window_has_ones) {
      if (lf == 1) ++cycles;
      continue;
    }
    any_compute = true;

    auto select_all = [&](const std::vector<uint8_t>& gs,
                          std::vector<SelectionScratch>& out) {
      int worst = 0;
      for (int l = 0; l < lanes; ++l) {
        for (int p = 0; p < wlen; ++p)
          lane_entries[static_cast<std::size_t>(p)] =
              gs[static_cast<std::size_t>(p) * lanes + l];
        out[static_cast<std::size_t>(l)].clear();
        int iters = select_lane(lane_entries.data(), wlen, cfg,
                                out[static_cast<std::size_t>(l)]);
        if (iters > worst) worst = iters;
      }
      return worst;
    };

    int cost = select_all(groups, scratch);
    bool use_rotation = false;
    if (cfg.intra_balance && lanes >= 2 && lf > 1 && cost > 1) {
      for (int p = 0; p < wlen; ++p) {
        const int amount = p % lanes;
        for (int l = 0; l < lanes; ++l) {
          const int srcl = (l - amount + lanes) % lanes;
          rotated[static_cast<std::size_t>(p) * lanes + l] =
              groups[static_cast<std::size_t>(p) * lanes + srcl];
        }
      }
      int cost_rot = select_all(rotated, scratch_rot);
      if (cost_rot < cost) {
        cost = cost_rot;
        use_rotation = true;
      }
    }
    cycles += (lf == 1) ? 1 : cost;

    const auto& chosen = use_rotation ? scratch_rot : scratch;
    for (int l = 0; l < lanes; ++l) {
      for (const SelectedEntry& e : chosen[static_cast<std::size_t>(l)].entries) {
        const int src_lane =
            use_rotation ? (l - (e.position % lanes) + lanes) % lanes : l;
        const int gp = w0 + e.position;
        const int64_t k = src.key(gp);
        res.values[static_cast<std::size_t>(k)] += src.product(gp, src_lane, e.group);
        if (++delivered[static_cast<std::size_t>(k)] > expected[static_cast<std::size_t>(k)])
          throw InternalError("core stream: duplicate completion for an output");
      }
    }
  }

  for (std::size_t k = 0; k < expected.size(); ++k)
    if (delivered[k] != expected[k])
      throw InternalError("core stream: outputs left partial at stream end");

  if (any_compute) cycles += kMapperFillCycles;
  res.stats.cycles = cycles;
  res.stats.valid_macs = ones_total;
  res.stats.mac_slots = cycles * cfg.pe_count * cfg.threads_per_pe;
  return res;
}

// One Phantom core over one single-channel convolution chunk: weights is a
// [K, K] mask/value matrix, chunk a [K, W] activation slab; lane j is kernel
// column j, slot k kernel row k, one output position per window start.
// Returns the encoded output fragment and the cycle stats.
std::pair<SparseTensorT<int32_t>, CycleStats> simulate_core_chunk(
    const SparseTensor& weights, const SparseTensor& chunk, const CoreConfig& cfg,
    int stride = 1, bool apply_relu = true);

}  // namespace phantom
