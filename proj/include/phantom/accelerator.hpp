#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phantom/core_types.hpp"
#include "phantom/layer.hpp"
#include "phantom/sparse_tensor.hpp"

namespace phantom {

// The R x C grid of Phantom cores. filter_fraction < 1 simulates an evenly
// spaced subset of the channel filters for regular/depthwise layers (quick
// regression runs); pointwise and fc always run in full.
struct AccelConfig {
  int rows = 7;
  int cols = 4;
  CoreConfig core;
  bool inter_balance = false;
  double filter_fraction = 1.0;

  int total_threads() const { return rows * cols * core.pe_count * core.threads_per_pe; }

  void validate() const {
    core.validate();
    if (rows < 1 || cols < 1) throw ValidationError("grid extents must be positive");
    if (filter_fraction <= 0.0 || filter_fraction > 1.0)
      throw ValidationError("filter fraction must be in (0, 1]");
  }
};

// One chunk stream assigned to a core:
//   regular/depthwise  (filter, out_row)  one output row segment
//   pointwise          (filter, batch)    all spatial positions of one batch
//   fc                 (batch)            this row's neurons, input pinned
struct WorkItem {
  int filter = -1;
  int out_row = -1;
  int batch = -1;
};

// Static work placement: items[round][r * cols + c] lists the core's chunk
// streams in issue order. broadcast_order[round][col] is the default (index
// into the simulated filter list, -1 idle); with inter-core balancing on, the
// realized order is recomputed per round from completion order while running.
struct WorkAssignment {
  int rounds = 0;
  std::vector<int> filters;  // simulated filter list (subsampled or full)
  std::vector<std::vector<std::vector<WorkItem>>> items;
  std::vector<std::vector<int>> broadcast_order;
};

WorkAssignment schedule_regular(const LayerSpec& layer, const AccelConfig& cfg);
WorkAssignment schedule_pointwise(const LayerSpec& layer, const AccelConfig& cfg);
WorkAssignment schedule_fc(const LayerSpec& layer, const AccelConfig& cfg);
WorkAssignment schedule_layer(const LayerSpec& layer, const AccelConfig& cfg);

// Density-ordered filter broadcast: the round's filters sorted by descending
// mask density (stable), densest to the column that finished earliest in the
// previous round. Returns per column the index into `filter_density`, -1 for
// idle columns.
std::vector<int> inter_core_balance(const std::vector<int64_t>& filter_density,
                                    const std::vector<int>& completion_order, int cols);

// Cross-column accumulation: sums per-key partials over active columns.
// Every active column must deliver exactly one partial per key.
std::vector<int32_t> l3_accumulate(
    const std::vector<std::vector<std::pair<int64_t, int32_t>>>& column_partials,
    std::size_t n_keys);

// Dense-architecture cycle reference: the identical dataflow with lf = 1 and
// fully dense masks (one cycle per position plus the mapper fill per stream).
// Independent of the tensors' actual sparsity.
int64_t dense_cycle_model(const LayerSpec& layer, const AccelConfig& cfg);

// Aggregate per-round, per-active-core stats into layer stats: layer cycles
// are the sum over rounds of the round makespan; utilization counts busy
// slots of active cores only (grid idling shows up in cycles).
LayerStats aggregate_stats(const std::vector<std::vector<CycleStats>>& per_round,
                           int64_t dense_cycles);

struct LayerResult {
  SparseTensorT<int32_t> output;  // volume [H_out, W_out, C_out] or vector [C_out]
  LayerStats stats;
  std::vector<std::vector<int>> realized_broadcast;  // per round when balancing applies
};

LayerResult simulate_layer(const LayerSpec& layer, const LayerTensors& tensors,
                           const AccelConfig& cfg);

struct NetworkResult {
  std::vector<LayerStats> per_layer;
  LayerStats aggregate;
};

// Simulates a whole model with synthesized masks (see gen_masks). When chain
// is set, each layer's activation mask is taken from the previous simulated
// output (padding margins re-inserted as zeros); values are redrawn in int8.
NetworkResult simulate_network(const std::vector<LayerSpec>& model,
                               const AccelConfig& cfg, uint64_t seed, bool chain);

}  // namespace phantom
