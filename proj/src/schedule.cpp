#include <algorithm>
#include <numeric>

#include "phantom/accelerator.hpp"

namespace phantom {

namespace {

std::vector<int> pick_filters(int c_out, double fraction) {
  int n = std::max(1, static_cast<int>(c_out * fraction + 0.5));
  n = std::min(n, c_out);
  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    picked.push_back(static_cast<int>(static_cast<int64_t>(i) * c_out / n));
  return picked;
}

int batch_size(const AccelConfig& cfg) {
  return cfg.core.pe_count * cfg.core.threads_per_pe;
}

void check_conv_geometry(const LayerSpec& layer, const AccelConfig& cfg) {
  if (layer.k != cfg.core.pe_count || layer.k != cfg.core.threads_per_pe)
    throw ValidationError("layer " + layer.name + ": kernel extent " +
                          std::to_string(layer.k) +
                          " must match the PE/thread geometry");
}

}  // namespace

WorkAssignment schedule_regular(const LayerSpec& layer, const AccelConfig& cfg) {
  layer.validate();
  cfg.validate();
  if (layer.kind != LayerKind::regular && layer.kind != LayerKind::depthwise)
    throw ValidationError("schedule_regular expects a regular or depthwise layer");
  check_conv_geometry(layer, cfg);

  WorkAssignment wa;
  wa.filters = pick_filters(layer.c_out, cfg.filter_fraction);
  const int n_f = static_cast<int>(wa.filters.size());
  wa.rounds = (n_f + cfg.cols - 1) / cfg.cols;
  wa.items.resize(static_cast<std::size_t>(wa.rounds));
  wa.broadcast_order.resize(static_cast<std::size_t>(wa.rounds));
  for (int t = 0; t < wa.rounds; ++t) {
    auto& round_items = wa.items[static_cast<std::size_t>(t)];
    round_items.resize(static_cast<std::size_t>(cfg.rows * cfg.cols));
    auto& order = wa.broadcast_order[static_cast<std::size_t>(t)];
    order.assign(static_cast<std::size_t>(cfg.cols), -1);
    for (int c = 0; c < cfg.cols; ++c) {
      int fi = t * cfg.cols + c;
      if (fi >= n_f) break;
      order[static_cast<std::size_t>(c)] = fi;
      for (int r = 0; r < cfg.rows; ++r)
        for (int row = r; row < layer.out_h(); row += cfg.rows)
          round_items[static_cast<std::size_t>(r * cfg.cols + c)].push_back(
              WorkItem{wa.filters[static_cast<std::size_t>(fi)], row, -1});
    }
  }
  return wa;
}

WorkAssignment schedule_pointwise(const LayerSpec& layer, const AccelConfig& cfg) {
  layer.validate();
  cfg.validate();
  if (layer.kind != LayerKind::pointwise)
    throw ValidationError("schedule_pointwise expects a pointwise layer");

  WorkAssignment wa;
  wa.filters.resize(static_cast<std::size_t>(layer.c_out));
  std::iota(wa.filters.begin(), wa.filters.end(), 0);
  const int n_f = layer.c_out;
  const int bs = batch_size(cfg);
  const int n_batches = (layer.c_in + bs - 1) / bs;
  wa.rounds = (n_f + cfg.rows - 1) / cfg.rows;
  wa.items.resize(static_cast<std::size_t>(wa.rounds));
  for (int t = 0; t < wa.rounds; ++t) {
    auto& round_items = wa.items[static_cast<std::size_t>(t)];
    round_items.resize(static_cast<std::size_t>(cfg.rows * cfg.cols));
    for (int r = 0; r < cfg.rows; ++r) {
      int f = t * cfg.rows + r;
      if (f >= n_f) break;
      for (int c = 0; c < cfg.cols; ++c)
        for (int b = c; b < n_batches; b += cfg.cols)
          round_items[static_cast<std::size_t>(r * cfg.cols + c)].push_back(
              WorkItem{f, -1, b});
    }
  }
  return wa;
}

WorkAssignment schedule_fc(const LayerSpec& layer, const AccelConfig& cfg) {
  layer.validate();
  cfg.validate();
  if (layer.kind != LayerKind::fc)
    throw ValidationError("schedule_fc expects an fc layer");

  WorkAssignment wa;
  wa.filters.resize(static_cast<std::size_t>(layer.c_out));
  std::iota(wa.filters.begin(), wa.filters.end(), 0);
  const int bs = batch_size(cfg);
  const int n_batches = (layer.c_in + bs - 1) / bs;
  wa.rounds = 1;
  wa.items.resize(1);
  wa.items[0].resize(static_cast<std::size_t>(cfg.rows * cfg.cols));
  for (int r = 0; r < cfg.rows; ++r) {
    if (r >= layer.c_out) break;
    for (int c = 0; c < cfg.cols; ++c)
      for (int b = c; b < n_batches; b += cfg.cols)
        wa.items[0][static_cast<std::size_t>(r * cfg.cols + c)].push_back(
            WorkItem{-1, -1, b});
  }
  return wa;
}

WorkAssignment schedule_layer(const LayerSpec& layer, const AccelConfig& cfg) {
  switch (layer.kind) {
    case LayerKind::regular:
    case LayerKind::depthwise: return schedule_regular(layer, cfg);
    case LayerKind::pointwise: return schedule_pointwise(layer, cfg);
    case LayerKind::fc: return schedule_fc(layer, cfg);
  }
  throw ValidationError("unknown layer kind");
}

std::vector<int> inter_core_balance(const std::vector<int64_t>& filter_density,
                                    const std::vector<int>& completion_order, int cols) {
  if (static_cast<int>(filter_density.size()) > cols)
    throw ValidationError("more filters than columns in one broadcast round");
  if (static_cast<int>(completion_order.size()) != cols)
    throw ValidationError("completion order must cover every column");

  std::vector<int> by_density(filter_density.size());
  std::iota(by_density.begin(), by_density.end(), 0);
  std::stable_sort(by_density.begin(), by_density.end(), [&](int a, int b) {
    return filter_density[static_cast<std::size_t>(a)] >
           filter_density[static_cast<std::size_t>(b)];
  });

  std::vector<int> order(static_cast<std::size_t>(cols), -1);
  for (std::size_t i = 0; i < by_density.size(); ++i)
    order[static_cast<std::size_t>(completion_order[i])] = by_density[i];
  return order;
}

std::vector<int32_t> l3_accumulate(
    const std::vector<std::vector<std::pair<int64_t, int32_t>>>& column_partials,
    std::size_t n_keys) {
  std::vector<int32_t> out(n_keys, 0);
  for (const auto& column : column_partials) {
    std::vector<uint8_t> seen(n_keys, 0);
    for (const auto& [key, value] : column) {
      if (key < 0 || static_cast<std::size_t>(key) >= n_keys)
        throw InternalError("l3: partial for unknown output");
      if (seen[static_cast<std::size_t>(key)])
        throw InternalError("l3: duplicate column partial");
      seen[static_cast<std::size_t>(key)] = 1;
      out[static_cast<std::size_t>(key)] += value;
    }
    for (std::size_t k = 0; k < n_keys; ++k)
      if (!seen[k]) throw InternalError("l3: missing column partial");
  }
  return out;
}

namespace {

int64_t item_positions(const LayerSpec& layer, const WorkItem& item) {
  switch (layer.kind) {
    case LayerKind::regular:
      return static_cast<int64_t>(layer.out_w()) * layer.c_in;
    case LayerKind::depthwise:
      return layer.out_w();
    case LayerKind::pointwise:
      return static_cast<int64_t>(layer.h) * layer.w;
    case LayerKind::fc: {
      // this row's neuron count; rows beyond c_out are idle
      (void)item;
      return 0;  // resolved by caller, needs the row index
    }
  }
  return 0;
}

}  // namespace

int64_t dense_cycle_model(const LayerSpec& layer, const AccelConfig& cfg) {
  WorkAssignment wa = schedule_layer(layer, cfg);
  int64_t total = 0;
  for (int t = 0; t < wa.rounds; ++t) {
    int64_t round_max = 0;
    for (int r = 0; r < cfg.rows; ++r)
      for (int c = 0; c < cfg.cols; ++c) {
        const auto& items = wa.items[static_cast<std::size_t>(t)]
                                    [static_cast<std::size_t>(r * cfg.cols + c)];
        int64_t core_cycles = 0;
        for (const auto& item : items) {
          int64_t pos;
          if (layer.kind == LayerKind::fc) {
            pos = 0;
            for (int n = r; n < layer.c_out; n += cfg.rows) ++pos;
          } else {
            pos = item_positions(layer, item);
          }
          core_cycles += pos + kMapperFillCycles;
        }
        round_max = std::max(round_max, core_cycles);
      }
    total += round_max;
  }
  return total;
}

LayerStats aggregate_stats(const std::vector<std::vector<CycleStats>>& per_round,
                           int64_t dense_cycles) {
  LayerStats st;
  st.dense_cycles = dense_cycles;
  for (const auto& round : per_round) {
    int64_t round_max = 0;
    for (const auto& cs : round) {
      round_max = std::max(round_max, cs.cycles);
      st.valid_macs += cs.valid_macs;
      st.mac_slots += cs.mac_slots;
    }
    st.cycles += round_max;
  }
  st.utilization = st.mac_slots > 0
                       ? static_cast<double>(st.valid_macs) / static_cast<double>(st.mac_slots)
                       : 0.0;
  st.speedup_vs_dense =
      st.cycles > 0 ? static_cast<double>(dense_cycles) / static_cast<double>(st.cycles)
                    : static_cast<double>(dense_cycles);
  return st;
}

}  // namespace phantom
