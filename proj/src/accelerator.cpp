#include <algorithm>
#include <numeric>

#include "phantom/accelerator.hpp"
#include "phantom/core.hpp"
#include "phantom/output_buffer.hpp"
#include "phantom/synth.hpp"

namespace phantom {

namespace {

// 1-8 mask bits starting at a packed-word offset, clamped to `limit` bits.
inline uint8_t extract_bits(const std::vector<uint64_t>& words, std::size_t off,
                            int width, std::size_t limit) {
  if (off >= limit) return 0;
  if (off + static_cast<std::size_t>(width) > limit)
    width = static_cast<int>(limit - off);
  std::size_t wi = off >> 6;
  int sh = static_cast<int>(off & 63);
  uint64_t v = words[wi] >> sh;
  if (sh + width > 64 && wi + 1 < words.size()) v |= words[wi + 1] << (64 - sh);
  return static_cast<uint8_t>(v & ((1u << width) - 1));
}

// ---------------------------------------------------------------------------
// regular / depthwise

struct ConvContext {
  const LayerSpec& layer;
  int k, h_in, w_in, c_in, h_out, w_out, stride;
  std::vector<int8_t> act;       // dense volume, canonical order
  std::vector<uint8_t> acol;     // [(out_row*c_in + ch)*w_in + w]: k row bits at row0
  std::vector<std::vector<uint8_t>> wlanes;  // per filter: [ch*k + col]
  std::vector<std::vector<int8_t>> wvals;    // per filter: [(ch*k + row)*k + col]
  std::vector<int64_t> wdensity;             // filter mask popcounts
  std::vector<int> pos_ch, pos_x;            // pos = ch*w_out + x

  ConvContext(const LayerSpec& l, const LayerTensors& t) : layer(l) {
    k = l.k;
    h_in = l.h;
    w_in = l.w;
    c_in = l.c_in;
    h_out = l.out_h();
    w_out = l.out_w();
    stride = l.stride;
    act = decode(t.activations);

    const bool dw = l.kind == LayerKind::depthwise;
    acol.assign(static_cast<std::size_t>(h_out) * c_in * w_in, 0);
    for (int row = 0; row < h_out; ++row) {
      int row0 = row * stride;
      for (int ch = 0; ch < c_in; ++ch)
        for (int w = 0; w < w_in; ++w) {
          uint8_t bits = 0;
          for (int s = 0; s < k; ++s) {
            std::size_t idx = (static_cast<std::size_t>(w) * c_in + ch) * h_in +
                              static_cast<std::size_t>(row0 + s);
            if (act[idx] != 0) bits |= uint8_t{1} << s;
          }
          acol[(static_cast<std::size_t>(row) * c_in + ch) * w_in + w] = bits;
        }
    }

    wlanes.resize(t.weights.size());
    wvals.resize(t.weights.size());
    wdensity.resize(t.weights.size());
    for (std::size_t f = 0; f < t.weights.size(); ++f) {
      const SparseTensor& wt = t.weights[f];
      wdensity[f] = static_cast<int64_t>(wt.nnz());
      auto dense = decode(wt);
      int ch_cnt = dw ? 1 : c_in;
      wlanes[f].assign(static_cast<std::size_t>(ch_cnt) * k, 0);
      wvals[f].assign(static_cast<std::size_t>(ch_cnt) * k * k, 0);
      for (int ch = 0; ch < ch_cnt; ++ch)
        for (int row = 0; row < k; ++row)
          for (int col = 0; col < k; ++col) {
            int8_t v = dense[linear_index(wt.shape, static_cast<std::size_t>(row),
                                          static_cast<std::size_t>(col),
                                          dw ? 0 : static_cast<std::size_t>(ch))];
            wvals[f][(static_cast<std::size_t>(ch) * k + row) * k + col] = v;
            if (v != 0)
              wlanes[f][static_cast<std::size_t>(ch) * k + col] |= uint8_t{1} << row;
          }
    }

    int n_pos = (dw ? 1 : c_in) * w_out;
    pos_ch.resize(static_cast<std::size_t>(n_pos));
    pos_x.resize(static_cast<std::size_t>(n_pos));
    for (int p = 0; p < n_pos; ++p) {
      pos_ch[static_cast<std::size_t>(p)] = p / w_out;
      pos_x[static_cast<std::size_t>(p)] = p % w_out;
    }
  }
};

// One (filter, out_row) chunk stream. For depthwise the stream covers the
// item's single channel; for regular it sweeps all input channels.
struct ConvItemSource {
  const ConvContext* ctx;
  const uint8_t* wlanes;
  const int8_t* wvals;
  const uint8_t* acol_row;  // this out_row's slab
  int row0 = 0;
  int dw_channel = 0;  // fixed channel for depthwise, else -1
  int n_pos = 0;

  int positions() const { return n_pos; }
  int n_keys() const { return ctx->w_out; }
  int64_t key(int pos) const { return ctx->pos_x[static_cast<std::size_t>(pos)]; }
  uint8_t wbits(int pos, int lane) const {
    int ch = (dw_channel >= 0) ? 0 : ctx->pos_ch[static_cast<std::size_t>(pos)];
    return wlanes[static_cast<std::size_t>(ch) * ctx->k + lane];
  }
  uint8_t abits(int pos, int lane) const {
    int ch = (dw_channel >= 0) ? dw_channel : ctx->pos_ch[static_cast<std::size_t>(pos)];
    int x = ctx->pos_x[static_cast<std::size_t>(pos)];
    return acol_row[static_cast<std::size_t>(ch) * ctx->w_in + x * ctx->stride + lane];
  }
  int32_t product(int pos, int lane, uint8_t g) const {
    int wch = (dw_channel >= 0) ? 0 : ctx->pos_ch[static_cast<std::size_t>(pos)];
    int ach = (dw_channel >= 0) ? dw_channel : wch;
    int x = ctx->pos_x[static_cast<std::size_t>(pos)];
    int col = x * ctx->stride + lane;
    int32_t acc = 0;
    for (int s = 0; s < ctx->k; ++s)
      if (g >> s & 1) {
        std::size_t aidx = (static_cast<std::size_t>(col) * ctx->c_in + ach) * ctx->h_in +
                           static_cast<std::size_t>(row0 + s);
        acc += static_cast<int32_t>(
                   wvals[(static_cast<std::size_t>(wch) * ctx->k + s) * ctx->k + lane]) *
               static_cast<int32_t>(ctx->act[aidx]);
      }
    return acc;
  }
};

// ---------------------------------------------------------------------------
// pointwise

struct PointwiseContext {
  const LayerSpec& layer;
  int h, w, c_in, bs, lanes, slots, n_batches;
  std::vector<int8_t> act;                 // dense volume
  std::vector<uint8_t> agrp;               // [(b*n_pos + pos)*lanes + l]
  std::vector<std::vector<uint8_t>> wgrp;  // per filter: [b*lanes + l]
  std::vector<std::vector<int8_t>> wrow;   // per filter: dense [c_in]
  std::vector<int> pos_h, pos_w;           // pos = w*h + y (rows swept first)

  PointwiseContext(const LayerSpec& l, const LayerTensors& t, const AccelConfig& cfg)
      : layer(l) {
    h = l.h;
    w = l.w;
    c_in = l.c_in;
    lanes = cfg.core.pe_count;
    slots = cfg.core.threads_per_pe;
    bs = lanes * slots;
    n_batches = (c_in + bs - 1) / bs;
    act = decode(t.activations);

    int n_pos = h * w;
    pos_h.resize(static_cast<std::size_t>(n_pos));
    pos_w.resize(static_cast<std::size_t>(n_pos));
    for (int p = 0; p < n_pos; ++p) {
      pos_w[static_cast<std::size_t>(p)] = p / h;
      pos_h[static_cast<std::size_t>(p)] = p % h;
    }

    agrp.assign(static_cast<std::size_t>(n_batches) * n_pos * lanes, 0);
    for (int b = 0; b < n_batches; ++b)
      for (int p = 0; p < n_pos; ++p)
        for (int l2 = 0; l2 < lanes; ++l2) {
          uint8_t bits = 0;
          for (int s = 0; s < slots; ++s) {
            int c = b * bs + l2 * slots + s;
            if (c >= c_in) break;
            std::size_t idx =
                (static_cast<std::size_t>(pos_w[static_cast<std::size_t>(p)]) * c_in + c) *
                    h +
                static_cast<std::size_t>(pos_h[static_cast<std::size_t>(p)]);
            if (act[idx] != 0) bits |= uint8_t{1} << s;
          }
          agrp[(static_cast<std::size_t>(b) * n_pos + p) * lanes + l2] = bits;
        }

    wgrp.resize(t.weights.size());
    wrow.resize(t.weights.size());
    for (std::size_t f = 0; f < t.weights.size(); ++f) {
      auto dense = decode(t.weights[f]);
      wrow[f] = dense;
      wgrp[f].assign(static_cast<std::size_t>(n_batches) * lanes, 0);
      for (int b = 0; b < n_batches; ++b)
        for (int l2 = 0; l2 < lanes; ++l2) {
          uint8_t bits = 0;
          for (int s = 0; s < slots; ++s) {
            int c = b * bs + l2 * slots + s;
            if (c >= c_in) break;
            if (dense[static_cast<std::size_t>(c)] != 0) bits |= uint8_t{1} << s;
          }
          wgrp[f][static_cast<std::size_t>(b) * lanes + l2] = bits;
        }
    }
  }
};

struct PointwiseItemSource {
  const PointwiseContext* ctx;
  const uint8_t* wg;   // this filter's groups for batch b: [l]
  const int8_t* wrow;  // this filter's dense weight row
  const uint8_t* ag;   // batch slab: [(pos)*lanes + l]
  int batch = 0;

  int positions() const { return ctx->h * ctx->w; }
  int n_keys() const { return ctx->h * ctx->w; }
  int64_t key(int pos) const { return pos; }
  uint8_t wbits(int, int lane) const { return wg[lane]; }
  uint8_t abits(int pos, int lane) const {
    return ag[static_cast<std::size_t>(pos) * ctx->lanes + lane];
  }
  int32_t product(int pos, int lane, uint8_t g) const {
    int c0 = batch * ctx->bs + lane * ctx->slots;
    int32_t acc = 0;
    for (int s = 0; s < ctx->slots; ++s)
      if (g >> s & 1) {
        int c = c0 + s;
        std::size_t idx =
            (static_cast<std::size_t>(ctx->pos_w[static_cast<std::size_t>(pos)]) *
                 ctx->c_in +
             c) *
                ctx->h +
            static_cast<std::size_t>(ctx->pos_h[static_cast<std::size_t>(pos)]);
        acc += static_cast<int32_t>(wrow[static_cast<std::size_t>(c)]) *
               static_cast<int32_t>(ctx->act[idx]);
      }
    return acc;
  }
};

// ---------------------------------------------------------------------------
// fc

struct FcContext {
  const LayerSpec& layer;
  int in_len, out_len, bs, lanes, slots, n_batches;
  std::vector<int8_t> act;                  // dense input vector
  const std::vector<uint64_t>* act_mask;
  std::vector<uint8_t> agrp;                // [b*lanes + l]
  const std::vector<SparseTensor>* weights;
  std::vector<std::vector<uint32_t>> wprefix;  // popcount prefix per mask word

  FcContext(const LayerSpec& l, const LayerTensors& t, const AccelConfig& cfg)
      : layer(l) {
    in_len = l.c_in;
    out_len = l.c_out;
    lanes = cfg.core.pe_count;
    slots = cfg.core.threads_per_pe;
    bs = lanes * slots;
    n_batches = (in_len + bs - 1) / bs;
    act = decode(t.activations);
    act_mask = &t.activations.mask;
    weights = &t.weights;

    agrp.assign(static_cast<std::size_t>(n_batches) * lanes, 0);
    for (int b = 0; b < n_batches; ++b)
      for (int l2 = 0; l2 < lanes; ++l2)
        agrp[static_cast<std::size_t>(b) * lanes + l2] =
            extract_bits(*act_mask, static_cast<std::size_t>(b) * bs + l2 * slots, slots,
                         static_cast<std::size_t>(in_len));

    wprefix.resize(t.weights.size());
    for (std::size_t n = 0; n < t.weights.size(); ++n) {
      const auto& words = t.weights[n].mask;
      wprefix[n].resize(words.size() + 1, 0);
      for (std::size_t i = 0; i < words.size(); ++i)
        wprefix[n][i + 1] =
            wprefix[n][i] + static_cast<uint32_t>(std::popcount(words[i]));
    }
  }

  int8_t weight_value(int neuron, int c) const {
    const SparseTensor& row = (*weights)[static_cast<std::size_t>(neuron)];
    std::size_t wi = static_cast<std::size_t>(c) >> 6;
    int sh = c & 63;
    uint32_t rank = wprefix[static_cast<std::size_t>(neuron)][wi] +
                    static_cast<uint32_t>(
                        std::popcount(row.mask[wi] & ((uint64_t{1} << sh) - 1)));
    return row.values[rank];
  }
};

// One (core row, batch) stream: positions are this row's neurons, the input
// batch is pinned.
struct FcItemSource {
  const FcContext* ctx;
  int row = 0;
  int grid_rows = 1;
  int batch = 0;
  int n_neurons = 0;

  int positions() const { return n_neurons; }
  int n_keys() const { return n_neurons; }
  int64_t key(int pos) const { return pos; }
  int neuron(int pos) const { return row + pos * grid_rows; }
  uint8_t wbits(int pos, int lane) const {
    const SparseTensor& w = (*ctx->weights)[static_cast<std::size_t>(neuron(pos))];
    return extract_bits(w.mask,
                        static_cast<std::size_t>(batch) * ctx->bs + lane * ctx->slots,
                        ctx->slots, static_cast<std::size_t>(ctx->in_len));
  }
  uint8_t abits(int, int lane) const {
    return ctx->agrp[static_cast<std::size_t>(batch) * ctx->lanes + lane];
  }
  int32_t product(int pos, int lane, uint8_t g) const {
    int n = neuron(pos);
    int c0 = batch * ctx->bs + lane * ctx->slots;
    int32_t acc = 0;
    for (int s = 0; s < ctx->slots; ++s)
      if (g >> s & 1)
        acc += static_cast<int32_t>(ctx->weight_value(n, c0 + s)) *
               static_cast<int32_t>(ctx->act[static_cast<std::size_t>(c0 + s)]);
    return acc;
  }
};

// ---------------------------------------------------------------------------

void validate_tensors(const LayerSpec& layer, const LayerTensors& t) {
  if (static_cast<int>(t.weights.size()) != layer.c_out)
    throw ValidationError("layer " + layer.name + ": expected " +
                          std::to_string(layer.c_out) + " weight tensors");
  auto wshape = weight_shape(layer);
  for (const auto& w : t.weights) {
    validate_tensor(w);
    if (w.shape != wshape)
      throw ValidationError("layer " + layer.name + ": weight tensor shape mismatch");
  }
  validate_tensor(t.activations);
  if (t.activations.shape != activation_shape(layer))
    throw ValidationError("layer " + layer.name + ": activation tensor shape mismatch");
}

struct ColumnOutcome {
  int64_t cycles = 0;
};

std::vector<int> completion_order_of(const std::vector<ColumnOutcome>& cols) {
  std::vector<int> order(cols.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return cols[static_cast<std::size_t>(a)].cycles < cols[static_cast<std::size_t>(b)].cycles;
  });
  return order;
}

}  // namespace

LayerResult simulate_layer(const LayerSpec& layer, const LayerTensors& tensors,
                           const AccelConfig& cfg) {
  layer.validate();
  cfg.validate();
  validate_tensors(layer, tensors);

  WorkAssignment wa = schedule_layer(layer, cfg);
  const int64_t dense_cycles = dense_cycle_model(layer, cfg);

  LayerResult result;
  std::vector<std::vector<CycleStats>> per_round;
  per_round.reserve(static_cast<std::size_t>(wa.rounds));

  const int h_out = layer.out_h();
  const int w_out = layer.out_w();
  const int c_out = layer.out_c();
  std::vector<uint32_t> out_shape;
  if (layer.kind == LayerKind::fc)
    out_shape = {static_cast<uint32_t>(c_out)};
  else
    out_shape = {static_cast<uint32_t>(h_out), static_cast<uint32_t>(w_out),
                 static_cast<uint32_t>(c_out)};
  std::size_t out_elems = 1;
  for (uint32_t d : out_shape) out_elems *= d;
  std::vector<int32_t> out_vals(out_elems, 0);
  std::vector<uint8_t> out_computed(out_elems, 0);

  if (layer.kind == LayerKind::regular || layer.kind == LayerKind::depthwise) {
    ConvContext ctx(layer, tensors);
    const bool dw = layer.kind == LayerKind::depthwise;
    std::vector<int> completion(static_cast<std::size_t>(cfg.cols));
    std::iota(completion.begin(), completion.end(), 0);

    for (int t = 0; t < wa.rounds; ++t) {
      const int n_f = static_cast<int>(wa.filters.size());
      const int base = t * cfg.cols;
      const int group = std::min(cfg.cols, n_f - base);

      std::vector<int> order(static_cast<std::size_t>(cfg.cols), -1);
      if (cfg.inter_balance) {
        std::vector<int64_t> density(static_cast<std::size_t>(group));
        for (int i = 0; i < group; ++i)
          density[static_cast<std::size_t>(i)] =
              ctx.wdensity[static_cast<std::size_t>(wa.filters[static_cast<std::size_t>(base + i)])];
        std::vector<int> slot = inter_core_balance(density, completion, cfg.cols);
        for (int c = 0; c < cfg.cols; ++c)
          if (slot[static_cast<std::size_t>(c)] >= 0)
            order[static_cast<std::size_t>(c)] = base + slot[static_cast<std::size_t>(c)];
      } else {
        for (int i = 0; i < group; ++i) order[static_cast<std::size_t>(i)] = base + i;
      }
      result.realized_broadcast.push_back(order);

      std::vector<CycleStats> round_stats;
      std::vector<ColumnOutcome> col_out(static_cast<std::size_t>(cfg.cols));
      for (int c = 0; c < cfg.cols; ++c) {
        if (order[static_cast<std::size_t>(c)] < 0) continue;
        const int f = wa.filters[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
        int64_t col_cycles = 0;
        for (int r = 0; r < cfg.rows; ++r) {
          CycleStats core_stats;
          bool active = false;
          for (int row = r; row < h_out; row += cfg.rows) {
            active = true;
            ConvItemSource src;
            src.ctx = &ctx;
            src.wlanes = ctx.wlanes[static_cast<std::size_t>(f)].data();
            src.wvals = ctx.wvals[static_cast<std::size_t>(f)].data();
            src.acol_row = ctx.acol.data() +
                           static_cast<std::size_t>(row) * ctx.c_in * ctx.w_in;
            src.row0 = row * ctx.stride;
            src.dw_channel = dw ? f : -1;
            src.n_pos = (dw ? 1 : ctx.c_in) * ctx.w_out;
            CoreRunResult run = run_core_stream(src, cfg.core);
            core_stats.cycles += run.stats.cycles;
            core_stats.valid_macs += run.stats.valid_macs;
            core_stats.mac_slots += run.stats.mac_slots;
            for (int x = 0; x < w_out; ++x) {
              std::size_t oi = linear_index(out_shape, static_cast<std::size_t>(row),
                                            static_cast<std::size_t>(x),
                                            static_cast<std::size_t>(f));
              out_vals[oi] = run.values[static_cast<std::size_t>(x)];
              out_computed[oi] = run.computed[static_cast<std::size_t>(x)];
            }
          }
          if (active) {
            round_stats.push_back(core_stats);
            col_cycles = std::max(col_cycles, core_stats.cycles);
          }
        }
        col_out[static_cast<std::size_t>(c)].cycles = col_cycles;
      }
      completion = completion_order_of(col_out);
      per_round.push_back(std::move(round_stats));
    }
  } else if (layer.kind == LayerKind::pointwise) {
    PointwiseContext ctx(layer, tensors, cfg);
    const int n_pos = ctx.h * ctx.w;
    for (int t = 0; t < wa.rounds; ++t) {
      std::vector<CycleStats> round_stats;
      for (int r = 0; r < cfg.rows; ++r) {
        const int f = t * cfg.rows + r;
        if (f >= layer.c_out) break;
        for (int c = 0; c < cfg.cols; ++c) {
          CycleStats core_stats;
          bool active = false;
          for (int b = c; b < ctx.n_batches; b += cfg.cols) {
            active = true;
            PointwiseItemSource src;
            src.ctx = &ctx;
            src.wg = ctx.wgrp[static_cast<std::size_t>(f)].data() +
                     static_cast<std::size_t>(b) * ctx.lanes;
            src.wrow = ctx.wrow[static_cast<std::size_t>(f)].data();
            src.ag = ctx.agrp.data() + static_cast<std::size_t>(b) * n_pos * ctx.lanes;
            src.batch = b;
            CoreRunResult run = run_core_stream(src, cfg.core);
            core_stats.cycles += run.stats.cycles;
            core_stats.valid_macs += run.stats.valid_macs;
            core_stats.mac_slots += run.stats.mac_slots;
            for (int p = 0; p < n_pos; ++p) {
              std::size_t oi = linear_index(
                  out_shape,
                  static_cast<std::size_t>(ctx.pos_h[static_cast<std::size_t>(p)]),
                  static_cast<std::size_t>(ctx.pos_w[static_cast<std::size_t>(p)]),
                  static_cast<std::size_t>(f));
              out_vals[oi] += run.values[static_cast<std::size_t>(p)];
              out_computed[oi] |= run.computed[static_cast<std::size_t>(p)];
            }
          }
          if (active) round_stats.push_back(core_stats);
        }
      }
      per_round.push_back(std::move(round_stats));
    }
  } else {  // fc
    FcContext ctx(layer, tensors, cfg);
    std::vector<CycleStats> round_stats;
    for (int r = 0; r < cfg.rows && r < layer.c_out; ++r) {
      int n_neurons = 0;
      for (int n = r; n < layer.c_out; n += cfg.rows) ++n_neurons;
      for (int c = 0; c < cfg.cols; ++c) {
        CycleStats core_stats;
        bool active = false;
        for (int b = c; b < ctx.n_batches; b += cfg.cols) {
          active = true;
          FcItemSource src;
          src.ctx = &ctx;
          src.row = r;
          src.grid_rows = cfg.rows;
          src.batch = b;
          src.n_neurons = n_neurons;
          CoreRunResult run = run_core_stream(src, cfg.core);
          core_stats.cycles += run.stats.cycles;
          core_stats.valid_macs += run.stats.valid_macs;
          core_stats.mac_slots += run.stats.mac_slots;
          for (int p = 0; p < n_neurons; ++p) {
            std::size_t oi = static_cast<std::size_t>(r + p * cfg.rows);
            out_vals[oi] += run.values[static_cast<std::size_t>(p)];
            out_computed[oi] |= run.computed[static_cast<std::size_t>(p)];
          }
        }
        if (active) round_stats.push_back(core_stats);
      }
    }
    per_round.push_back(std::move(round_stats));
  }

  result.stats = aggregate_stats(per_round, dense_cycles);

  // Output mask generation over the assembled values.
  std::vector<int32_t> computed_vals;
  computed_vals.reserve(out_elems);
  for (std::size_t i = 0; i < out_elems; ++i)
    if (out_computed[i]) computed_vals.push_back(out_vals[i]);
  SparseTensorT<int32_t> encoded =
      relu_encode(computed_vals, out_computed, !layer.no_relu);
  encoded.shape = out_shape;
  result.output = std::move(encoded);
  return result;
}

namespace {

SparseTensor chain_activations(const SparseTensorT<int32_t>& prev,
                               const LayerSpec& next, uint64_t seed, int layer_index) {
  auto target_shape = activation_shape(next);
  std::size_t target_elems = 1;
  for (uint32_t d : target_shape) target_elems *= d;

  SparseTensor act;
  act.shape = target_shape;
  act.mask.assign(mask_words(target_elems), 0);

  Rng rng(mix_seed(seed, {kRoleChainValues, static_cast<uint64_t>(layer_index)}));

  auto emit = [&](std::size_t target_idx) {
    act.set_bit(target_idx);
  };

  if (next.kind == LayerKind::fc) {
    std::size_t prev_elems = prev.total_elems();
    if (prev_elems != target_elems)
      throw ValidationError("model chain break before layer " + next.name +
                            ": cannot flatten " + std::to_string(prev_elems) +
                            " elements into " + std::to_string(target_elems));
    for (std::size_t i = 0; i < prev_elems; ++i)
      if (prev.bit(i)) emit(i);
  } else {
    if (prev.shape.size() != 3)
      throw ValidationError("model chain break before layer " + next.name +
                            ": need a volume input");
    int ph = static_cast<int>(prev.shape[0]);
    int pw = static_cast<int>(prev.shape[1]);
    int pc = static_cast<int>(prev.shape[2]);
    int dh = next.h - ph;
    int dw = next.w - pw;
    if (pc != next.c_in || dh < 0 || dw < 0 || dh % 2 != 0 || dw % 2 != 0)
      throw ValidationError("model chain break before layer " + next.name +
                            ": output " + std::to_string(ph) + "x" + std::to_string(pw) +
                            "x" + std::to_string(pc) + " does not fit input " +
                            std::to_string(next.h) + "x" + std::to_string(next.w) + "x" +
                            std::to_string(next.c_in));
    int oy = dh / 2, ox = dw / 2;
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x)
        for (int c = 0; c < pc; ++c)
          if (prev.bit(linear_index(prev.shape, static_cast<std::size_t>(y),
                                    static_cast<std::size_t>(x),
                                    static_cast<std::size_t>(c))))
            emit(linear_index(target_shape, static_cast<std::size_t>(y + oy),
                              static_cast<std::size_t>(x + ox),
                              static_cast<std::size_t>(c)));
  }
  // nonzero int8 values redrawn for the chained mask (outputs are 32-bit)
  std::size_t nnz = act.popcount();
  act.values.reserve(nnz);
  for (std::size_t i = 0; i < nnz; ++i) act.values.push_back(nonzero_value(rng));
  return act;
}

}  // namespace

NetworkResult simulate_network(const std::vector<LayerSpec>& model,
                               const AccelConfig& cfg, uint64_t seed, bool chain) {
  if (model.empty()) throw ValidationError("model has no layers");
  NetworkResult net;
  net.per_layer.reserve(model.size());
  SparseTensorT<int32_t> prev_output;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const LayerSpec& layer = model[i];
    LayerTensors t = gen_layer_tensors(layer, seed, static_cast<int>(i));
    if (chain && i > 0)
      t.activations = chain_activations(prev_output, layer, seed, static_cast<int>(i));
    LayerResult lr = simulate_layer(layer, t, cfg);
    net.per_layer.push_back(lr.stats);
    prev_output = std::move(lr.output);
  }
  LayerStats agg;
  for (const auto& st : net.per_layer) {
    agg.cycles += st.cycles;
    agg.dense_cycles += st.dense_cycles;
    agg.valid_macs += st.valid_macs;
    agg.mac_slots += st.mac_slots;
  }
  agg.utilization = agg.mac_slots > 0 ? static_cast<double>(agg.valid_macs) /
                                            static_cast<double>(agg.mac_slots)
                                      : 0.0;
  agg.speedup_vs_dense = agg.cycles > 0 ? static_cast<double>(agg.dense_cycles) /
                                              static_cast<double>(agg.cycles)
                                        : static_cast<double>(agg.dense_cycles);
  net.aggregate = agg;
  return net;
}

}  // namespace phantom
