#include "phantom/core.hpp"

namespace phantom {

namespace {

// Single-channel [K, W] slab swept by a [K, K] kernel with one output key per
// window start.
struct MatrixChunkSource {
  int k = 0;
  int w = 0;
  int w_out = 0;
  int stride = 1;
  std::vector<uint8_t> wlanes;  // per kernel column: bits over rows
  std::vector<uint8_t> acols;   // per input column: bits over rows
  std::vector<int8_t> wvals;    // [row * k + col]
  std::vector<int8_t> avals;    // [row * w + col]

  int positions() const { return w_out; }
  int n_keys() const { return w_out; }
  int64_t key(int pos) const { return pos; }
  uint8_t wbits(int, int lane) const { return wlanes[static_cast<std::size_t>(lane)]; }
  uint8_t abits(int pos, int lane) const {
    return acols[static_cast<std::size_t>(pos * stride + lane)];
  }
  int32_t product(int pos, int lane, uint8_t g) const {
    const int col = pos * stride + lane;
    int32_t acc = 0;
    for (int slot = 0; slot < k; ++slot)
      if (g >> slot & 1)
        acc += static_cast<int32_t>(wvals[static_cast<std::size_t>(slot * k + lane)]) *
               static_cast<int32_t>(avals[static_cast<std::size_t>(slot * w + col)]);
    return acc;
  }
};

}  // namespace

std::pair<SparseTensorT<int32_t>, CycleStats> simulate_core_chunk(
    const SparseTensor& weights, const SparseTensor& chunk, const CoreConfig& cfg,
    int stride, bool apply_relu) {
  cfg.validate();
  validate_tensor(weights);
  validate_tensor(chunk);
  if (stride < 1) throw ValidationError("stride must be >= 1");
  if (weights.shape.size() != 2 || chunk.shape.size() != 2)
    throw ValidationError("simulate_core_chunk expects matrix weights and chunk");
  const int k = static_cast<int>(weights.shape[0]);
  if (static_cast<int>(weights.shape[1]) != k)
    throw ValidationError("kernel must be square");
  if (k != cfg.pe_count || k != cfg.threads_per_pe)
    throw ValidationError("kernel extent must match the PE/thread geometry");
  const int rows = static_cast<int>(chunk.shape[0]);
  const int w = static_cast<int>(chunk.shape[1]);
  if (rows != k) throw ValidationError("chunk row count must match the kernel");
  if (w < k) throw ValidationError("chunk narrower than the kernel");

  MatrixChunkSource src;
  src.k = k;
  src.w = w;
  src.stride = stride;
  src.w_out = (w - k) / stride + 1;

  auto wdense = decode(weights);
  auto adense = decode(chunk);
  src.wvals.assign(static_cast<std::size_t>(k) * k, 0);
  src.avals.assign(static_cast<std::size_t>(k) * w, 0);
  src.wlanes.assign(static_cast<std::size_t>(k), 0);
  src.acols.assign(static_cast<std::size_t>(w), 0);
  for (int col = 0; col < k; ++col)
    for (int row = 0; row < k; ++row) {
      int8_t v = wdense[linear_index(weights.shape, static_cast<std::size_t>(row),
                                     static_cast<std::size_t>(col), 0)];
      src.wvals[static_cast<std::size_t>(row * k + col)] = v;
      if (v != 0) src.wlanes[static_cast<std::size_t>(col)] |= uint8_t{1} << row;
    }
  for (int col = 0; col < w; ++col)
    for (int row = 0; row < rows; ++row) {
      int8_t v = adense[linear_index(chunk.shape, static_cast<std::size_t>(row),
                                     static_cast<std::size_t>(col), 0)];
      src.avals[static_cast<std::size_t>(row * w + col)] = v;
      if (v != 0) src.acols[static_cast<std::size_t>(col)] |= uint8_t{1} << row;
    }

  CoreRunResult run = run_core_stream(src, cfg);
  std::vector<int32_t> computed_values;
  computed_values.reserve(run.values.size());
  for (std::size_t i = 0; i < run.values.size(); ++i)
    if (run.computed[i]) computed_values.push_back(run.values[i]);
  auto fragment = relu_encode(computed_values, run.computed, apply_relu);
  return {fragment, run.stats};
}

}  // namespace phantom
