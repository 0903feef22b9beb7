#include "phantom/synth.hpp"

namespace phantom {

uint64_t mix_seed(uint64_t seed, std::initializer_list<uint64_t> parts) {
  Rng rng(seed ^ 0x5bf0f5e4c1d9a2b7ull);
  uint64_t acc = rng.next();
  for (uint64_t p : parts) {
    Rng sub(acc ^ (p + 0x9e3779b97f4a7c15ull));
    acc = sub.next();
  }
  return acc;
}

int8_t nonzero_value(Rng& rng) {
  uint32_t u = rng.below(254);  // 0..253
  int v = (u < 127) ? static_cast<int>(u) - 127 : static_cast<int>(u) - 126;
  return static_cast<int8_t>(v);
}

SparseTensor gen_mask_tensor(const std::vector<uint32_t>& shape, double density,
                             uint64_t stream_seed) {
  validate_shape(shape);
  if (density <= 0.0 || density > 1.0)
    throw ValidationError("density must be in (0, 1]");
  SparseTensor t;
  t.shape = shape;
  std::size_t elems = t.total_elems();
  t.mask.assign(mask_words(elems), 0);
  Rng rng(stream_seed);
  for (std::size_t i = 0; i < elems; ++i) {
    if (rng.bernoulli(density)) {
      t.set_bit(i);
      t.values.push_back(nonzero_value(rng));
    }
  }
  return t;
}

std::vector<uint32_t> weight_shape(const LayerSpec& layer) {
  switch (layer.kind) {
    case LayerKind::regular:
      return {static_cast<uint32_t>(layer.k), static_cast<uint32_t>(layer.k),
              static_cast<uint32_t>(layer.c_in)};
    case LayerKind::depthwise:
      return {static_cast<uint32_t>(layer.k), static_cast<uint32_t>(layer.k)};
    case LayerKind::pointwise:
    case LayerKind::fc:
      return {static_cast<uint32_t>(layer.c_in)};
  }
  throw ValidationError("unknown layer kind");
}

std::vector<uint32_t> activation_shape(const LayerSpec& layer) {
  if (layer.kind == LayerKind::fc) return {static_cast<uint32_t>(layer.c_in)};
  return {static_cast<uint32_t>(layer.h), static_cast<uint32_t>(layer.w),
          static_cast<uint32_t>(layer.c_in)};
}

LayerTensors gen_layer_tensors(const LayerSpec& layer, uint64_t seed, int layer_index) {
  layer.validate();
  LayerTensors t;
  t.weights.reserve(static_cast<std::size_t>(layer.c_out));
  for (int f = 0; f < layer.c_out; ++f)
    t.weights.push_back(gen_mask_tensor(
        weight_shape(layer), layer.weight_density,
        mix_seed(seed, {kRoleWeights, static_cast<uint64_t>(layer_index),
                        static_cast<uint64_t>(f)})));
  t.activations = gen_mask_tensor(
      activation_shape(layer), layer.act_density,
      mix_seed(seed, {kRoleActivations, static_cast<uint64_t>(layer_index)}));
  return t;
}

}  // namespace phantom
