#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "phantom/layer.hpp"
#include "phantom/sparse_tensor.hpp"

namespace phantom {

// Hand-rolled splitmix64 so streams are bit-identical across platforms and
// standard libraries.
struct Rng {
  uint64_t state = 0;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Lemire-style bounded draw, bias < 2^-32 (irrelevant at desk scale).
  uint32_t below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<uint64_t>(static_cast<uint32_t>(next())) * n) >> 32);
  }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
  }
};

// Independent substream per (seed, identifiers) so parallel sweep points see
// identical tensors regardless of execution order.
uint64_t mix_seed(uint64_t seed, std::initializer_list<uint64_t> parts);

// Uniform nonzero int8 in [-127, -1] or [1, 127].
int8_t nonzero_value(Rng& rng);

// Bernoulli(density) mask with nonzero int8 values at the set bits.
SparseTensor gen_mask_tensor(const std::vector<uint32_t>& shape, double density,
                             uint64_t stream_seed);

inline constexpr uint64_t kRoleWeights = 1;
inline constexpr uint64_t kRoleActivations = 2;
inline constexpr uint64_t kRoleChainValues = 3;

// Weights and activations for one layer at its stated densities.
LayerTensors gen_layer_tensors(const LayerSpec& layer, uint64_t seed, int layer_index);

// Weight shape for filter f of this layer.
std::vector<uint32_t> weight_shape(const LayerSpec& layer);
std::vector<uint32_t> activation_shape(const LayerSpec& layer);

}  // namespace phantom
