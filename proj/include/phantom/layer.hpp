#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phantom/errors.hpp"
#include "phantom/sparse_tensor.hpp"

namespace phantom {

enum class LayerKind { regular, depthwise, pointwise, fc };

const char* to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

// One CNN layer. Spatial extents are the layer's own input extents (any
// padding is pre-applied to the stated dims); "valid" geometry throughout.
// For fc layers h = w = 1 and c_in is the input vector length.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::regular;
  int h = 1, w = 1, c_in = 1;
  int k = 3;
  int c_out = 1;
  int stride = 1;
  bool no_relu = false;
  double weight_density = 1.0;
  double act_density = 1.0;

  int out_h() const;
  int out_w() const;
  int out_c() const { return c_out; }

  void validate() const;
};

// Weights as one sparse tensor per filter:
//   regular    filters[f]  : volume [K, K, C_in]
//   depthwise  filters[ch] : matrix [K, K]
//   pointwise  filters[f]  : vector [C_in]
//   fc         filters[n]  : vector [c_in]
// Activations: volume [H, W, C_in], or vector [c_in] for fc.
struct LayerTensors {
  std::vector<SparseTensor> weights;
  SparseTensor activations;
};

struct LayerStats {
  int64_t cycles = 0;
  int64_t dense_cycles = 0;
  int64_t valid_macs = 0;
  int64_t mac_slots = 0;  // busy slots over active core-rounds
  double utilization = 0.0;
  double speedup_vs_dense = 0.0;
};

}  // namespace phantom
