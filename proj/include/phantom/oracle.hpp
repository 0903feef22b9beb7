#pragma once

#include <cstdint>
#include <vector>

#include "phantom/layer.hpp"
#include "phantom/sparse_tensor.hpp"

namespace phantom::oracle {

// Plain dense tensor for the reference math. Same canonical linear order as
// SparseTensorT; values are 32-bit but inputs stay in int8 range.
struct DenseTensor {
  std::vector<uint32_t> shape;
  std::vector<int32_t> values;

  std::size_t total_elems() const {
    std::size_t n = 1;
    for (uint32_t d : shape) n *= d;
    return n;
  }
  int32_t at(std::size_t h, std::size_t w = 0, std::size_t c = 0) const {
    return values[linear_index(shape, h, w, c)];
  }
};

template <typename V>
DenseTensor to_dense(const SparseTensorT<V>& t) {
  DenseTensor d;
  d.shape = t.shape;
  auto vals = decode(t);
  d.values.assign(vals.begin(), vals.end());
  return d;
}

DenseTensor relu(DenseTensor t);

// Textbook direct convolution, valid geometry, 32-bit accumulation.
//   regular:   filters[f]  volume [K,K,C]   -> output [H_out, W_out, F]
//   depthwise: filters[ch] matrix [K,K]     -> output [H_out, W_out, C]
//   pointwise: filters[f]  vector [C]       -> output [H, W, F]
DenseTensor dense_conv(const DenseTensor& input, const std::vector<DenseTensor>& filters,
                       int stride, LayerKind mode);

// Matrix-vector product; weights [in_len, out_len], column n = neuron n.
DenseTensor dense_fc(const DenseTensor& input, const DenseTensor& weights);

// Valid (nonzero x nonzero) multiply count for one kernel sliding over one
// activation matrix: sum over output positions of popcount(wmask AND window).
int64_t count_valid_macs(const SparseTensor& wmask, const SparseTensor& amask,
                         int stride = 1);

// Whole-layer valid-MAC count straight from the masks; independent of the
// pipeline path. filter_subset empty = all filters.
int64_t count_layer_valid_macs(const LayerSpec& layer,
                               const std::vector<SparseTensor>& weights,
                               const SparseTensor& acts,
                               const std::vector<int>& filter_subset = {});

// Reference output for a whole layer (ReLU applied unless no_relu).
DenseTensor layer_reference(const LayerSpec& layer, const LayerTensors& tensors,
                            const std::vector<int>& filter_subset = {});

}  // namespace phantom::oracle
