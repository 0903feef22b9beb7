#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "phantom/errors.hpp"

namespace phantom {

enum class LayoutTag { vector, matrix, volume };

// Binary-mask sparse tensor: one mask bit per logical element in column-major
// order, nonzero values packed in the same order. Rank decides the layout tag
// (1 = vector, 2 = matrix [H,W], 3 = volume [H,W,C]).
//
// Canonical linear order:
//   vector [N]      idx = n
//   matrix [H,W]    idx = w*H + h                 (columns contiguous)
//   volume [H,W,C]  idx = w*H*C + c*H + h         (channel-major within a column)
template <typename V>
struct SparseTensorT {
  std::vector<uint32_t> shape;
  std::vector<uint64_t> mask;  // packed little-endian 64-bit words
  std::vector<V> values;

  LayoutTag tag() const {
    switch (shape.size()) {
      case 1: return LayoutTag::vector;
      case 2: return LayoutTag::matrix;
      case 3: return LayoutTag::volume;
      default: throw ValidationError("tensor rank must be 1, 2 or 3");
    }
  }

  std::size_t total_elems() const {
    std::size_t n = 1;
    for (uint32_t d : shape) n *= d;
    return n;
  }

  std::size_t nnz() const { return values.size(); }

  bool bit(std::size_t i) const { return (mask[i >> 6] >> (i & 63)) & 1u; }

  void set_bit(std::size_t i) { mask[i >> 6] |= uint64_t{1} << (i & 63); }

  std::size_t popcount() const {
    std::size_t n = 0;
    for (uint64_t w : mask) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
};

using SparseTensor = SparseTensorT<int8_t>;

inline std::size_t mask_words(std::size_t elems) { return (elems + 63) / 64; }

inline std::size_t linear_index(const std::vector<uint32_t>& shape, std::size_t h,
                                std::size_t w, std::size_t c) {
  switch (shape.size()) {
    case 1: return h;
    case 2: return w * shape[0] + h;
    case 3: return (w * shape[2] + c) * shape[0] + h;
    default: throw ValidationError("tensor rank must be 1, 2 or 3");
  }
}

void validate_shape(const std::vector<uint32_t>& shape);

// Throws ValidationError if the tensor's invariants don't hold
// (rank, mask width, popcount == nnz, no stored zeros).
template <typename V>
void validate_tensor(const SparseTensorT<V>& t);

template <typename V>
SparseTensorT<V> encode_dense(const std::vector<V>& dense,
                              const std::vector<uint32_t>& shape) {
  validate_shape(shape);
  std::size_t elems = 1;
  for (uint32_t d : shape) elems *= d;
  if (elems != dense.size())
    throw ValidationError("encode_dense: shape covers " + std::to_string(elems) +
                          " elements but array holds " + std::to_string(dense.size()));
  SparseTensorT<V> t;
  t.shape = shape;
  t.mask.assign(mask_words(elems), 0);
  for (std::size_t i = 0; i < elems; ++i) {
    if (dense[i] != 0) {
      t.set_bit(i);
      t.values.push_back(dense[i]);
    }
  }
  return t;
}

template <typename V>
std::vector<V> decode(const SparseTensorT<V>& t) {
  validate_tensor(t);
  std::vector<V> dense(t.total_elems(), V{0});
  std::size_t vi = 0;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (t.bit(i)) dense[i] = t.values[vi++];
  return dense;
}

template <typename V>
double density(const SparseTensorT<V>& t) {
  std::size_t elems = t.total_elems();
  if (elems == 0) return 0.0;
  return static_cast<double>(t.nnz()) / static_cast<double>(elems);
}

// Binary tensor file: magic "PHSM", version u16, rank u8, extents u32 each,
// nnz u32, mask as little-endian u64 words, values as raw signed bytes.
void save_tensor(const SparseTensor& t, const std::string& path);
SparseTensor load_tensor(const std::string& path);

std::vector<uint8_t> serialize_tensor(const SparseTensor& t);
SparseTensor deserialize_tensor(const std::vector<uint8_t>& bytes);

}  // namespace phantom
