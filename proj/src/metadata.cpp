#include "phantom/metadata.hpp"

namespace phantom {

namespace {

uint32_t bits_needed(uint64_t distinct) {
  uint32_t b = 0;
  while ((uint64_t{1} << b) < distinct) ++b;
  return b;
}

}  // namespace

uint32_t csc_columns(const std::vector<uint32_t>& shape) {
  switch (shape.size()) {
    case 1: return 1;
    case 2: return shape[1];
    case 3: return shape[1] * shape[2];
    default: throw ValidationError("tensor rank must be 1, 2 or 3");
  }
}

uint32_t csc_column_height(const std::vector<uint32_t>& shape) {
  return shape[0];
}

MetadataAccount metadata_access_bits(const std::vector<uint32_t>& shape, uint64_t nnz,
                                     uint32_t index_width, uint32_t offset_width) {
  validate_shape(shape);
  uint64_t elems = 1;
  for (uint32_t d : shape) elems *= d;
  if (nnz > elems) throw ValidationError("metadata accounting: nnz exceeds element count");
  uint32_t cols = csc_columns(shape);
  uint32_t height = csc_column_height(shape);
  if (index_width < bits_needed(height))
    throw ValidationError("index width " + std::to_string(index_width) +
                          " cannot address a column of height " + std::to_string(height));
  if (offset_width < bits_needed(static_cast<uint64_t>(height) + 1))
    throw ValidationError("offset width " + std::to_string(offset_width) +
                          " cannot hold a per-column count up to " + std::to_string(height));
  MetadataAccount acc;
  acc.mask_bits = elems;
  acc.csc_bits = nnz * index_width + (static_cast<uint64_t>(cols) + 1) * offset_width;
  acc.ratio = static_cast<double>(acc.csc_bits) / static_cast<double>(acc.mask_bits);
  return acc;
}

template <typename V>
MetadataAccount metadata_access_bits(const SparseTensorT<V>& t, uint32_t index_width,
                                     uint32_t offset_width) {
  validate_tensor(t);
  return metadata_access_bits(t.shape, t.nnz(), index_width, offset_width);
}

template MetadataAccount metadata_access_bits<int8_t>(const SparseTensorT<int8_t>&,
                                                      uint32_t, uint32_t);
template MetadataAccount metadata_access_bits<int32_t>(const SparseTensorT<int32_t>&,
                                                       uint32_t, uint32_t);

}  // namespace phantom
