#pragma once

#include <cstdint>

#include "phantom/sparse_tensor.hpp"

namespace phantom {

// Location-metadata traffic for one tensor: the binary mask (one bit per
// element) versus CSC row indices + column offsets. Value payloads are
// identical in both formats and excluded.
struct MetadataAccount {
  uint64_t mask_bits = 0;
  uint64_t csc_bits = 0;
  double ratio = 0.0;  // csc_bits / mask_bits
};

// CSC matrixization: a matrix keeps its W columns of height H; a volume is
// split into W*C sub-columns of height H (matching the channel-major-within-
// column layout); a vector is a single column. index_width must address a
// column, offset_width must hold a per-column cumulative count.
uint32_t csc_columns(const std::vector<uint32_t>& shape);
uint32_t csc_column_height(const std::vector<uint32_t>& shape);

template <typename V>
MetadataAccount metadata_access_bits(const SparseTensorT<V>& t, uint32_t index_width,
                                     uint32_t offset_width);

// Closed-form variant used by sweep reports: needs only shape and nnz.
MetadataAccount metadata_access_bits(const std::vector<uint32_t>& shape, uint64_t nnz,
                                     uint32_t index_width, uint32_t offset_width);

}  // namespace phantom
