#include "phantom/sparse_tensor.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace phantom {

void validate_shape(const std::vector<uint32_t>& shape) {
  if (shape.empty() || shape.size() > 3)
    throw ValidationError("tensor rank must be 1, 2 or 3");
  for (uint32_t d : shape)
    if (d == 0) throw ValidationError("tensor extents must be positive");
}

template <typename V>
void validate_tensor(const SparseTensorT<V>& t) {
  validate_shape(t.shape);
  std::size_t elems = t.total_elems();
  if (t.mask.size() != mask_words(elems))
    throw ValidationError("tensor mask has wrong word count");
  if (elems % 64 != 0) {
    uint64_t tail = t.mask.back() >> (elems % 64);
    if (tail != 0) throw ValidationError("tensor mask has bits past the last element");
  }
  if (t.popcount() != t.nnz())
    throw ValidationError("tensor integrity: mask popcount " +
                          std::to_string(t.popcount()) + " != stored values " +
                          std::to_string(t.nnz()));
  for (V v : t.values)
    if (v == 0) throw ValidationError("tensor integrity: stored value is zero");
}

template void validate_tensor<int8_t>(const SparseTensorT<int8_t>&);
template void validate_tensor<int32_t>(const SparseTensorT<int32_t>&);

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

struct Reader {
  const std::vector<uint8_t>& b;
  std::size_t at = 0;
  uint8_t u8() {
    if (at >= b.size()) throw ValidationError("tensor file truncated");
    return b[at++];
  }
  uint16_t u16() { return static_cast<uint16_t>(u8() | (u8() << 8)); }
  uint32_t u32() {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(u8()) << (8 * i);
    return v;
  }
  uint64_t u64() {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(u8()) << (8 * i);
    return v;
  }
};

constexpr uint16_t kFormatVersion = 1;

}  // namespace

std::vector<uint8_t> serialize_tensor(const SparseTensor& t) {
  validate_tensor(t);
  std::vector<uint8_t> out;
  out.push_back('P');
  out.push_back('H');
  out.push_back('S');
  out.push_back('M');
  put_u16(out, kFormatVersion);
  out.push_back(static_cast<uint8_t>(t.shape.size()));
  for (uint32_t d : t.shape) put_u32(out, d);
  put_u32(out, static_cast<uint32_t>(t.nnz()));
  for (uint64_t w : t.mask) put_u64(out, w);
  for (int8_t v : t.values) out.push_back(static_cast<uint8_t>(v));
  return out;
}

SparseTensor deserialize_tensor(const std::vector<uint8_t>& bytes) {
  Reader r{bytes};
  if (r.u8() != 'P' || r.u8() != 'H' || r.u8() != 'S' || r.u8() != 'M')
    throw ValidationError("tensor file: bad magic");
  uint16_t version = r.u16();
  if (version != kFormatVersion)
    throw ValidationError("tensor file: unsupported version " + std::to_string(version));
  uint8_t rank = r.u8();
  if (rank < 1 || rank > 3) throw ValidationError("tensor file: bad rank");
  SparseTensor t;
  for (int i = 0; i < rank; ++i) t.shape.push_back(r.u32());
  validate_shape(t.shape);
  uint32_t nnz = r.u32();
  std::size_t elems = t.total_elems();
  if (nnz > elems) throw ValidationError("tensor file: nnz exceeds element count");
  t.mask.resize(mask_words(elems));
  for (auto& w : t.mask) w = r.u64();
  t.values.resize(nnz);
  for (auto& v : t.values) v = static_cast<int8_t>(r.u8());
  if (r.at != bytes.size()) throw ValidationError("tensor file: trailing bytes");
  validate_tensor(t);
  return t;
}

void save_tensor(const SparseTensor& t, const std::string& path) {
  auto bytes = serialize_tensor(t);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ValidationError("write failed: " + path);
}

SparseTensor load_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return deserialize_tensor(bytes);
}

}  // namespace phantom
