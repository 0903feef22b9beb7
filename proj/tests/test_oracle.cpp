#include <doctest.h>

#include <random>

#include "phantom/oracle.hpp"
#include "phantom/synth.hpp"

using namespace phantom;
using oracle::DenseTensor;

namespace {

DenseTensor make_volume(int h, int w, int c, std::mt19937& rng, int zero_every = 3) {
  DenseTensor t;
  t.shape = {static_cast<uint32_t>(h), static_cast<uint32_t>(w), static_cast<uint32_t>(c)};
  t.values.resize(t.total_elems());
  for (auto& v : t.values)
    v = (rng() % zero_every == 0) ? 0 : static_cast<int32_t>(rng() % 255) - 127;
  return t;
}

}  // namespace

TEST_CASE("dense_conv: identity 1x1 pointwise filter passes the input through") {
  std::mt19937 rng(5);
  auto in = make_volume(4, 5, 1, rng);
  DenseTensor f;
  f.shape = {1};
  f.values = {1};
  auto out = oracle::dense_conv(in, {f}, 1, LayerKind::pointwise);
  CHECK(out.values == in.values);
}

TEST_CASE("dense_conv: all-zero filter gives all-zero output") {
  std::mt19937 rng(6);
  auto in = make_volume(6, 6, 2, rng);
  DenseTensor f;
  f.shape = {3, 3, 2};
  f.values.assign(18, 0);
  auto out = oracle::dense_conv(in, {f}, 1, LayerKind::regular);
  for (auto v : out.values) CHECK(v == 0);
}

TEST_CASE("dense_conv: 3x8 input with a 3x3 filter gives a 1x6 output") {
  std::mt19937 rng(7);
  auto in = make_volume(3, 8, 1, rng);
  DenseTensor f;
  f.shape = {3, 3, 1};
  f.values.assign(9, 1);
  auto out = oracle::dense_conv(in, {f}, 1, LayerKind::regular);
  CHECK(out.shape[0] == 1);
  CHECK(out.shape[1] == 6);
  CHECK(out.shape[2] == 1);
}

TEST_CASE("dense_fc: identity matrix passes through, zero vector stays zero") {
  DenseTensor in;
  in.shape = {4};
  in.values = {3, -2, 7, 0};
  DenseTensor w;
  w.shape = {4, 4};
  w.values.assign(16, 0);
  for (int i = 0; i < 4; ++i) w.values[static_cast<std::size_t>(i * 4 + i)] = 1;
  auto out = oracle::dense_fc(in, w);
  CHECK(out.values == in.values);

  DenseTensor zero;
  zero.shape = {4};
  zero.values.assign(4, 0);
  auto out2 = oracle::dense_fc(zero, w);
  CHECK(out2.values == std::vector<int32_t>(4, 0));
}

TEST_CASE("dense_fc: 36->49 case cross-checked against a per-neuron loop") {
  std::mt19937 rng(8);
  DenseTensor in;
  in.shape = {36};
  in.values.resize(36);
  for (auto& v : in.values) v = static_cast<int32_t>(rng() % 255) - 127;
  DenseTensor w;
  w.shape = {36, 49};
  w.values.resize(36 * 49);
  for (auto& v : w.values) v = (rng() % 2) ? static_cast<int32_t>(rng() % 255) - 127 : 0;
  auto out = oracle::dense_fc(in, w);
  REQUIRE(out.values.size() == 49);
  for (int n = 0; n < 49; ++n) {
    int32_t acc = 0;
    for (int i = 0; i < 36; ++i) acc += in.values[static_cast<std::size_t>(i)] * w.at(i, n);
    CHECK(out.values[static_cast<std::size_t>(n)] == acc);
  }
}

TEST_CASE("count_valid_macs: dense 3x3 kernel over a 3x8 input counts 54") {
  std::vector<int8_t> wall(9, 1), aall(24, 1);
  auto wm = encode_dense(wall, {3, 3});
  auto am = encode_dense(aall, {3, 8});
  CHECK(oracle::count_valid_macs(wm, am) == 54);
}

TEST_CASE("count_valid_macs: an instance with 55% ineffectual products counts 24") {
  // dense kernel, activations arranged so the six windows overlap 24 ones
  std::vector<int8_t> wall(9, 1);
  auto wm = encode_dense(wall, {3, 3});
  std::vector<int8_t> act(24, 0);
  // col-major 3x8: columns 1, 3, 5 fully nonzero; the six windows then
  // overlap 3+6+3+6+3+3 = 24 of the 54 candidate products
  for (int col : {1, 3, 5})
    for (int rowi = 0; rowi < 3; ++rowi) act[static_cast<std::size_t>(col * 3 + rowi)] = 1;
  auto am = encode_dense(act, {3, 8});
  int64_t got = oracle::count_valid_macs(wm, am);
  CHECK(got == 24);
}

TEST_CASE("count_valid_macs: all-zero activations count 0") {
  std::vector<int8_t> wall(9, 1), az(24, 0);
  CHECK(oracle::count_valid_macs(encode_dense(wall, {3, 3}), encode_dense(az, {3, 8})) == 0);
}

TEST_CASE("layer_reference matches dense_conv plus ReLU") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 6;
  l.w = 7;
  l.c_in = 2;
  l.c_out = 3;
  l.k = 3;
  l.weight_density = 0.5;
  l.act_density = 0.5;
  LayerTensors t = gen_layer_tensors(l, 99, 0);
  auto ref = oracle::layer_reference(l, t);
  auto in = oracle::to_dense(t.activations);
  std::vector<DenseTensor> filters;
  for (const auto& w : t.weights) filters.push_back(oracle::to_dense(w));
  auto direct = oracle::relu(oracle::dense_conv(in, filters, 1, LayerKind::regular));
  CHECK(ref.values == direct.values);
}
