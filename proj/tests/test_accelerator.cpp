#include <doctest.h>

#include "phantom/accelerator.hpp"
#include "phantom/model.hpp"
#include "phantom/sweep.hpp"
#include "phantom/oracle.hpp"
#include "phantom/synth.hpp"

using namespace phantom;

namespace {

bool matches_reference(const LayerSpec& l, const LayerTensors& t, const AccelConfig& cfg) {
  LayerResult r = simulate_layer(l, t, cfg);
  auto got = decode(r.output);
  auto ref = oracle::layer_reference(l, t);
  if (got.size() != ref.values.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i] != ref.values[i]) return false;
  return r.stats.valid_macs == oracle::count_layer_valid_macs(l, t.weights, t.activations);
}

LayerSpec depthwise_9x5x4() {
  LayerSpec l;
  l.kind = LayerKind::depthwise;
  l.h = 9;
  l.w = 5;
  l.c_in = l.c_out = 4;
  l.k = 3;
  l.weight_density = 0.6;
  l.act_density = 0.5;
  return l;
}

}  // namespace

TEST_CASE("depthwise 9x5x4 end to end equals the oracle") {
  auto l = depthwise_9x5x4();
  LayerTensors t = gen_layer_tensors(l, 7, 0);
  AccelConfig cfg;
  cfg.core.lf = 3;
  CHECK(matches_reference(l, t, cfg));
}

TEST_CASE("regular conv with stride 2 equals the oracle") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 13;
  l.w = 11;
  l.c_in = 3;
  l.c_out = 5;
  l.k = 3;
  l.stride = 2;
  l.weight_density = 0.4;
  l.act_density = 0.6;
  LayerTensors t = gen_layer_tensors(l, 8, 0);
  AccelConfig cfg;
  cfg.core.lf = 6;
  CHECK(matches_reference(l, t, cfg));
}

TEST_CASE("pointwise layer equals the oracle after cross-column accumulation") {
  LayerSpec l;
  l.kind = LayerKind::pointwise;
  l.k = 1;
  l.h = 3;
  l.w = 3;
  l.c_in = 36;
  l.c_out = 7;
  l.weight_density = 0.5;
  l.act_density = 0.5;
  LayerTensors t = gen_layer_tensors(l, 9, 0);
  AccelConfig cfg;
  cfg.core.lf = 9;
  CHECK(matches_reference(l, t, cfg));
  // output shape 3x3x7
  LayerResult r = simulate_layer(l, t, cfg);
  CHECK(r.output.shape == std::vector<uint32_t>{3, 3, 7});
}

TEST_CASE("fc 36 -> 49 equals the oracle") {
  LayerSpec l;
  l.kind = LayerKind::fc;
  l.k = 1;
  l.h = l.w = 1;
  l.c_in = 36;
  l.c_out = 49;
  l.weight_density = 0.5;
  l.act_density = 0.5;
  LayerTensors t = gen_layer_tensors(l, 10, 0);
  AccelConfig cfg;
  CHECK(matches_reference(l, t, cfg));
}

TEST_CASE("fc without ReLU keeps negative outputs") {
  LayerSpec l;
  l.kind = LayerKind::fc;
  l.k = 1;
  l.h = l.w = 1;
  l.c_in = 20;
  l.c_out = 10;
  l.no_relu = true;
  l.weight_density = 0.8;
  l.act_density = 0.8;
  LayerTensors t = gen_layer_tensors(l, 11, 0);
  AccelConfig cfg;
  LayerResult r = simulate_layer(l, t, cfg);
  auto got = decode(r.output);
  auto ref = oracle::layer_reference(l, t);
  bool any_negative = false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i] == ref.values[i]);
    if (got[i] < 0) any_negative = true;
  }
  CHECK(any_negative);
}

TEST_CASE("fully dense layer has speedup 1.0") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 9;
  l.w = 9;
  l.c_in = 2;
  l.c_out = 4;
  l.k = 3;
  l.weight_density = 1.0;
  l.act_density = 1.0;
  LayerTensors t = gen_layer_tensors(l, 12, 0);
  AccelConfig cfg;
  cfg.core.lf = 1;
  LayerResult r = simulate_layer(l, t, cfg);
  CHECK(r.stats.speedup_vs_dense == doctest::Approx(1.0));
  // each core streams 7x2 positions at full occupancy plus the 2-cycle fill
  CHECK(r.stats.utilization == doctest::Approx(14.0 / 16.0));
}

TEST_CASE("balancing configurations preserve outputs and MAC counts") {
  auto l = depthwise_9x5x4();
  LayerTensors t = gen_layer_tensors(l, 13, 0);
  std::vector<int32_t> base;
  int64_t macs = -1;
  for (bool intra : {false, true})
    for (bool inter : {false, true}) {
      AccelConfig cfg;
      cfg.core.lf = 6;
      cfg.core.intra_balance = intra;
      cfg.inter_balance = inter;
      LayerResult r = simulate_layer(l, t, cfg);
      auto got = decode(r.output);
      if (base.empty()) {
        base.assign(got.begin(), got.end());
        macs = r.stats.valid_macs;
      } else {
        CHECK(std::equal(base.begin(), base.end(), got.begin()));
        CHECK(r.stats.valid_macs == macs);
      }
    }
}

TEST_CASE("inter-core balancing reorders the broadcast by density") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 9;
  l.w = 9;
  l.c_in = 4;
  l.c_out = 8;  // two rounds of four filters
  l.k = 3;
  l.weight_density = 0.5;
  l.act_density = 0.5;
  LayerTensors t = gen_layer_tensors(l, 14, 0);
  AccelConfig cfg;
  cfg.inter_balance = true;
  LayerResult r = simulate_layer(l, t, cfg);
  REQUIRE(r.realized_broadcast.size() == 2);
  // round 2's order pairs descending densities with the completion order
  std::vector<int64_t> d;
  for (int f = 4; f < 8; ++f) d.push_back(static_cast<int64_t>(t.weights[static_cast<std::size_t>(f)].nnz()));
  const auto& order = r.realized_broadcast[1];
  std::vector<int> sorted_slots;
  for (int c = 0; c < 4; ++c) sorted_slots.push_back(order[static_cast<std::size_t>(c)] - 4);
  // each filter appears exactly once
  std::vector<bool> seen(4, false);
  for (int s : sorted_slots) {
    REQUIRE(s >= 0);
    REQUIRE(s < 4);
    CHECK(!seen[static_cast<std::size_t>(s)]);
    seen[static_cast<std::size_t>(s)] = true;
  }
}

TEST_CASE("subsampled filters simulate a subset and keep oracle equality on it") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 9;
  l.w = 9;
  l.c_in = 2;
  l.c_out = 8;
  l.k = 3;
  l.weight_density = 0.5;
  l.act_density = 0.5;
  LayerTensors t = gen_layer_tensors(l, 15, 0);
  AccelConfig cfg;
  cfg.filter_fraction = 0.25;
  auto wa = schedule_layer(l, cfg);
  CHECK(wa.filters.size() == 2);
  LayerResult r = simulate_layer(l, t, cfg);
  auto ref = oracle::layer_reference(l, t, wa.filters);
  auto got = decode(r.output);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == ref.values[i]);
  CHECK(r.stats.valid_macs ==
        oracle::count_layer_valid_macs(l, t.weights, t.activations, wa.filters));
}

TEST_CASE("simulate_network: a one-layer model equals simulate_layer") {
  auto l = depthwise_9x5x4();
  AccelConfig cfg;
  cfg.core.lf = 6;
  NetworkResult net = simulate_network({l}, cfg, 21, false);
  LayerTensors t = gen_layer_tensors(l, 21, 0);
  LayerResult r = simulate_layer(l, t, cfg);
  CHECK(net.per_layer.size() == 1);
  CHECK(net.per_layer[0].cycles == r.stats.cycles);
  CHECK(net.per_layer[0].valid_macs == r.stats.valid_macs);
  CHECK(net.aggregate.cycles == r.stats.cycles);
}

TEST_CASE("simulate_network chains masks through compatible layers") {
  // 9x9x2 regular (out 7x7x4) -> pad-compatible 9x9x4 regular -> fc
  std::vector<LayerSpec> model;
  LayerSpec a;
  a.name = "a";
  a.kind = LayerKind::regular;
  a.h = 9;
  a.w = 9;
  a.c_in = 2;
  a.c_out = 4;
  a.k = 3;
  a.weight_density = 0.6;
  a.act_density = 0.6;
  model.push_back(a);
  LayerSpec b = a;
  b.name = "b";
  b.c_in = 4;
  b.c_out = 3;
  model.push_back(b);  // 7x7 output + pad margin 2 = 9x9 input
  LayerSpec c;
  c.name = "c";
  c.kind = LayerKind::fc;
  c.k = 1;
  c.h = c.w = 1;
  c.c_in = 7 * 7 * 3;
  c.c_out = 5;
  c.weight_density = 0.5;
  c.act_density = 0.5;
  c.no_relu = true;
  model.push_back(c);
  AccelConfig cfg;
  NetworkResult net = simulate_network(model, cfg, 33, true);
  CHECK(net.per_layer.size() == 3);
  CHECK(net.aggregate.cycles ==
        net.per_layer[0].cycles + net.per_layer[1].cycles + net.per_layer[2].cycles);
}

TEST_CASE("simulate_network rejects incompatible chains") {
  std::vector<LayerSpec> model;
  LayerSpec a;
  a.kind = LayerKind::regular;
  a.h = 9;
  a.w = 9;
  a.c_in = 2;
  a.c_out = 4;
  a.k = 3;
  a.weight_density = 0.5;
  a.act_density = 0.5;
  model.push_back(a);
  LayerSpec b = a;
  b.c_in = 8;  // channel mismatch
  model.push_back(b);
  AccelConfig cfg;
  CHECK_THROWS_AS(simulate_network(model, cfg, 1, true), ValidationError);
  // the same model without chaining synthesizes fresh masks and runs
  CHECK_NOTHROW(simulate_network(model, cfg, 1, false));
}

TEST_CASE("out-of-order cycles are non-increasing in lf on a conv layer") {
  LayerSpec l;
  l.kind = LayerKind::regular;
  l.h = 18;
  l.w = 18;
  l.c_in = 12;
  l.c_out = 8;
  l.k = 3;
  l.weight_density = 0.3;
  l.act_density = 0.35;
  LayerTensors t = gen_layer_tensors(l, 51, 0);
  int64_t prev = -1;
  for (int lf : {1, 3, 6, 9, 18, 27}) {
    AccelConfig cfg;
    cfg.core.lf = lf;
    cfg.core.tds = TdsVariant::out_of_order;
    LayerResult r = simulate_layer(l, t, cfg);
    if (prev >= 0) CHECK(r.stats.cycles <= prev);
    prev = r.stats.cycles;
  }
}

TEST_CASE("mobilenet-style kinds run end to end without error") {
  auto full = load_model(std::string(PHANTOM_MODELS_DIR) + "/mobilenet.json");
  // conv + depthwise + pointwise + fc subset keeps the smoke test quick
  std::vector<LayerSpec> model = {full[0], full[1], full[2], full.back()};
  AccelConfig cfg;
  cfg.core.lf = 6;
  cfg.filter_fraction = 0.1;
  apply_balance(cfg, BalanceMode::full);
  NetworkResult net = simulate_network(model, cfg, 61, false);
  CHECK(net.per_layer.size() == 4);
  for (const auto& st : net.per_layer) {
    CHECK(st.cycles > 0);
    CHECK(st.utilization >= 0.0);
    CHECK(st.utilization <= 1.0);
    CHECK(st.speedup_vs_dense > 0.0);
  }
}
