#include <doctest.h>

#include <cmath>
#include <sstream>

#include "phantom/model.hpp"
#include "phantom/selftest.hpp"
#include "phantom/sweep.hpp"
#include "phantom/synth.hpp"

using namespace phantom;

TEST_CASE("gen_mask_tensor: density 1.0 sets every bit") {
  auto t = gen_mask_tensor({10, 10}, 1.0, 5);
  CHECK(t.popcount() == 100);
  for (int8_t v : t.values) CHECK(v != 0);
}

TEST_CASE("gen_mask_tensor: empirical density within 0.01 at 1e5 elements") {
  for (double d : {0.2, 0.5, 0.8}) {
    auto t = gen_mask_tensor({100000}, d, 99);
    double got = static_cast<double>(t.nnz()) / 100000.0;
    CHECK(std::abs(got - d) <= 0.01);
  }
}

TEST_CASE("gen_mask_tensor: identical seeds give identical bytes") {
  auto a = gen_mask_tensor({9, 5, 4}, 0.4, 1234);
  auto b = gen_mask_tensor({9, 5, 4}, 0.4, 1234);
  CHECK(serialize_tensor(a) == serialize_tensor(b));
  auto c = gen_mask_tensor({9, 5, 4}, 0.4, 1235);
  CHECK(serialize_tensor(a) != serialize_tensor(c));
}

TEST_CASE("gen_mask_tensor values span both signs and never zero") {
  auto t = gen_mask_tensor({1000}, 0.9, 3);
  bool pos = false, neg = false;
  for (int8_t v : t.values) {
    CHECK(v != 0);
    CHECK(v >= -127);
    CHECK(v <= 127);
    pos |= v > 0;
    neg |= v < 0;
  }
  CHECK(pos);
  CHECK(neg);
}

TEST_CASE("model parsing") {
  const char* text = R"({
    "name": "tiny",
    "layers": [
      {"name": "c1", "kind": "regular", "H": 9, "W": 9, "C_in": 2, "C_out": 4,
       "K": 3, "stride": 1, "weight_density": 0.4, "activation_density": 0.5},
      {"name": "f1", "kind": "fc", "H": 1, "W": 1, "C_in": 196, "C_out": 10,
       "weight_density": 0.3, "activation_density": 0.5, "no_relu": true}
    ]})";
  auto model = parse_model(text, "tiny");
  REQUIRE(model.size() == 2);
  CHECK(model[0].kind == LayerKind::regular);
  CHECK(model[0].c_out == 4);
  CHECK(model[1].no_relu);
}

TEST_CASE("model parsing rejects bad input with context") {
  CHECK_THROWS_AS(parse_model("", "empty"), ValidationError);
  CHECK_THROWS_AS(parse_model("{}", "noprop"), ValidationError);
  CHECK_THROWS_AS(parse_model(R"({"layers": []})", "nolayers"), ValidationError);
  CHECK_THROWS_AS(
      parse_model(R"({"layers": [{"kind": "regular", "H": 2, "W": 9, "C_in": 1,
        "C_out": 1, "K": 3, "weight_density": 0.5, "activation_density": 0.5}]})",
                  "small"),
      ValidationError);
  try {
    parse_model(R"({"layers": [{"kind": "fc", "H": 1, "W": 1, "C_in": 10,
      "C_out": 0, "weight_density": 0.5, "activation_density": 0.5}]})",
                "badout");
    CHECK(false);
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("layer 0") != std::string::npos);
  }
}

TEST_CASE("bundled models load and validate") {
  auto vgg = load_model(std::string(PHANTOM_MODELS_DIR) + "/vgg16.json");
  CHECK(vgg.size() == 16);
  int convs = 0, fcs = 0;
  for (const auto& l : vgg) {
    if (l.kind == LayerKind::regular) ++convs;
    if (l.kind == LayerKind::fc) ++fcs;
    CHECK(l.weight_density == doctest::Approx(0.23));
    if (l.name != "conv1_1") CHECK(l.act_density == doctest::Approx(0.32));
  }
  CHECK(convs == 13);
  CHECK(fcs == 3);
  CHECK(vgg.back().no_relu);

  auto mob = load_model(std::string(PHANTOM_MODELS_DIR) + "/mobilenet.json");
  int dw = 0, pw = 0;
  for (const auto& l : mob) {
    if (l.kind == LayerKind::depthwise) ++dw;
    if (l.kind == LayerKind::pointwise) ++pw;
    CHECK(l.weight_density == doctest::Approx(0.27));
    if (l.name != "conv1") CHECK(l.act_density == doctest::Approx(0.36));
  }
  CHECK(dw == 13);
  CHECK(pw == 13);
  CHECK(mob.back().kind == LayerKind::fc);
}

TEST_CASE("sweep parsing and validation") {
  const char* text = R"({
    "lf_values": [3, 6],
    "tds_variants": ["io", "ooo"],
    "balancing": ["none", "full"],
    "densities": [[0.4, 0.5]],
    "seed": 7
  })";
  auto s = parse_sweep(text, "s");
  CHECK(s.lf_values == std::vector<int>{3, 6});
  CHECK(s.tds_variants.size() == 2);
  CHECK(s.balancing.size() == 2);
  CHECK(s.seed == 7);
  CHECK_THROWS_AS(parse_sweep(R"({"lf_values": []})", "bad"), ValidationError);
  CHECK_THROWS_AS(parse_sweep(R"({"lf_values": [99], "tds_variants": ["ooo"],
    "balancing": ["full"], "densities": [[0.5, 0.5]]})", "bad"),
                  ValidationError);
}

namespace {

std::vector<LayerSpec> tiny_model() {
  std::vector<LayerSpec> model;
  LayerSpec l;
  l.name = "c1";
  l.kind = LayerKind::regular;
  l.h = 9;
  l.w = 9;
  l.c_in = 3;
  l.c_out = 6;
  l.k = 3;
  l.weight_density = 0.4;
  l.act_density = 0.5;
  model.push_back(l);
  LayerSpec p;
  p.name = "p1";
  p.kind = LayerKind::pointwise;
  p.k = 1;
  p.h = 7;
  p.w = 7;
  p.c_in = 6;
  p.c_out = 4;
  p.weight_density = 0.4;
  p.act_density = 0.5;
  model.push_back(p);
  return model;
}

}  // namespace

TEST_CASE("run_report_csv emits one row per layer plus the network row") {
  auto model = tiny_model();
  AccelConfig cfg;
  auto csv = run_report_csv(model, cfg, 5, false);
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line ==
        "layer,kind,cycles,dense_cycles,valid_macs,mac_slots,utilization,speedup");
  int rows = 0;
  while (std::getline(ss, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}

TEST_CASE("sweep: singleton sweep equals simulate_network") {
  auto model = tiny_model();
  SweepSpec sweep;
  sweep.lf_values = {6};
  sweep.tds_variants = {TdsVariant::out_of_order};
  sweep.balancing = {BalanceMode::full};
  sweep.densities = {{0.4, 0.5}};
  sweep.seed = 17;
  AccelConfig cfg;
  auto csv = run_sweep(model, sweep, cfg, 1);

  AccelConfig direct = cfg;
  direct.core.lf = 6;
  apply_balance(direct, BalanceMode::full);
  auto net = simulate_network(model, direct, 17, false);
  // the first data row carries layer c1's cycle count
  std::istringstream ss(csv);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  CHECK(row.find("c1,regular,6,ooo,full,") == 0);
  CHECK(row.find("," + std::to_string(net.per_layer[0].cycles) + ",") != std::string::npos);
}

TEST_CASE("sweep: byte-identical across runs and worker counts") {
  auto model = tiny_model();
  SweepSpec sweep;
  sweep.lf_values = {3, 6};
  sweep.tds_variants = {TdsVariant::in_order, TdsVariant::out_of_order};
  sweep.balancing = {BalanceMode::none, BalanceMode::full};
  sweep.densities = {{0.4, 0.5}, {0.8, 0.8}};
  sweep.seed = 23;
  AccelConfig cfg;
  auto a = run_sweep(model, sweep, cfg, 1);
  auto b = run_sweep(model, sweep, cfg, 1);
  auto c = run_sweep(model, sweep, cfg, 7);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("sweep rows: utilization and speedup recompute from their columns") {
  auto model = tiny_model();
  SweepSpec sweep;
  sweep.lf_values = {6};
  sweep.tds_variants = {TdsVariant::out_of_order};
  sweep.balancing = {BalanceMode::none, BalanceMode::full};
  sweep.densities = {{0.5, 0.5}};
  sweep.seed = 29;
  AccelConfig cfg;
  auto csv = run_sweep(model, sweep, cfg, 1);
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);  // header
  int checked = 0;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 13);
    double cycles = std::stod(cells[7]);
    double dense = std::stod(cells[8]);
    double macs = std::stod(cells[9]);
    double slots = std::stod(cells[10]);
    double util = std::stod(cells[11]);
    double speedup = std::stod(cells[12]);
    CHECK(util == doctest::Approx(slots > 0 ? macs / slots : 0.0).epsilon(1e-4));
    CHECK(speedup == doctest::Approx(dense / cycles).epsilon(1e-4));
    CHECK(util >= 0.0);
    CHECK(util <= 1.0);
    ++checked;
  }
  CHECK(checked == 4);
}

TEST_CASE("sweep: full balancing never exceeds unbalanced cycles on any row") {
  auto model = tiny_model();
  SweepSpec sweep;
  sweep.lf_values = {3, 9};
  sweep.tds_variants = {TdsVariant::out_of_order};
  sweep.balancing = {BalanceMode::none, BalanceMode::full};
  sweep.densities = {{0.4, 0.4}};
  sweep.seed = 31;
  AccelConfig cfg;
  auto csv = run_sweep(model, sweep, cfg, 1);
  // rows come in canonical order: for each lf, balance none then full
  std::istringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  REQUIRE(rows.size() == 8);  // 2 lf x 2 balance x 2 layers
  for (std::size_t i = 0; i < rows.size(); i += 4) {
    // none rows then full rows for the same lf
    for (int layer = 0; layer < 2; ++layer) {
      int64_t none_cycles = std::stoll(rows[i + static_cast<std::size_t>(layer)][7]);
      int64_t full_cycles = std::stoll(rows[i + 2 + static_cast<std::size_t>(layer)][7]);
      CHECK(full_cycles <= none_cycles);
    }
  }
}

TEST_CASE("memcmp report covers the volume layers only") {
  auto model = tiny_model();
  LayerSpec fc;
  fc.name = "f";
  fc.kind = LayerKind::fc;
  fc.k = 1;
  fc.h = fc.w = 1;
  fc.c_in = 100;
  fc.c_out = 10;
  fc.weight_density = 0.5;
  fc.act_density = 0.5;
  model.push_back(fc);
  auto csv = memcmp_report_csv(model, 8, 16);
  CHECK(csv.find("c1,") != std::string::npos);
  CHECK(csv.find("p1,") != std::string::npos);
  CHECK(csv.find("f,") == std::string::npos);
}

TEST_CASE("selftest passes") {
  std::ostringstream out;
  CHECK(run_selftest(out) == 0);
}
