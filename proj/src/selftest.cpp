#include "phantom/selftest.hpp"

#include <string>
#include <vector>

#include "phantom/accelerator.hpp"
#include "phantom/lam.hpp"
#include "phantom/mapper.hpp"
#include "phantom/oracle.hpp"
#include "phantom/sweep.hpp"
#include "phantom/synth.hpp"
#include "phantom/tds.hpp"

namespace phantom {

namespace {

LayerSpec random_small_layer(Rng& rng, int index) {
  LayerSpec l;
  l.name = "selftest" + std::to_string(index);
  switch (rng.below(5)) {
    case 0:
      l.kind = LayerKind::regular;
      l.stride = 1;
      break;
    case 1:
      l.kind = LayerKind::regular;
      l.stride = 2;
      break;
    case 2: l.kind = LayerKind::depthwise; break;
    case 3: l.kind = LayerKind::pointwise; break;
    default: l.kind = LayerKind::fc; break;
  }
  double wd = 0.2 + 0.8 * (rng.below(9) / 10.0);
  double ad = 0.2 + 0.8 * (rng.below(9) / 10.0);
  l.weight_density = wd;
  l.act_density = ad;
  switch (l.kind) {
    case LayerKind::regular:
      l.k = 3;
      l.h = 5 + static_cast<int>(rng.below(10));
      l.w = 5 + static_cast<int>(rng.below(10));
      l.c_in = 1 + static_cast<int>(rng.below(5));
      l.c_out = 1 + static_cast<int>(rng.below(6));
      break;
    case LayerKind::depthwise:
      l.k = 3;
      l.h = 5 + static_cast<int>(rng.below(10));
      l.w = 5 + static_cast<int>(rng.below(10));
      l.c_in = l.c_out = 1 + static_cast<int>(rng.below(6));
      break;
    case LayerKind::pointwise:
      l.k = 1;
      l.h = 2 + static_cast<int>(rng.below(6));
      l.w = 2 + static_cast<int>(rng.below(6));
      l.c_in = 1 + static_cast<int>(rng.below(36));
      l.c_out = 1 + static_cast<int>(rng.below(8));
      break;
    case LayerKind::fc:
      l.k = 1;
      l.h = l.w = 1;
      l.c_in = 1 + static_cast<int>(rng.below(36));
      l.c_out = 1 + static_cast<int>(rng.below(16));
      break;
  }
  l.no_relu = rng.below(4) == 0;
  return l;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int fails = 0;
  auto check = [&](bool ok, const std::string& what) {
    out << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++fails;
  };

  // oracle equivalence on seeded random layers, both TDS variants
  Rng rng(20240901);
  int equal = 0, total = 0;
  for (int i = 0; i < 24; ++i) {
    LayerSpec layer = random_small_layer(rng, i);
    LayerTensors t = gen_layer_tensors(layer, 77 + i, i);
    AccelConfig cfg;
    cfg.core.lf = 1 + static_cast<int>(rng.below(27));
    cfg.core.tds = (i % 2 == 0) ? TdsVariant::out_of_order : TdsVariant::in_order;
    apply_balance(cfg, static_cast<BalanceMode>(rng.below(4)));
    LayerResult r = simulate_layer(layer, t, cfg);
    auto ref = oracle::layer_reference(layer, t);
    auto got = decode(r.output);
    ++total;
    bool same = got.size() == ref.values.size();
    if (same)
      for (std::size_t j = 0; j < got.size(); ++j)
        if (got[j] != ref.values[j]) {
          same = false;
          break;
        }
    int64_t macs = oracle::count_layer_valid_macs(layer, t.weights, t.activations);
    if (same && r.stats.valid_macs == macs) ++equal;
  }
  check(equal == total, "oracle equivalence on " + std::to_string(total) +
                            " random layers (" + std::to_string(equal) + " exact)");

  // selection golden case
  CoreConfig core;
  auto io = tds_select_in_order({0b011, 0b011, 0b010}, core);
  auto oo = tds_select_out_of_order({0b011, 0b011, 0b010}, core);
  check(io.compute_cycles() == 2 && oo.compute_cycles() == 2 &&
            oo.iterations[0].size() == 2,
        "selector golden case [011 011 010]");

  // skewed-lane balancing golden case
  LamBlock block;
  block.lanes = 3;
  block.slots = 3;
  block.reduced = {1, 1, 1};
  block.groups = {7, 0, 0, 7, 0, 0, 7, 0, 0};
  CoreConfig balanced = core;
  balanced.intra_balance = true;
  auto [rot_block, sched] = intra_balance(block, balanced);
  check(window_selection_cycles(block, core) == 3 &&
            window_selection_cycles(rot_block, balanced) == 1,
        "intra-core balancing golden case (3 cycles -> 1)");

  // mapper pattern count
  check(mapper_pattern_count(9, 3) == 130, "mapper stores 130 map patterns");

  // determinism of the sweep report
  std::vector<LayerSpec> model;
  LayerSpec l;
  l.name = "c1";
  l.kind = LayerKind::regular;
  l.h = 9;
  l.w = 9;
  l.c_in = 4;
  l.c_out = 8;
  l.weight_density = 0.4;
  l.act_density = 0.5;
  model.push_back(l);
  SweepSpec sweep;
  sweep.lf_values = {3, 6};
  sweep.tds_variants = {TdsVariant::out_of_order};
  sweep.balancing = {BalanceMode::none, BalanceMode::full};
  sweep.densities = {{0.4, 0.5}};
  sweep.seed = 11;
  AccelConfig cfg;
  std::string a = run_sweep(model, sweep, cfg, 1);
  std::string b = run_sweep(model, sweep, cfg, 4);
  check(a == b && !a.empty(), "sweep report byte-identical under parallel run");

  out << (fails == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return fails;
}

}  // namespace phantom
