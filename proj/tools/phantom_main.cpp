#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "phantom/accelerator.hpp"
#include "phantom/model.hpp"
#include "phantom/selftest.hpp"
#include "phantom/sweep.hpp"

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw phantom::ValidationError("cannot open for writing: " + path);
  f << text;
  if (!f) throw phantom::ValidationError("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phantom: cycle-level simulator for the Phantom sparse-CNN core grid"};
  app.require_subcommand(1);

  std::string model_path, out_path, sweep_path;
  int lf = 6;
  std::string tds = "ooo";
  std::string balance = "full";
  bool chain = false;
  uint64_t seed = 0;
  int rows = 7, cols = 4;
  double filter_fraction = 1.0;
  int jobs = 1;
  uint32_t index_bits = 8, offset_bits = 16;

  auto* run = app.add_subcommand("run", "simulate a model at one configuration");
  run->add_option("--model", model_path, "model JSON file")->required();
  run->add_option("--lf", lf, "lookahead factor (1..27)");
  run->add_option("--tds", tds, "selector variant: io | ooo");
  run->add_option("--balance", balance, "balancing: none | intra | inter | full");
  run->add_flag("--chain", chain, "chain activation masks through the layers");
  run->add_option("--seed", seed, "mask synthesis seed");
  run->add_option("--rows", rows, "grid rows");
  run->add_option("--cols", cols, "grid columns");
  run->add_option("--filter-fraction", filter_fraction,
                  "fraction of channel filters to simulate (regular/depthwise)");
  run->add_option("--out", out_path, "output CSV ('-' for stdout)");

  auto* sweep = app.add_subcommand("sweep", "run an experiment sweep");
  sweep->add_option("--model", model_path, "model JSON file")->required();
  sweep->add_option("--spec", sweep_path, "sweep JSON file")->required();
  sweep->add_option("--rows", rows, "grid rows");
  sweep->add_option("--cols", cols, "grid columns");
  sweep->add_option("--filter-fraction", filter_fraction,
                    "fraction of channel filters to simulate (regular/depthwise)");
  sweep->add_option("--jobs", jobs, "worker threads");
  sweep->add_option("--out", out_path, "output CSV ('-' for stdout)");

  auto* memcmp_cmd = app.add_subcommand("memcmp", "mask vs CSC metadata accounting");
  memcmp_cmd->add_option("--model", model_path, "model JSON file")->required();
  memcmp_cmd->add_option("--index-bits", index_bits, "CSC row index width");
  memcmp_cmd->add_option("--offset-bits", offset_bits, "CSC column offset width");
  memcmp_cmd->add_option("--out", out_path, "output CSV ('-' for stdout)");

  auto* selftest = app.add_subcommand("selftest", "run the built-in checks");
  (void)selftest;

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      auto model = phantom::load_model(model_path);
      phantom::AccelConfig cfg;
      cfg.rows = rows;
      cfg.cols = cols;
      cfg.core.lf = lf;
      cfg.core.tds = phantom::tds_variant_from_string(tds);
      cfg.filter_fraction = filter_fraction;
      phantom::apply_balance(cfg, phantom::balance_mode_from_string(balance));
      cfg.validate();
      write_output(out_path, phantom::run_report_csv(model, cfg, seed, chain));
    } else if (app.got_subcommand("sweep")) {
      auto model = phantom::load_model(model_path);
      auto spec = phantom::load_sweep(sweep_path);
      phantom::AccelConfig cfg;
      cfg.rows = rows;
      cfg.cols = cols;
      cfg.filter_fraction = filter_fraction;
      cfg.validate();
      write_output(out_path, phantom::run_sweep(model, spec, cfg, jobs));
    } else if (app.got_subcommand("memcmp")) {
      auto model = phantom::load_model(model_path);
      write_output(out_path, phantom::memcmp_report_csv(model, index_bits, offset_bits));
    } else if (app.got_subcommand("selftest")) {
      if (phantom::run_selftest(std::cout) != 0) return 1;
    }
  } catch (const phantom::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const phantom::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
