#include "phantom/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "phantom/metadata.hpp"
#include "phantom/synth.hpp"

namespace phantom {

const char* to_string(BalanceMode m) {
  switch (m) {
    case BalanceMode::none: return "none";
    case BalanceMode::intra: return "intra";
    case BalanceMode::inter: return "inter";
    case BalanceMode::full: return "full";
  }
  return "?";
}

BalanceMode balance_mode_from_string(const std::string& s) {
  if (s == "none" || s == "unbalanced") return BalanceMode::none;
  if (s == "intra" || s == "intra_core") return BalanceMode::intra;
  if (s == "inter" || s == "inter_core") return BalanceMode::inter;
  if (s == "full") return BalanceMode::full;
  throw ValidationError("unknown balancing mode: " + s);
}

void apply_balance(AccelConfig& cfg, BalanceMode m) {
  cfg.core.intra_balance = (m == BalanceMode::intra || m == BalanceMode::full);
  cfg.inter_balance = (m == BalanceMode::inter || m == BalanceMode::full);
}

const char* to_string(TdsVariant v) {
  return v == TdsVariant::in_order ? "io" : "ooo";
}

TdsVariant tds_variant_from_string(const std::string& s) {
  if (s == "io" || s == "in_order") return TdsVariant::in_order;
  if (s == "ooo" || s == "out_of_order") return TdsVariant::out_of_order;
  throw ValidationError("unknown TDS variant: " + s);
}

void SweepSpec::validate() const {
  if (lf_values.empty() || tds_variants.empty() || balancing.empty() || densities.empty())
    throw ValidationError("sweep: every axis needs at least one value");
  for (int lf : lf_values)
    if (lf < 1 || lf > 27) throw ValidationError("sweep: lf values must be in [1, 27]");
  for (auto [wd, ad] : densities)
    if (wd <= 0.0 || wd > 1.0 || ad <= 0.0 || ad > 1.0)
      throw ValidationError("sweep: densities must be in (0, 1]");
}

SweepSpec parse_sweep(const std::string& json_text, const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError(origin + ": expected an object");
  SweepSpec spec;
  if (!j.contains("lf_values") || !j["lf_values"].is_array())
    throw ValidationError(origin + ": missing 'lf_values' array");
  for (const auto& v : j["lf_values"]) spec.lf_values.push_back(v.get<int>());
  if (!j.contains("tds_variants") || !j["tds_variants"].is_array())
    throw ValidationError(origin + ": missing 'tds_variants' array");
  for (const auto& v : j["tds_variants"])
    spec.tds_variants.push_back(tds_variant_from_string(v.get<std::string>()));
  if (!j.contains("balancing") || !j["balancing"].is_array())
    throw ValidationError(origin + ": missing 'balancing' array");
  for (const auto& v : j["balancing"])
    spec.balancing.push_back(balance_mode_from_string(v.get<std::string>()));
  if (!j.contains("densities") || !j["densities"].is_array())
    throw ValidationError(origin + ": missing 'densities' array");
  for (const auto& v : j["densities"]) {
    if (!v.is_array() || v.size() != 2)
      throw ValidationError(origin + ": each density entry is a [weight, activation] pair");
    spec.densities.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  spec.seed = j.value("seed", uint64_t{0});
  spec.validate();
  return spec;
}

SweepSpec load_sweep(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot open sweep file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_sweep(ss.str(), path);
}

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void append_stats(std::string& out, const LayerStats& st) {
  out += std::to_string(st.cycles);
  out += ',';
  out += std::to_string(st.dense_cycles);
  out += ',';
  out += std::to_string(st.valid_macs);
  out += ',';
  out += std::to_string(st.mac_slots);
  out += ',';
  out += fmt6(st.utilization);
  out += ',';
  out += fmt6(st.speedup_vs_dense);
  out += '\n';
}

}  // namespace

std::string run_report_csv(const std::vector<LayerSpec>& model, const AccelConfig& cfg,
                           uint64_t seed, bool chain) {
  NetworkResult net = simulate_network(model, cfg, seed, chain);
  std::string out = "layer,kind,cycles,dense_cycles,valid_macs,mac_slots,utilization,speedup\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    out += model[i].name;
    out += ',';
    out += to_string(model[i].kind);
    out += ',';
    append_stats(out, net.per_layer[i]);
  }
  out += "network,all,";
  append_stats(out, net.aggregate);
  return out;
}

std::string run_sweep(const std::vector<LayerSpec>& model, const SweepSpec& sweep,
                      const AccelConfig& base_cfg, int jobs) {
  sweep.validate();
  base_cfg.validate();
  if (model.empty()) throw ValidationError("model has no layers");
  if (jobs < 1) jobs = 1;

  struct Point {
    std::size_t di, li, ti, bi;
  };
  std::vector<Point> points;
  for (std::size_t di = 0; di < sweep.densities.size(); ++di)
    for (std::size_t li = 0; li < sweep.lf_values.size(); ++li)
      for (std::size_t ti = 0; ti < sweep.tds_variants.size(); ++ti)
        for (std::size_t bi = 0; bi < sweep.balancing.size(); ++bi)
          points.push_back({di, li, ti, bi});

  std::vector<std::string> blocks(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t pi = next.fetch_add(1);
      if (pi >= points.size()) return;
      const Point& pt = points[pi];
      try {
        auto [wd, ad] = sweep.densities[pt.di];
        std::vector<LayerSpec> swept = model;
        for (auto& l : swept) {
          l.weight_density = wd;
          l.act_density = ad;
        }
        AccelConfig cfg = base_cfg;
        cfg.core.lf = sweep.lf_values[pt.li];
        cfg.core.tds = sweep.tds_variants[pt.ti];
        apply_balance(cfg, sweep.balancing[pt.bi]);
        NetworkResult net = simulate_network(swept, cfg, sweep.seed, false);
        std::string block;
        for (std::size_t i = 0; i < swept.size(); ++i) {
          block += swept[i].name;
          block += ',';
          block += to_string(swept[i].kind);
          block += ',';
          block += std::to_string(cfg.core.lf);
          block += ',';
          block += to_string(cfg.core.tds);
          block += ',';
          block += to_string(sweep.balancing[pt.bi]);
          block += ',';
          block += fmt6(wd);
          block += ',';
          block += fmt6(ad);
          block += ',';
          append_stats(block, net.per_layer[i]);
        }
        blocks[pi] = std::move(block);
      } catch (const std::exception& e) {
        errors[pi] = e.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int n = std::min<std::size_t>(static_cast<std::size_t>(jobs), points.size());
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t pi = 0; pi < points.size(); ++pi)
    if (!errors[pi].empty()) throw ValidationError("sweep point failed: " + errors[pi]);

  std::string out =
      "layer,kind,lf,tds,balance,weight_density,act_density,cycles,dense_cycles,"
      "valid_macs,mac_slots,utilization,speedup\n";
  for (const auto& b : blocks) out += b;
  return out;
}

std::string memcmp_report_csv(const std::vector<LayerSpec>& model, uint32_t index_bits,
                              uint32_t offset_bits) {
  if (model.empty()) throw ValidationError("model has no layers");
  std::string out = "layer,kind,H,W,C_in,act_density,mask_bits,csc_bits,ratio\n";
  bool any = false;
  for (const auto& layer : model) {
    if (layer.kind == LayerKind::fc) continue;  // vector activations: no CSC columns
    auto shape = activation_shape(layer);
    uint64_t elems = 1;
    for (uint32_t d : shape) elems *= d;
    uint64_t nnz = static_cast<uint64_t>(
        std::llround(layer.act_density * static_cast<double>(elems)));
    MetadataAccount acc = metadata_access_bits(shape, nnz, index_bits, offset_bits);
    any = true;
    out += layer.name;
    out += ',';
    out += to_string(layer.kind);
    out += ',';
    out += std::to_string(layer.h);
    out += ',';
    out += std::to_string(layer.w);
    out += ',';
    out += std::to_string(layer.c_in);
    out += ',';
    out += fmt6(layer.act_density);
    out += ',';
    out += std::to_string(acc.mask_bits);
    out += ',';
    out += std::to_string(acc.csc_bits);
    out += ',';
    out += fmt6(acc.ratio);
    out += '\n';
  }
  if (!any)
    throw ValidationError("model has no volume-shaped activation tensors to account");
  return out;
}

}  // namespace phantom
