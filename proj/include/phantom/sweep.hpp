#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phantom/accelerator.hpp"
#include "phantom/layer.hpp"

namespace phantom {

enum class BalanceMode { none, intra, inter, full };

const char* to_string(BalanceMode m);
BalanceMode balance_mode_from_string(const std::string& s);
void apply_balance(AccelConfig& cfg, BalanceMode m);

const char* to_string(TdsVariant v);
TdsVariant tds_variant_from_string(const std::string& s);

// Experiment axes. Densities are (weight, activation) pairs overriding the
// model's stated densities point by point.
struct SweepSpec {
  std::vector<int> lf_values;
  std::vector<TdsVariant> tds_variants;
  std::vector<BalanceMode> balancing;
  std::vector<std::pair<double, double>> densities;
  uint64_t seed = 0;

  void validate() const;
};

SweepSpec parse_sweep(const std::string& json_text, const std::string& origin);
SweepSpec load_sweep(const std::string& path);

// One row per layer: layer,kind,cycles,dense_cycles,valid_macs,mac_slots,
// utilization,speedup. Masks are synthesized from (seed, layer, role), so a
// fixed seed gives byte-identical output.
std::string run_report_csv(const std::vector<LayerSpec>& model, const AccelConfig& cfg,
                           uint64_t seed, bool chain);

// One row per (density x lf x tds x balancing x layer), sweep coordinates
// prepended. Points are independent; `jobs` workers may run them
// concurrently; rows are assembled in canonical order so parallelism never
// changes bytes.
std::string run_sweep(const std::vector<LayerSpec>& model, const SweepSpec& sweep,
                      const AccelConfig& base_cfg, int jobs = 1);

// Mask-vs-CSC location-metadata accounting for the model's volume-shaped
// activation tensors (closed form from the stated densities).
std::string memcmp_report_csv(const std::vector<LayerSpec>& model, uint32_t index_bits,
                              uint32_t offset_bits);

}  // namespace phantom
