#pragma once

#include <string>
#include <vector>

#include "phantom/layer.hpp"

namespace phantom {

// Model file: {"name": ..., "layers": [{kind, H, W, C_in, C_out, K, stride,
// weight_density, activation_density, no_relu?, name?}, ...]}. Shapes are the
// layers' own (pre-padded) input dims; chain compatibility is enforced only
// when a chained run asks for it.
std::vector<LayerSpec> load_model(const std::string& path);
std::vector<LayerSpec> parse_model(const std::string& json_text, const std::string& origin);

}  // namespace phantom
