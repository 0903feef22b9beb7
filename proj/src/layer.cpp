#include "phantom/layer.hpp"

namespace phantom {

const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::regular: return "regular";
    case LayerKind::depthwise: return "depthwise";
    case LayerKind::pointwise: return "pointwise";
    case LayerKind::fc: return "fc";
  }
  return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "regular") return LayerKind::regular;
  if (s == "depthwise") return LayerKind::depthwise;
  if (s == "pointwise") return LayerKind::pointwise;
  if (s == "fc") return LayerKind::fc;
  throw ValidationError("unknown layer kind: " + s);
}

int LayerSpec::out_h() const {
  switch (kind) {
    case LayerKind::regular:
    case LayerKind::depthwise: return (h - k) / stride + 1;
    case LayerKind::pointwise: return h;
    case LayerKind::fc: return 1;
  }
  return 0;
}

int LayerSpec::out_w() const {
  switch (kind) {
    case LayerKind::regular:
    case LayerKind::depthwise: return (w - k) / stride + 1;
    case LayerKind::pointwise: return w;
    case LayerKind::fc: return 1;
  }
  return 0;
}

void LayerSpec::validate() const {
  if (h < 1 || w < 1 || c_in < 1 || c_out < 1)
    throw ValidationError("layer " + name + ": extents must be positive");
  if (stride < 1) throw ValidationError("layer " + name + ": stride must be >= 1");
  switch (kind) {
    case LayerKind::regular:
    case LayerKind::depthwise:
      if (k < 1) throw ValidationError("layer " + name + ": kernel must be positive");
      if (h < k || w < k)
        throw ValidationError("layer " + name + ": input smaller than kernel");
      if (kind == LayerKind::depthwise && c_out != c_in)
        throw ValidationError("layer " + name + ": depthwise needs c_out == c_in");
      break;
    case LayerKind::pointwise:
      if (k != 1) throw ValidationError("layer " + name + ": pointwise needs k == 1");
      break;
    case LayerKind::fc:
      if (h != 1 || w != 1)
        throw ValidationError("layer " + name + ": fc needs spatial extents 1");
      break;
  }
  if (out_h() < 1 || out_w() < 1)
    throw ValidationError("layer " + name + ": zero-sized output");
}

}  // namespace phantom
