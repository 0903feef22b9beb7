#include "phantom/oracle.hpp"

namespace phantom::oracle {

DenseTensor relu(DenseTensor t) {
  for (auto& v : t.values)
    if (v < 0) v = 0;
  return t;
}

namespace {

void check_rank(const DenseTensor& t, std::size_t rank, const char* what) {
  if (t.shape.size() != rank)
    throw ValidationError(std::string(what) + ": wrong rank");
}

}  // namespace

DenseTensor dense_conv(const DenseTensor& input, const std::vector<DenseTensor>& filters,
                       int stride, LayerKind mode) {
  check_rank(input, 3, "dense_conv input");
  const int h = static_cast<int>(input.shape[0]);
  const int w = static_cast<int>(input.shape[1]);
  const int c = static_cast<int>(input.shape[2]);
  if (filters.empty()) throw ValidationError("dense_conv: no filters");
  DenseTensor out;

  if (mode == LayerKind::pointwise) {
    const int f_cnt = static_cast<int>(filters.size());
    for (const auto& f : filters) {
      check_rank(f, 1, "pointwise filter");
      if (static_cast<int>(f.shape[0]) != c)
        throw ValidationError("dense_conv: filter length != channel count");
    }
    out.shape = {static_cast<uint32_t>(h), static_cast<uint32_t>(w),
                 static_cast<uint32_t>(f_cnt)};
    out.values.assign(out.total_elems(), 0);
    for (int x = 0; x < w; ++x)
      for (int y = 0; y < h; ++y)
        for (int f = 0; f < f_cnt; ++f) {
          int32_t acc = 0;
          for (int ch = 0; ch < c; ++ch)
            acc += input.at(y, x, ch) * filters[f].values[ch];
          out.values[linear_index(out.shape, y, x, f)] = acc;
        }
    return out;
  }

  const bool dw = (mode == LayerKind::depthwise);
  const int k = static_cast<int>(filters[0].shape[0]);
  const int h_out = (h - k) / stride + 1;
  const int w_out = (w - k) / stride + 1;
  if (h < k || w < k) throw ValidationError("dense_conv: input smaller than kernel");
  if (dw && static_cast<int>(filters.size()) != c)
    throw ValidationError("dense_conv: depthwise needs one filter per channel");
  const int f_cnt = static_cast<int>(filters.size());
  out.shape = {static_cast<uint32_t>(h_out), static_cast<uint32_t>(w_out),
               static_cast<uint32_t>(f_cnt)};
  out.values.assign(out.total_elems(), 0);
  for (int f = 0; f < f_cnt; ++f) {
    const DenseTensor& flt = filters[f];
    if (static_cast<int>(flt.shape[0]) != k || static_cast<int>(flt.shape[1]) != k)
      throw ValidationError("dense_conv: ragged kernel sizes");
    if (!dw) {
      check_rank(flt, 3, "regular filter");
      if (static_cast<int>(flt.shape[2]) != c)
        throw ValidationError("dense_conv: filter channels != input channels");
    }
    for (int oy = 0; oy < h_out; ++oy)
      for (int ox = 0; ox < w_out; ++ox) {
        int32_t acc = 0;
        if (dw) {
          for (int r = 0; r < k; ++r)
            for (int s = 0; s < k; ++s)
              acc += flt.at(r, s) * input.at(oy * stride + r, ox * stride + s, f);
        } else {
          for (int ch = 0; ch < c; ++ch)
            for (int r = 0; r < k; ++r)
              for (int s = 0; s < k; ++s)
                acc += flt.at(r, s, ch) * input.at(oy * stride + r, ox * stride + s, ch);
        }
        out.values[linear_index(out.shape, oy, ox, f)] = acc;
      }
  }
  return out;
}

DenseTensor dense_fc(const DenseTensor& input, const DenseTensor& weights) {
  check_rank(input, 1, "dense_fc input");
  check_rank(weights, 2, "dense_fc weights");
  const int in_len = static_cast<int>(input.shape[0]);
  if (static_cast<int>(weights.shape[0]) != in_len)
    throw ValidationError("dense_fc: weight rows != input length");
  const int out_len = static_cast<int>(weights.shape[1]);
  DenseTensor out;
  out.shape = {static_cast<uint32_t>(out_len)};
  out.values.assign(out_len, 0);
  for (int n = 0; n < out_len; ++n) {
    int32_t acc = 0;
    for (int i = 0; i < in_len; ++i) acc += input.values[i] * weights.at(i, n);
    out.values[n] = acc;
  }
  return out;
}

int64_t count_valid_macs(const SparseTensor& wmask, const SparseTensor& amask,
                         int stride) {
  if (wmask.shape.size() != 2 || amask.shape.size() != 2)
    throw ValidationError("count_valid_macs: expects matrix masks");
  const int k = static_cast<int>(wmask.shape[0]);
  if (static_cast<int>(wmask.shape[1]) != k)
    throw ValidationError("count_valid_macs: kernel must be square");
  const int h = static_cast<int>(amask.shape[0]);
  const int w = static_cast<int>(amask.shape[1]);
  if (h < k || w < k) throw ValidationError("count_valid_macs: window larger than input");
  const int h_out = (h - k) / stride + 1;
  const int w_out = (w - k) / stride + 1;
  int64_t n = 0;
  for (int oy = 0; oy < h_out; ++oy)
    for (int ox = 0; ox < w_out; ++ox)
      for (int r = 0; r < k; ++r)
        for (int s = 0; s < k; ++s)
          if (wmask.bit(linear_index(wmask.shape, r, s, 0)) &&
              amask.bit(linear_index(amask.shape, oy * stride + r, ox * stride + s, 0)))
            ++n;
  return n;
}

int64_t count_layer_valid_macs(const LayerSpec& layer,
                               const std::vector<SparseTensor>& weights,
                               const SparseTensor& acts,
                               const std::vector<int>& filter_subset) {
  layer.validate();
  std::vector<int> subset = filter_subset;
  if (subset.empty()) {
    int n = (layer.kind == LayerKind::fc) ? layer.c_out : layer.out_c();
    for (int i = 0; i < n; ++i) subset.push_back(i);
  }
  int64_t n = 0;
  switch (layer.kind) {
    case LayerKind::regular: {
      for (int f : subset) {
        const SparseTensor& wm = weights[static_cast<std::size_t>(f)];
        for (int oy = 0; oy < layer.out_h(); ++oy)
          for (int ox = 0; ox < layer.out_w(); ++ox)
            for (int ch = 0; ch < layer.c_in; ++ch)
              for (int r = 0; r < layer.k; ++r)
                for (int s = 0; s < layer.k; ++s)
                  if (wm.bit(linear_index(wm.shape, r, s, ch)) &&
                      acts.bit(linear_index(acts.shape, oy * layer.stride + r,
                                            ox * layer.stride + s, ch)))
                    ++n;
      }
      break;
    }
    case LayerKind::depthwise: {
      for (int ch : subset) {
        const SparseTensor& wm = weights[static_cast<std::size_t>(ch)];
        for (int oy = 0; oy < layer.out_h(); ++oy)
          for (int ox = 0; ox < layer.out_w(); ++ox)
            for (int r = 0; r < layer.k; ++r)
              for (int s = 0; s < layer.k; ++s)
                if (wm.bit(linear_index(wm.shape, r, s, 0)) &&
                    acts.bit(linear_index(acts.shape, oy * layer.stride + r,
                                          ox * layer.stride + s, ch)))
                  ++n;
      }
      break;
    }
    case LayerKind::pointwise: {
      for (int f : subset) {
        const SparseTensor& wm = weights[static_cast<std::size_t>(f)];
        for (int y = 0; y < layer.h; ++y)
          for (int x = 0; x < layer.w; ++x)
            for (int ch = 0; ch < layer.c_in; ++ch)
              if (wm.bit(ch) && acts.bit(linear_index(acts.shape, y, x, ch))) ++n;
      }
      break;
    }
    case LayerKind::fc: {
      for (int neuron : subset) {
        const SparseTensor& wm = weights[static_cast<std::size_t>(neuron)];
        for (int i = 0; i < layer.c_in; ++i)
          if (wm.bit(i) && acts.bit(i)) ++n;
      }
      break;
    }
  }
  return n;
}

DenseTensor layer_reference(const LayerSpec& layer, const LayerTensors& tensors,
                            const std::vector<int>& filter_subset) {
  layer.validate();
  std::vector<int> subset = filter_subset;
  if (subset.empty())
    for (int i = 0; i < layer.c_out; ++i) subset.push_back(i);

  DenseTensor out;
  if (layer.kind == LayerKind::fc) {
    DenseTensor in = to_dense(tensors.activations);
    out.shape = {static_cast<uint32_t>(layer.c_out)};
    out.values.assign(layer.c_out, 0);
    for (int n : subset) {
      auto wrow = decode(tensors.weights[static_cast<std::size_t>(n)]);
      int32_t acc = 0;
      for (int i = 0; i < layer.c_in; ++i) acc += in.values[i] * wrow[i];
      out.values[n] = acc;
    }
  } else {
    DenseTensor in = to_dense(tensors.activations);
    std::vector<DenseTensor> filters;
    filters.reserve(subset.size());
    for (int f : subset) filters.push_back(to_dense(tensors.weights[static_cast<std::size_t>(f)]));
    DenseTensor sub = dense_conv(in, filters, layer.stride, layer.kind);
    // re-embed the subset planes into the full output channel extent
    out.shape = {sub.shape[0], sub.shape[1], static_cast<uint32_t>(layer.out_c())};
    out.values.assign(out.total_elems(), 0);
    for (std::size_t i = 0; i < subset.size(); ++i)
      for (uint32_t y = 0; y < sub.shape[0]; ++y)
        for (uint32_t x = 0; x < sub.shape[1]; ++x)
          out.values[linear_index(out.shape, y, x, static_cast<std::size_t>(subset[i]))] =
              sub.at(y, x, i);
  }
  return layer.no_relu ? out : relu(out);
}

}  // namespace phantom::oracle
