/* Copyright 2026 The Bitstorm Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "bitstorm/layers.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "bitstorm/errors.h"

namespace bitstorm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::array<std::string_view, 8> kLayerKindNames = {
    "Conv2D", "MaxPool2D", "Dense", "ReLU",
    "PReLU",  "Softmax",   "Flatten", "Dropout"};

[[noreturn]] void ShapeError(const LayerSpec& layer, const Shape& input,
                             const std::string& detail) {
  throw ValidationError("layer '" + layer.name + "' (" +
                        std::string(LayerKindName(layer.kind())) +
                        "): input shape " + ShapeToString(input) + " " +
                        detail);
}

// Max that lets NaN win so corrupted values are never repaired by a
// comparison.
inline float PropagatingMax(float a, float b) {
  if (std::isnan(a)) return a;
  if (std::isnan(b)) return b;
  return b > a ? b : a;
}

inline float ReluValue(float x) {
  if (std::isnan(x)) return x;
  return x > 0.0f ? x : 0.0f;
}

std::size_t ConvOutExtent(std::size_t in, std::size_t k, std::size_t stride,
                          Padding padding) {
  if (padding == Padding::kSame) return (in + stride - 1) / stride;
  if (in < k) return 0;
  return (in - k) / stride + 1;
}

std::size_t PadBefore(std::size_t in, std::size_t out, std::size_t k,
                      std::size_t stride, Padding padding) {
  if (padding == Padding::kValid) return 0;
  std::size_t needed = (out - 1) * stride + k;
  std::size_t total = needed > in ? needed - in : 0;
  return total / 2;
}

Tensor ApplyActivation(Activation activation, Tensor t) {
  switch (activation) {
    case Activation::kLinear:
      return t;
    case Activation::kReLU:
      return Relu(t);
    case Activation::kSoftmax:
      return Softmax(t);
  }
  return t;
}

template <class Fn>
Tensor Elementwise(const Tensor& lhs, const Tensor& rhs, Fn fn,
                   const char* what) {
  if (lhs.shape() != rhs.shape()) {
    throw ValidationError(std::string(what) + ": shape mismatch " +
                          ShapeToString(lhs.shape()) + " vs " +
                          ShapeToString(rhs.shape()));
  }
  Tensor out(lhs.shape());
  for (std::size_t i = 0; i < lhs.size(); ++i) out[i] = fn(lhs[i], rhs[i]);
  return out;
}

// Materializes `from` broadcast to `to`.
Tensor BroadcastTo(const Tensor& from, const Shape& to) {
  if (from.shape() == to) return from;
  if (!Broadcastable(from.shape(), to)) {
    throw ValidationError("cannot broadcast " + ShapeToString(from.shape()) +
                          " to " + ShapeToString(to));
  }
  const std::size_t rank = to.size();
  const std::size_t offset = rank - from.rank();
  // Source stride per output axis; zero on broadcast axes.
  std::vector<std::size_t> src_stride(rank, 0);
  std::size_t stride = 1;
  for (std::size_t a = from.rank(); a-- > 0;) {
    src_stride[a + offset] = from.shape()[a] == 1 ? 0 : stride;
    stride *= from.shape()[a];
  }
  Tensor out(to);
  std::vector<std::size_t> idx(rank, 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < rank; ++a) src += idx[a] * src_stride[a];
    out[flat] = from[src];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < to[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace

std::string_view LayerKindName(LayerKind kind) {
  return kLayerKindNames[static_cast<std::size_t>(kind)];
}

LayerKind ParseLayerKind(std::string_view name) {
  for (std::size_t i = 0; i < kLayerKindNames.size(); ++i) {
    if (kLayerKindNames[i] == name) return static_cast<LayerKind>(i);
  }
  throw ValidationError("unknown layer kind '" + std::string(name) + "'");
}

std::string_view PaddingName(Padding padding) {
  return padding == Padding::kSame ? "same" : "valid";
}

Padding ParsePadding(std::string_view name) {
  if (name == "valid") return Padding::kValid;
  if (name == "same") return Padding::kSame;
  throw ValidationError("unknown padding '" + std::string(name) + "'");
}

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kLinear:
      return "linear";
    case Activation::kReLU:
      return "relu";
    case Activation::kSoftmax:
      return "softmax";
  }
  return "linear";
}

Activation ParseActivation(std::string_view name) {
  if (name == "linear") return Activation::kLinear;
  if (name == "relu") return Activation::kReLU;
  if (name == "softmax") return Activation::kSoftmax;
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

LayerKind LayerSpec::kind() const {
  return static_cast<LayerKind>(params.index());
}

bool Broadcastable(const Shape& from, const Shape& to) {
  if (from.empty() || from.size() > to.size()) return false;
  const std::size_t offset = to.size() - from.size();
  for (std::size_t a = 0; a < from.size(); ++a) {
    if (from[a] != 1 && from[a] != to[a + offset]) return false;
  }
  return true;
}

Shape OutputShape(const LayerSpec& layer, const Shape& input) {
  return std::visit(
      Overloaded{
          [&](const Conv2DParams& p) -> Shape {
            const Shape& k = p.kernel.shape();
            if (k.size() != 4) {
              ShapeError(layer, input, "kernel must be rank 4 [kh,kw,cin,cout]");
            }
            if (p.bias.size() != k[3]) {
              ShapeError(layer, input,
                         "bias length " + std::to_string(p.bias.size()) +
                             " does not match " + std::to_string(k[3]) +
                             " output channels");
            }
            if (p.stride_h == 0 || p.stride_w == 0) {
              ShapeError(layer, input, "stride must be positive");
            }
            if (input.size() != 3 || input[2] != k[2]) {
              ShapeError(layer, input,
                         "expected [h,w," + std::to_string(k[2]) + "]");
            }
            std::size_t oh = ConvOutExtent(input[0], k[0], p.stride_h, p.padding);
            std::size_t ow = ConvOutExtent(input[1], k[1], p.stride_w, p.padding);
            if (oh == 0 || ow == 0) {
              ShapeError(layer, input, "is smaller than the kernel");
            }
            return {oh, ow, k[3]};
          },
          [&](const MaxPool2DParams& p) -> Shape {
            if (p.pool_h == 0 || p.pool_w == 0 || p.stride_h == 0 ||
                p.stride_w == 0) {
              ShapeError(layer, input, "window and stride must be positive");
            }
            if (input.size() != 3 || input[0] < p.pool_h ||
                input[1] < p.pool_w) {
              ShapeError(layer, input, "does not fit the pooling window");
            }
            return {(input[0] - p.pool_h) / p.stride_h + 1,
                    (input[1] - p.pool_w) / p.stride_w + 1, input[2]};
          },
          [&](const DenseParams& p) -> Shape {
            const Shape& w = p.weights.shape();
            if (w.size() != 2) ShapeError(layer, input, "weights must be [in,out]");
            if (p.bias.size() != w[1]) {
              ShapeError(layer, input,
                         "bias length " + std::to_string(p.bias.size()) +
                             " does not match " + std::to_string(w[1]) +
                             " outputs");
            }
            if (input.size() != 1 || input[0] != w[0]) {
              ShapeError(layer, input,
                         "expected [" + std::to_string(w[0]) + "]");
            }
            return {w[1]};
          },
          [&](const ReluParams&) -> Shape { return input; },
          [&](const PreluParams& p) -> Shape {
            if (!Broadcastable(p.alpha.shape(), input)) {
              ShapeError(layer, input,
                         "cannot take alpha of shape " +
                             ShapeToString(p.alpha.shape()));
            }
            return input;
          },
          [&](const SoftmaxParams&) -> Shape {
            if (input.size() != 1) ShapeError(layer, input, "must be rank 1");
            return input;
          },
          [&](const FlattenParams&) -> Shape { return {NumElements(input)}; },
          [&](const DropoutParams& p) -> Shape {
            if (!(p.rate >= 0.0 && p.rate < 1.0)) {
              ShapeError(layer, input, "dropout rate must lie in [0, 1)");
            }
            return input;
          },
      },
      layer.params);
}

Tensor ForwardLayer(const LayerSpec& layer, const Tensor& input) {
  Shape expected = OutputShape(layer, input.shape());
  Tensor out = std::visit(
      Overloaded{
          [&](const Conv2DParams& p) { return Conv2D(p, input); },
          [&](const MaxPool2DParams& p) { return MaxPool2D(p, input); },
          [&](const DenseParams& p) { return Dense(p, input); },
          [&](const ReluParams&) { return Relu(input); },
          [&](const PreluParams& p) { return Prelu(input, p.alpha); },
          [&](const SoftmaxParams&) { return Softmax(input); },
          [&](const FlattenParams&) { return Flatten(input); },
          [&](const DropoutParams&) { return DropoutInference(input); },
      },
      layer.params);
  if (out.shape() != expected) {
    ShapeError(layer, input.shape(),
               "produced " + ShapeToString(out.shape()) + " instead of " +
                   ShapeToString(expected));
  }
  return out;
}

// Accumulation order per output element: kernel row, kernel column, input
// channel. Padded taps are skipped; they would add a signed zero that cannot
// change a sum that starts at +0.
Tensor Conv2D(const Conv2DParams& p, const Tensor& input) {
  const Shape& k = p.kernel.shape();
  const std::size_t kh = k[0], kw = k[1], cin = k[2], cout = k[3];
  const std::size_t ih = input.shape()[0], iw = input.shape()[1];
  const std::size_t oh = ConvOutExtent(ih, kh, p.stride_h, p.padding);
  const std::size_t ow = ConvOutExtent(iw, kw, p.stride_w, p.padding);
  const std::size_t pad_top = PadBefore(ih, oh, kh, p.stride_h, p.padding);
  const std::size_t pad_left = PadBefore(iw, ow, kw, p.stride_w, p.padding);

  Tensor out({oh, ow, cout});
  std::span<const float> in = input.data();
  std::span<const float> w = p.kernel.data();
  // Each output element accumulates over (ky, kx, ci) in that order; the
  // loops below only interleave independent outputs.
  std::vector<float> acc_row(ow * cout);
  for (std::size_t oy = 0; oy < oh; ++oy) {
    std::fill(acc_row.begin(), acc_row.end(), 0.0f);
    for (std::size_t ky = 0; ky < kh; ++ky) {
      const std::size_t y = oy * p.stride_h + ky;
      if (y < pad_top || y - pad_top >= ih) continue;
      for (std::size_t kx = 0; kx < kw; ++kx) {
        const float* pw = &w[(ky * kw + kx) * cin * cout];
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const std::size_t x = ox * p.stride_w + kx;
          if (x < pad_left || x - pad_left >= iw) continue;
          const float* px = &in[((y - pad_top) * iw + (x - pad_left)) * cin];
          float* acc = &acc_row[ox * cout];
          std::size_t co = 0;
          // Blocks of 8 outputs held in locals so the compiler can keep
          // them in vector registers across the channel loop.
          for (; co + 8 <= cout; co += 8) {
            float block[8];
            for (std::size_t j = 0; j < 8; ++j) block[j] = acc[co + j];
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const float v = px[ci];
              const float* row = pw + ci * cout + co;
              for (std::size_t j = 0; j < 8; ++j) block[j] += v * row[j];
            }
            for (std::size_t j = 0; j < 8; ++j) acc[co + j] = block[j];
          }
          for (; co < cout; ++co) {
            float a = acc[co];
            for (std::size_t ci = 0; ci < cin; ++ci) {
              a += px[ci] * pw[ci * cout + co];
            }
            acc[co] = a;
          }
        }
      }
    }
    float* dst = &out.data()[oy * ow * cout];
    for (std::size_t i = 0; i < ow * cout; ++i) {
      dst[i] = acc_row[i] + p.bias[i % cout];
    }
  }
  return ApplyActivation(p.activation, std::move(out));
}

Tensor MaxPool2D(const MaxPool2DParams& p, const Tensor& input) {
  const std::size_t ih = input.shape()[0], iw = input.shape()[1];
  const std::size_t c = input.shape()[2];
  const std::size_t oh = (ih - p.pool_h) / p.stride_h + 1;
  const std::size_t ow = (iw - p.pool_w) / p.stride_w + 1;
  Tensor out({oh, ow, c});
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        float m = -std::numeric_limits<float>::infinity();
        for (std::size_t ky = 0; ky < p.pool_h; ++ky) {
          for (std::size_t kx = 0; kx < p.pool_w; ++kx) {
            const std::size_t y = oy * p.stride_h + ky;
            const std::size_t x = ox * p.stride_w + kx;
            m = PropagatingMax(m, input[(y * iw + x) * c + ch]);
          }
        }
        out[(oy * ow + ox) * c + ch] = m;
      }
    }
  }
  return out;
}

Tensor Dense(const DenseParams& p, const Tensor& input) {
  const std::size_t in = p.weights.shape()[0];
  const std::size_t outs = p.weights.shape()[1];
  std::vector<float> acc(outs, 0.0f);
  std::span<const float> w = p.weights.data();
  for (std::size_t i = 0; i < in; ++i) {
    const float v = input[i];
    const float* row = &w[i * outs];
    for (std::size_t j = 0; j < outs; ++j) acc[j] += v * row[j];
  }
  for (std::size_t j = 0; j < outs; ++j) acc[j] += p.bias[j];
  return ApplyActivation(p.activation, Tensor({outs}, std::move(acc)));
}

Tensor Relu(const Tensor& input) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = ReluValue(input[i]);
  return out;
}

Tensor Prelu(const Tensor& input, const Tensor& alpha) {
  Tensor positive = Relu(input);
  Tensor negative = Mul(ConstMul(Sub(input, Abs(input)), 0.5f), alpha);
  return Add(positive, negative);
}

Tensor Softmax(const Tensor& input) {
  if (input.rank() != 1) {
    throw ValidationError("softmax expects a rank-1 tensor, got " +
                          ShapeToString(input.shape()));
  }
  float m = -std::numeric_limits<float>::infinity();
  for (float v : input.data()) m = PropagatingMax(m, v);
  Tensor out(input.shape());
  float sum = 0.0f;
  for (std::size_t i = 0; i < input.size(); ++i) {
    out[i] = std::exp(input[i] - m);
    sum += out[i];
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= sum;
  return out;
}

Tensor Flatten(const Tensor& input) {
  return input.Reshaped({input.size()});
}

Tensor DropoutInference(const Tensor& input) { return input; }

Tensor Abs(const Tensor& input) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = std::fabs(input[i]);
  return out;
}

Tensor Add(const Tensor& lhs, const Tensor& rhs) {
  return Elementwise(lhs, rhs, [](float a, float b) { return a + b; }, "Add");
}

Tensor Sub(const Tensor& lhs, const Tensor& rhs) {
  return Elementwise(lhs, rhs, [](float a, float b) { return a - b; }, "Sub");
}

Tensor Mul(const Tensor& lhs, const Tensor& rhs) {
  return Elementwise(lhs, BroadcastTo(rhs, lhs.shape()),
                     [](float a, float b) { return a * b; }, "Mul");
}

Tensor ConstMul(const Tensor& input, float constant) {
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] * constant;
  return out;
}

}  // namespace bitstorm
