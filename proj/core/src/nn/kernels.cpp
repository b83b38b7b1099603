// Copyright 2026 The texvib Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "texvib/nn/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <string>
#include <vector>

namespace texvib::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// im2col/GEMM operates on groups of samples so small feature maps still give
// the GEMM a wide right-hand side.
constexpr std::int64_t kTargetColumns = 2048;

std::int64_t chunk_size(const Conv2dGeometry& g) {
  const std::int64_t positions = g.out_h * g.out_w;
  return std::clamp<std::int64_t>(kTargetColumns / std::max<std::int64_t>(positions, 1), 1,
                                  g.batch);
}

// Output columns ox whose input column ox*stride - pad + kx is in range.
struct ValidSpan {
  std::int64_t lo, hi;
};

ValidSpan valid_span(std::int64_t offset, std::int64_t stride, std::int64_t in_extent,
                     std::int64_t out_extent) {
  // offset = kx - pad; need 0 <= ox*stride + offset < in_extent
  std::int64_t lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  std::int64_t hi = in_extent - 1 - offset < 0 ? 0 : (in_extent - 1 - offset) / stride + 1;
  lo = std::min(lo, out_extent);
  hi = std::clamp(hi, lo, out_extent);
  return {lo, hi};
}

// cols(row = (ci*k + ky)*k + kx, col = s*P + oy*W_out + ox)
template <typename T>
void im2col(const T* input, const Conv2dGeometry& g, std::int64_t n0, std::int64_t count,
            RowMat<T>& cols) {
  const std::int64_t positions = g.out_h * g.out_w;
  cols.resize(g.in_channels * g.kernel * g.kernel, count * positions);
  for (std::int64_t ci = 0; ci < g.in_channels; ++ci) {
    for (std::int64_t ky = 0; ky < g.kernel; ++ky) {
      for (std::int64_t kx = 0; kx < g.kernel; ++kx) {
        T* row = cols.data() + ((ci * g.kernel + ky) * g.kernel + kx) * cols.cols();
        const ValidSpan span = valid_span(kx - g.pad, g.stride, g.in_w, g.out_w);
        for (std::int64_t s = 0; s < count; ++s) {
          const T* plane = input + ((n0 + s) * g.in_channels + ci) * g.in_h * g.in_w;
          T* dst = row + s * positions;
          for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
            const std::int64_t iy = oy * g.stride - g.pad + ky;
            T* line = dst + oy * g.out_w;
            if (iy < 0 || iy >= g.in_h) {
              std::fill(line, line + g.out_w, T(0));
              continue;
            }
            const T* src = plane + iy * g.in_w + kx - g.pad;
            std::fill(line, line + span.lo, T(0));
            if (g.stride == 1) {
              std::copy(src + span.lo, src + span.hi, line + span.lo);
            } else {
              for (std::int64_t ox = span.lo; ox < span.hi; ++ox) line[ox] = src[ox * g.stride];
            }
            std::fill(line + span.hi, line + g.out_w, T(0));
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const RowMat<T>& cols, const Conv2dGeometry& g, std::int64_t n0, std::int64_t count,
                T* grad_input) {
  const std::int64_t positions = g.out_h * g.out_w;
  for (std::int64_t ci = 0; ci < g.in_channels; ++ci) {
    for (std::int64_t ky = 0; ky < g.kernel; ++ky) {
      for (std::int64_t kx = 0; kx < g.kernel; ++kx) {
        const T* row = cols.data() + ((ci * g.kernel + ky) * g.kernel + kx) * cols.cols();
        const ValidSpan span = valid_span(kx - g.pad, g.stride, g.in_w, g.out_w);
        for (std::int64_t s = 0; s < count; ++s) {
          T* plane = grad_input + ((n0 + s) * g.in_channels + ci) * g.in_h * g.in_w;
          const T* src = row + s * positions;
          for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
            const std::int64_t iy = oy * g.stride - g.pad + ky;
            if (iy < 0 || iy >= g.in_h) continue;
            T* dst = plane + iy * g.in_w + kx - g.pad;
            const T* line = src + oy * g.out_w;
            if (g.stride == 1) {
              for (std::int64_t ox = span.lo; ox < span.hi; ++ox) dst[ox] += line[ox];
            } else {
              for (std::int64_t ox = span.lo; ox < span.hi; ++ox) dst[ox * g.stride] += line[ox];
            }
          }
        }
      }
    }
  }
}

// Few output channels make the GEMM a matrix-vector product dominated by
// im2col traffic; these shapes (the generator's final 1-channel layer) are
// computed directly as shifted multiply-adds instead.
constexpr std::int64_t kDirectMaxOutChannels = 4;

bool use_direct(const Conv2dGeometry& g) {
  return g.out_channels <= kDirectMaxOutChannels && g.stride == 1;
}

// Calls f(out_line, in_line, span) for every (oy, ky, kx) tap with a
// non-empty valid span; in_line is already offset so in_line[ox] pairs with
// out_line[ox].
template <typename F>
void for_each_tap(const Conv2dGeometry& g, F&& f) {
  for (std::int64_t ky = 0; ky < g.kernel; ++ky) {
    for (std::int64_t kx = 0; kx < g.kernel; ++kx) {
      const ValidSpan span = valid_span(kx - g.pad, 1, g.in_w, g.out_w);
      if (span.lo >= span.hi) continue;
      for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
        const std::int64_t iy = oy - g.pad + ky;
        if (iy < 0 || iy >= g.in_h) continue;
        f(ky, kx, oy * g.out_w, iy * g.in_w + kx - g.pad, span);
      }
    }
  }
}

template <typename T>
void direct_forward(const T* in, const T* weight, const Conv2dGeometry& g, T* out) {
  const std::int64_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w;
  for (std::int64_t n = 0; n < g.batch; ++n) {
    for (std::int64_t co = 0; co < g.out_channels; ++co) {
      T* o = out + (n * g.out_channels + co) * out_plane;
      for (std::int64_t ci = 0; ci < g.in_channels; ++ci) {
        const T* x = in + (n * g.in_channels + ci) * in_plane;
        const T* w = weight + (co * g.in_channels + ci) * g.kernel * g.kernel;
        for_each_tap(g, [&](std::int64_t ky, std::int64_t kx, std::int64_t o_off, std::int64_t i_off,
                            ValidSpan span) {
          const T wv = w[ky * g.kernel + kx];
          T* dst = o + o_off;
          const T* src = x + i_off;
          for (std::int64_t ox = span.lo; ox < span.hi; ++ox) dst[ox] += wv * src[ox];
        });
      }
    }
  }
}

template <typename T>
void direct_backward_input(const T* dy, const T* weight, const Conv2dGeometry& g, T* dx) {
  const std::int64_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w;
  for (std::int64_t n = 0; n < g.batch; ++n) {
    for (std::int64_t co = 0; co < g.out_channels; ++co) {
      const T* d = dy + (n * g.out_channels + co) * out_plane;
      for (std::int64_t ci = 0; ci < g.in_channels; ++ci) {
        T* x = dx + (n * g.in_channels + ci) * in_plane;
        const T* w = weight + (co * g.in_channels + ci) * g.kernel * g.kernel;
        for_each_tap(g, [&](std::int64_t ky, std::int64_t kx, std::int64_t o_off, std::int64_t i_off,
                            ValidSpan span) {
          const T wv = w[ky * g.kernel + kx];
          const T* src = d + o_off;
          T* dst = x + i_off;
          for (std::int64_t ox = span.lo; ox < span.hi; ++ox) dst[ox] += wv * src[ox];
        });
      }
    }
  }
}

template <typename T>
void direct_backward_params(const T* in, const T* dy, const Conv2dGeometry& g, T* dw) {
  const std::int64_t in_plane = g.in_h * g.in_w, out_plane = g.out_h * g.out_w;
  const std::int64_t taps = g.kernel * g.kernel;
  std::vector<double> acc(static_cast<std::size_t>(taps));
  for (std::int64_t co = 0; co < g.out_channels; ++co) {
    for (std::int64_t ci = 0; ci < g.in_channels; ++ci) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::int64_t n = 0; n < g.batch; ++n) {
        const T* d = dy + (n * g.out_channels + co) * out_plane;
        const T* x = in + (n * g.in_channels + ci) * in_plane;
        for_each_tap(g, [&](std::int64_t ky, std::int64_t kx, std::int64_t o_off, std::int64_t i_off,
                            ValidSpan span) {
          using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
          const Eigen::Map<const Vec> a(d + o_off + span.lo, span.hi - span.lo);
          const Eigen::Map<const Vec> b(x + i_off + span.lo, span.hi - span.lo);
          acc[static_cast<std::size_t>(ky * g.kernel + kx)] += a.dot(b);
        });
      }
      T* w = dw + (co * g.in_channels + ci) * taps;
      for (std::int64_t t = 0; t < taps; ++t) w[t] += static_cast<T>(acc[static_cast<std::size_t>(t)]);
    }
  }
}

// (C_out, count*P) block of an NCHW tensor.
template <typename T>
void gather_channels(const T* nchw, const Conv2dGeometry& g, std::int64_t n0, std::int64_t count,
                     RowMat<T>& out) {
  const std::int64_t positions = g.out_h * g.out_w;
  out.resize(g.out_channels, count * positions);
  for (std::int64_t co = 0; co < g.out_channels; ++co) {
    for (std::int64_t s = 0; s < count; ++s) {
      const T* src = nchw + ((n0 + s) * g.out_channels + co) * positions;
      std::copy(src, src + positions, out.data() + co * out.cols() + s * positions);
    }
  }
}

}  // namespace

Conv2dGeometry conv2d_geometry(const Shape& input, const Shape& weight_shape, std::int64_t stride,
                               std::int64_t pad) {
  if (input.size() != 4) {
    fail(ErrorCode::kDimension, "conv2d: input must be NCHW, got " + shape_str(input));
  }
  if (weight_shape.size() != 4 || weight_shape[2] != weight_shape[3]) {
    fail(ErrorCode::kDimension, "conv2d: weight must be (C_out, C_in, k, k), got " +
                                    shape_str(weight_shape));
  }
  if (input[1] != weight_shape[1]) {
    fail(ErrorCode::kDimension, "conv2d: input channel axis (C=" + std::to_string(input[1]) +
                                    ") does not match weight axis 1 (C_in=" +
                                    std::to_string(weight_shape[1]) + ")");
  }
  if (stride < 1 || pad < 0) fail(ErrorCode::kInvalidArgument, "conv2d: stride >= 1, pad >= 0");
  Conv2dGeometry g;
  g.batch = input[0];
  g.in_channels = input[1];
  g.in_h = input[2];
  g.in_w = input[3];
  g.out_channels = weight_shape[0];
  g.kernel = weight_shape[2];
  g.stride = stride;
  g.pad = pad;
  if (g.kernel > g.in_h + 2 * pad || g.kernel > g.in_w + 2 * pad) {
    fail(ErrorCode::kDimension, "conv2d: kernel " + std::to_string(g.kernel) +
                                    " exceeds padded spatial extent (H=" +
                                    std::to_string(g.in_h) + ", W=" + std::to_string(g.in_w) +
                                    ", pad=" + std::to_string(pad) + ")");
  }
  g.out_h = (g.in_h + 2 * pad - g.kernel) / stride + 1;
  g.out_w = (g.in_w + 2 * pad - g.kernel) / stride + 1;
  return g;
}

template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias,
                 std::int64_t stride, std::int64_t pad) {
  const Conv2dGeometry g = conv2d_geometry(input.shape(), weight.shape(), stride, pad);
  if (bias) require_shape(bias->shape(), {g.out_channels}, "conv2d bias");
  Tensor<T> out({g.batch, g.out_channels, g.out_h, g.out_w});
  if (use_direct(g)) {
    direct_forward(input.data(), weight.data(), g, out.data());
    if (bias) {
      const std::int64_t positions = g.out_h * g.out_w;
      for (std::int64_t n = 0; n < g.batch; ++n) {
        for (std::int64_t co = 0; co < g.out_channels; ++co) {
          T* dst = out.data() + (n * g.out_channels + co) * positions;
          for (std::int64_t p = 0; p < positions; ++p) dst[p] += (*bias)[co];
        }
      }
    }
    return out;
  }
  const std::int64_t k_rows = g.in_channels * g.kernel * g.kernel;
  const std::int64_t positions = g.out_h * g.out_w;
  const Eigen::Map<const RowMat<T>> w(weight.data(), g.out_channels, k_rows);
  RowMat<T> cols;
  RowMat<T> result;
  const std::int64_t chunk = chunk_size(g);
  for (std::int64_t n0 = 0; n0 < g.batch; n0 += chunk) {
    const std::int64_t count = std::min(chunk, g.batch - n0);
    im2col(input.data(), g, n0, count, cols);
    result.noalias() = w * cols;
    for (std::int64_t co = 0; co < g.out_channels; ++co) {
      const T b = bias ? (*bias)[co] : T(0);
      for (std::int64_t s = 0; s < count; ++s) {
        const T* src = result.data() + co * result.cols() + s * positions;
        T* dst = out.data() + ((n0 + s) * g.out_channels + co) * positions;
        for (std::int64_t p = 0; p < positions; ++p) dst[p] = src[p] + b;
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> conv2d_backward_input(const Tensor<T>& grad_out, const Tensor<T>& weight,
                                const Shape& input_shape, std::int64_t stride, std::int64_t pad) {
  const Conv2dGeometry g = conv2d_geometry(input_shape, weight.shape(), stride, pad);
  require_shape(grad_out.shape(), {g.batch, g.out_channels, g.out_h, g.out_w},
                "conv2d backward: upstream gradient");
  Tensor<T> grad_in(input_shape);
  if (use_direct(g)) {
    direct_backward_input(grad_out.data(), weight.data(), g, grad_in.data());
    return grad_in;
  }
  const std::int64_t k_rows = g.in_channels * g.kernel * g.kernel;
  const Eigen::Map<const RowMat<T>> w(weight.data(), g.out_channels, k_rows);
  RowMat<T> dy;
  RowMat<T> dcols;
  const std::int64_t chunk = chunk_size(g);
  for (std::int64_t n0 = 0; n0 < g.batch; n0 += chunk) {
    const std::int64_t count = std::min(chunk, g.batch - n0);
    gather_channels(grad_out.data(), g, n0, count, dy);
    dcols.noalias() = w.transpose() * dy;
    col2im_add(dcols, g, n0, count, grad_in.data());
  }
  return grad_in;
}

template <typename T>
void conv2d_backward_params(const Tensor<T>& input, const Tensor<T>& grad_out, std::int64_t stride,
                            std::int64_t pad, Tensor<T>& grad_weight, Tensor<T>* grad_bias) {
  const Conv2dGeometry g = conv2d_geometry(input.shape(), grad_weight.shape(), stride, pad);
  require_shape(grad_out.shape(), {g.batch, g.out_channels, g.out_h, g.out_w},
                "conv2d backward: upstream gradient");
  if (use_direct(g)) {
    direct_backward_params(input.data(), grad_out.data(), g, grad_weight.data());
    if (grad_bias) {
      const std::int64_t positions = g.out_h * g.out_w;
      for (std::int64_t co = 0; co < g.out_channels; ++co) {
        double sum = 0.0;
        for (std::int64_t n = 0; n < g.batch; ++n) {
          const T* src = grad_out.data() + (n * g.out_channels + co) * positions;
          for (std::int64_t p = 0; p < positions; ++p) sum += src[p];
        }
        (*grad_bias)[co] += static_cast<T>(sum);
      }
    }
    return;
  }
  const std::int64_t k_rows = g.in_channels * g.kernel * g.kernel;
  Eigen::Map<RowMat<T>> dw(grad_weight.data(), g.out_channels, k_rows);
  RowMat<T> cols;
  RowMat<T> dy;
  const std::int64_t chunk = chunk_size(g);
  for (std::int64_t n0 = 0; n0 < g.batch; n0 += chunk) {
    const std::int64_t count = std::min(chunk, g.batch - n0);
    im2col(input.data(), g, n0, count, cols);
    gather_channels(grad_out.data(), g, n0, count, dy);
    dw.noalias() += dy * cols.transpose();
    if (grad_bias) {
      for (std::int64_t co = 0; co < g.out_channels; ++co) (*grad_bias)[co] += dy.row(co).sum();
    }
  }
}

template <typename T>
Tensor<T> pixel_shuffle(const Tensor<T>& input, std::int64_t factor) {
  if (input.rank() != 4) fail(ErrorCode::kDimension, "pixel_shuffle: input must be NCHW");
  if (factor < 1) fail(ErrorCode::kInvalidArgument, "pixel_shuffle: factor must be >= 1");
  const std::int64_t r2 = factor * factor;
  const std::int64_t n = input.dim(0), c_in = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (c_in % r2 != 0) {
    fail(ErrorCode::kDimension, "pixel_shuffle: channels (" + std::to_string(c_in) +
                                    ") not divisible by factor^2 (" + std::to_string(r2) + ")");
  }
  const std::int64_t c = c_in / r2;
  Tensor<T> out({n, c, h * factor, w * factor});
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      for (std::int64_t i = 0; i < factor; ++i) {
        for (std::int64_t j = 0; j < factor; ++j) {
          const std::int64_t src_c = ch * r2 + i * factor + j;
          for (std::int64_t y = 0; y < h; ++y) {
            for (std::int64_t x = 0; x < w; ++x) {
              out.at(b, ch, y * factor + i, x * factor + j) = input.at(b, src_c, y, x);
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> pixel_unshuffle(const Tensor<T>& input, std::int64_t factor) {
  if (input.rank() != 4) fail(ErrorCode::kDimension, "pixel_unshuffle: input must be NCHW");
  if (factor < 1) fail(ErrorCode::kInvalidArgument, "pixel_unshuffle: factor must be >= 1");
  const std::int64_t n = input.dim(0), c = input.dim(1), h = input.dim(2), w = input.dim(3);
  if (h % factor != 0 || w % factor != 0) {
    fail(ErrorCode::kDimension, "pixel_unshuffle: spatial extent not divisible by factor");
  }
  const std::int64_t r2 = factor * factor;
  Tensor<T> out({n, c * r2, h / factor, w / factor});
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      for (std::int64_t i = 0; i < factor; ++i) {
        for (std::int64_t j = 0; j < factor; ++j) {
          const std::int64_t dst_c = ch * r2 + i * factor + j;
          for (std::int64_t y = 0; y < h / factor; ++y) {
            for (std::int64_t x = 0; x < w / factor; ++x) {
              out.at(b, dst_c, y, x) = input.at(b, ch, y * factor + i, x * factor + j);
            }
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
Tensor<T> dense(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>* bias) {
  if (input.rank() != 2 || weight.rank() != 2) {
    fail(ErrorCode::kDimension, "dense: expected rank-2 input and weight, got " +
                                    shape_str(input.shape()) + " and " + shape_str(weight.shape()));
  }
  if (input.dim(1) != weight.dim(1)) {
    fail(ErrorCode::kDimension, "dense: input feature axis (" + std::to_string(input.dim(1)) +
                                    ") does not match weight axis 1 (" +
                                    std::to_string(weight.dim(1)) + ")");
  }
  const std::int64_t n = input.dim(0), in = input.dim(1), out_f = weight.dim(0);
  if (bias) require_shape(bias->shape(), {out_f}, "dense bias");
  Tensor<T> out({n, out_f});
  const Eigen::Map<const RowMat<T>> x(input.data(), n, in);
  const Eigen::Map<const RowMat<T>> w(weight.data(), out_f, in);
  Eigen::Map<RowMat<T>> y(out.data(), n, out_f);
  y.noalias() = x * w.transpose();
  if (bias) {
    const Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> b(bias->data(), out_f);
    y.rowwise() += b;
  }
  return out;
}

#define TEXVIB_INSTANTIATE_KERNELS(T)                                                           \
  template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*, std::int64_t, \
                            std::int64_t);                                                      \
  template Tensor<T> conv2d_backward_input(const Tensor<T>&, const Tensor<T>&, const Shape&,    \
                                           std::int64_t, std::int64_t);                         \
  template void conv2d_backward_params(const Tensor<T>&, const Tensor<T>&, std::int64_t,        \
                                       std::int64_t, Tensor<T>&, Tensor<T>*);                   \
  template Tensor<T> pixel_shuffle(const Tensor<T>&, std::int64_t);                             \
  template Tensor<T> pixel_unshuffle(const Tensor<T>&, std::int64_t);                           \
  template Tensor<T> dense(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*);

TEXVIB_INSTANTIATE_KERNELS(float)
TEXVIB_INSTANTIATE_KERNELS(double)

#undef TEXVIB_INSTANTIATE_KERNELS

}  // namespace texvib::nn
