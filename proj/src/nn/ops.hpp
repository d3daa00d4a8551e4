// Copyright 2026 The pano360 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "nn/gemm.hpp"
#include "nn/graph.hpp"
#include "nn/tensor.hpp"

namespace pano360::nn {

struct Conv2dSpec {
  int stride = 1;
  int pad = 0;
  bool wrap_x = false;  // horizontal wrap padding (equirect azimuth periodicity)
};

namespace detail {

// Fills the patch matrix for output rows [r0, r1): col is {K, (r1-r0)*ow}
// with K = C*kh*kw. Vertical out-of-range reads are zero; horizontal reads
// wrap or zero per spec.
template <typename T>
void im2col(const Tensor<T>& x, int kh, int kw, const Conv2dSpec& spec, int r0, int r1, int ow,
            T* col) {
  const int c_in = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::size_t tcols = static_cast<std::size_t>(r1 - r0) * ow;
  const T* xd = x.data();
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        T* dst = col + (static_cast<std::size_t>((c * kh + ky) * kw + kx)) * tcols;
        for (int oy = r0; oy < r1; ++oy) {
          const int iy = oy * spec.stride - spec.pad + ky;
          T* row = dst + static_cast<std::size_t>(oy - r0) * ow;
          if (iy < 0 || iy >= h) {
            std::fill(row, row + ow, T(0));
            continue;
          }
          const T* src = xd + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * spec.stride - spec.pad + kx;
            if (ix < 0 || ix >= w) {
              if (spec.wrap_x) {
                ix = ((ix % w) + w) % w;
              } else {
                row[ox] = T(0);
                continue;
              }
            }
            row[ox] = src[ix];
          }
        }
      }
    }
  }
}

// Transpose of im2col: scatters patch-matrix gradients back into dx.
template <typename T>
void col2im_add(const T* col, int kh, int kw, const Conv2dSpec& spec, int r0, int r1, int ow,
                Tensor<T>& dx) {
  const int c_in = dx.dim(0), h = dx.dim(1), w = dx.dim(2);
  const std::size_t tcols = static_cast<std::size_t>(r1 - r0) * ow;
  T* xd = dx.data();
  for (int c = 0; c < c_in; ++c) {
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx) {
        const T* src = col + (static_cast<std::size_t>((c * kh + ky) * kw + kx)) * tcols;
        for (int oy = r0; oy < r1; ++oy) {
          const int iy = oy * spec.stride - spec.pad + ky;
          if (iy < 0 || iy >= h) continue;
          const T* row = src + static_cast<std::size_t>(oy - r0) * ow;
          T* dst = xd + (static_cast<std::size_t>(c) * h + iy) * w;
          for (int ox = 0; ox < ow; ++ox) {
            int ix = ox * spec.stride - spec.pad + kx;
            if (ix < 0 || ix >= w) {
              if (!spec.wrap_x) continue;
              ix = ((ix % w) + w) % w;
            }
            dst[ix] += row[ox];
          }
        }
      }
    }
  }
}

// Output rows per im2col tile, bounding the patch matrix to ~8M scalars.
inline int conv_tile_rows(std::size_t k, int ow) {
  const std::size_t cap = std::size_t(1) << 23;
  const std::size_t per_row = k * static_cast<std::size_t>(ow);
  return std::max<std::size_t>(1, cap / std::max<std::size_t>(1, per_row));
}

template <typename T>
T stable_sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
T softplus(T z) {
  return std::max(z, T(0)) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace detail

// 2-D convolution over {C,H,W} with weight {O,C,kh,kw} and bias {O}.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& w, const Var<T>& b, const Conv2dSpec& spec) {
  const auto& xs = x->value.shape();
  const auto& ws = w->value.shape();
  if (xs.size() != 3 || ws.size() != 4) throw DataError("conv2d: bad ranks");
  if (ws[1] != xs[0]) throw DataError("conv2d: channel mismatch");
  if (b->value.shape() != std::vector<int>{ws[0]}) throw DataError("conv2d: bad bias shape");
  const int c_out = ws[0], kh = ws[2], kw = ws[3];
  const int h = xs[1], wd = xs[2];
  const int oh = (h + 2 * spec.pad - kh) / spec.stride + 1;
  const int ow = (wd + 2 * spec.pad - kw) / spec.stride + 1;
  if (oh < 1 || ow < 1) throw DataError("conv2d: output would be empty");
  const std::size_t k = static_cast<std::size_t>(xs[0]) * kh * kw;
  const std::size_t plane = static_cast<std::size_t>(oh) * ow;

  Tensor<T> out({c_out, oh, ow});
  const int tile = detail::conv_tile_rows(k, ow);
  std::vector<T> col;
  for (int r0 = 0; r0 < oh; r0 += tile) {
    const int r1 = std::min(oh, r0 + tile);
    const std::size_t tcols = static_cast<std::size_t>(r1 - r0) * ow;
    col.resize(k * tcols);
    detail::im2col(x->value, kh, kw, spec, r0, r1, ow, col.data());
    gemm(false, false, c_out, static_cast<int>(tcols), static_cast<int>(k), T(1), w->value.data(),
         static_cast<int>(k), col.data(), static_cast<int>(tcols), T(0),
         out.data() + static_cast<std::size_t>(r0) * ow, static_cast<int>(plane));
  }
  const T* bias = b->value.data();
  for (int o = 0; o < c_out; ++o) {
    T* dst = out.data() + o * plane;
    for (std::size_t i = 0; i < plane; ++i) dst[i] += bias[o];
  }

  auto backward = [x, w, b, spec, kh, kw, oh, ow, k, plane](Node<T>& self) {
    const T* g = self.grad.data();
    const int c_out_b = self.value.dim(0);
    if (b->requires_grad) {
      Tensor<T>& db = ensure_grad(*b);
      for (int o = 0; o < c_out_b; ++o) {
        double acc = 0.0;
        const T* gp = g + o * plane;
        for (std::size_t i = 0; i < plane; ++i) acc += static_cast<double>(gp[i]);
        db[o] += static_cast<T>(acc);
      }
    }
    const bool need_dw = w->requires_grad;
    const bool need_dx = x->requires_grad;
    if (!need_dw && !need_dx) return;
    if (need_dw) ensure_grad(*w);
    if (need_dx) ensure_grad(*x);
    const int tile = detail::conv_tile_rows(k, ow);
    std::vector<T> col, dcol;
    for (int r0 = 0; r0 < oh; r0 += tile) {
      const int r1 = std::min(oh, r0 + tile);
      const std::size_t tcols = static_cast<std::size_t>(r1 - r0) * ow;
      if (need_dw) {
        col.resize(k * tcols);
        detail::im2col(x->value, kh, kw, spec, r0, r1, ow, col.data());
        gemm(false, true, c_out_b, static_cast<int>(k), static_cast<int>(tcols), T(1),
             g + static_cast<std::size_t>(r0) * ow, static_cast<int>(plane), col.data(),
             static_cast<int>(tcols), T(1), w->grad.data(), static_cast<int>(k));
      }
      if (need_dx) {
        dcol.resize(k * tcols);
        gemm(true, false, static_cast<int>(k), static_cast<int>(tcols), c_out_b, T(1),
             w->value.data(), static_cast<int>(k), g + static_cast<std::size_t>(r0) * ow,
             static_cast<int>(plane), T(0), dcol.data(), static_cast<int>(tcols));
        detail::col2im_add(dcol.data(), kh, kw, spec, r0, r1, ow, x->grad);
      }
    }
  };
  return make_op(std::move(out), {x, w, b}, backward);
}

// Per-channel normalization over the spatial extent (batch size is 1).
template <typename T>
Var<T> instance_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta, T eps = T(1e-5)) {
  const auto& xs = x->value.shape();
  if (xs.size() != 3) throw DataError("instance_norm: rank must be 3");
  const int c_n = xs[0];
  const std::size_t hw = static_cast<std::size_t>(xs[1]) * xs[2];
  if (gamma->value.shape() != std::vector<int>{c_n} || beta->value.shape() != std::vector<int>{c_n})
    throw DataError("instance_norm: affine shape mismatch");

  std::vector<T> mu(c_n), inv(c_n);
  Tensor<T> out(xs);
  const T* xd = x->value.data();
  for (int c = 0; c < c_n; ++c) {
    const T* src = xd + c * hw;
    double s = 0.0;
    for (std::size_t i = 0; i < hw; ++i) s += static_cast<double>(src[i]);
    const double m = s / static_cast<double>(hw);
    double v = 0.0;
    for (std::size_t i = 0; i < hw; ++i) {
      const double d = static_cast<double>(src[i]) - m;
      v += d * d;
    }
    v /= static_cast<double>(hw);
    mu[c] = static_cast<T>(m);
    inv[c] = static_cast<T>(1.0 / std::sqrt(v + static_cast<double>(eps)));
    const T g = gamma->value[c], bt = beta->value[c], iv = inv[c], mc = mu[c];
    T* dst = out.data() + c * hw;
    for (std::size_t i = 0; i < hw; ++i) dst[i] = g * (src[i] - mc) * iv + bt;
  }

  auto backward = [x, gamma, beta, mu, inv, c_n, hw](Node<T>& self) {
    const T* g = self.grad.data();
    const T* xd = x->value.data();
    for (int c = 0; c < c_n; ++c) {
      const T* gy = g + c * hw;
      const T* src = xd + c * hw;
      const T iv = inv[c], mc = mu[c];
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < hw; ++i) {
        const double xh = (static_cast<double>(src[i]) - mc) * iv;
        s1 += static_cast<double>(gy[i]);
        s2 += static_cast<double>(gy[i]) * xh;
      }
      if (beta->requires_grad) ensure_grad(*beta)[c] += static_cast<T>(s1);
      if (gamma->requires_grad) ensure_grad(*gamma)[c] += static_cast<T>(s2);
      if (x->requires_grad) {
        T* dx = ensure_grad(*x).data() + c * hw;
        const double gm = gamma->value[c] * iv;
        const double m1 = s1 / static_cast<double>(hw);
        const double m2 = s2 / static_cast<double>(hw);
        for (std::size_t i = 0; i < hw; ++i) {
          const double xh = (static_cast<double>(src[i]) - mc) * iv;
          dx[i] += static_cast<T>(gm * (static_cast<double>(gy[i]) - m1 - xh * m2));
        }
      }
    }
  };
  return make_op(std::move(out), {x, gamma, beta}, backward);
}

template <typename T>
Var<T> leaky_relu(const Var<T>& x, T slope) {
  Tensor<T> out(x->value.shape());
  const T* xd = x->value.data();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = xd[i] > T(0) ? xd[i] : slope * xd[i];
  auto backward = [x, slope](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    const T* g = self.grad.data();
    const T* xd = x->value.data();
    for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] += g[i] * (xd[i] > T(0) ? T(1) : slope);
  };
  return make_op(std::move(out), {x}, backward);
}

// Bounded output activation: identity on [-1,1], hard clamp outside. Gradient
// passes only inside the closed interval.
template <typename T>
Var<T> clamp_unit(const Var<T>& x) {
  Tensor<T> out(x->value.shape());
  const T* xd = x->value.data();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::clamp(xd[i], T(-1), T(1));
  auto backward = [x](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    const T* g = self.grad.data();
    const T* xd = x->value.data();
    for (std::size_t i = 0; i < dx.numel(); ++i) {
      if (xd[i] >= T(-1) && xd[i] <= T(1)) dx[i] += g[i];
    }
  };
  return make_op(std::move(out), {x}, backward);
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a->value.shape(), b->value.shape(), "add");
  Tensor<T> out(a->value.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + b->value[i];
  auto backward = [a, b](Node<T>& self) {
    const T* g = self.grad.data();
    for (const Var<T>& p : {a, b}) {
      if (!p->requires_grad) continue;
      Tensor<T>& dp = ensure_grad(*p);
      for (std::size_t i = 0; i < dp.numel(); ++i) dp[i] += g[i];
    }
  };
  return make_op(std::move(out), {a, b}, backward);
}

template <typename T>
Var<T> scale(const Var<T>& x, T s) {
  Tensor<T> out(x->value.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = s * x->value[i];
  auto backward = [x, s](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    const T* g = self.grad.data();
    for (std::size_t i = 0; i < dx.numel(); ++i) dx[i] += s * g[i];
  };
  return make_op(std::move(out), {x}, backward);
}

template <typename T>
Var<T> concat_ch(const Var<T>& a, const Var<T>& b) {
  const auto& as = a->value.shape();
  const auto& bs = b->value.shape();
  if (as.size() != 3 || bs.size() != 3 || as[1] != bs[1] || as[2] != bs[2])
    throw DataError("concat_ch: spatial dims must match");
  Tensor<T> out({as[0] + bs[0], as[1], as[2]});
  std::memcpy(out.data(), a->value.data(), a->value.numel() * sizeof(T));
  std::memcpy(out.data() + a->value.numel(), b->value.data(), b->value.numel() * sizeof(T));
  auto backward = [a, b](Node<T>& self) {
    const T* g = self.grad.data();
    const std::size_t na = a->value.numel();
    if (a->requires_grad) {
      Tensor<T>& da = ensure_grad(*a);
      for (std::size_t i = 0; i < na; ++i) da[i] += g[i];
    }
    if (b->requires_grad) {
      Tensor<T>& db = ensure_grad(*b);
      for (std::size_t i = 0; i < db.numel(); ++i) db[i] += g[na + i];
    }
  };
  return make_op(std::move(out), {a, b}, backward);
}

enum class UpsampleMode { nearest, bilinear };

// Fixed (non-learned) x2 upsampling; bilinear is the pyramid residual f.
template <typename T>
Var<T> upsample2x(const Var<T>& x, UpsampleMode mode, bool wrap_x) {
  const auto& xs = x->value.shape();
  if (xs.size() != 3) throw DataError("upsample2x: rank must be 3");
  const int c_n = xs[0], h = xs[1], w = xs[2];
  const int oh = 2 * h, ow = 2 * w;
  Tensor<T> out({c_n, oh, ow});

  // (i0, i1, weight of i1) per output coordinate.
  auto taps = [](int out_i, int n, bool wrap) {
    const double s = (out_i + 0.5) * 0.5 - 0.5;
    int i0 = static_cast<int>(std::floor(s));
    const double f = s - i0;
    int i1 = i0 + 1;
    if (wrap) {
      i0 = ((i0 % n) + n) % n;
      i1 = ((i1 % n) + n) % n;
    } else {
      i0 = std::clamp(i0, 0, n - 1);
      i1 = std::clamp(i1, 0, n - 1);
    }
    return std::array<double, 3>{static_cast<double>(i0), static_cast<double>(i1), f};
  };

  if (mode == UpsampleMode::nearest) {
    for (int c = 0; c < c_n; ++c) {
      const T* src = x->value.data() + static_cast<std::size_t>(c) * h * w;
      T* dst = out.data() + static_cast<std::size_t>(c) * oh * ow;
      for (int y = 0; y < oh; ++y)
        for (int xw = 0; xw < ow; ++xw)
          dst[static_cast<std::size_t>(y) * ow + xw] =
              src[static_cast<std::size_t>(y / 2) * w + xw / 2];
    }
  } else {
    for (int c = 0; c < c_n; ++c) {
      const T* src = x->value.data() + static_cast<std::size_t>(c) * h * w;
      T* dst = out.data() + static_cast<std::size_t>(c) * oh * ow;
      for (int y = 0; y < oh; ++y) {
        const auto ty = taps(y, h, false);
        const int y0 = static_cast<int>(ty[0]), y1 = static_cast<int>(ty[1]);
        const double fy = ty[2];
        for (int xw = 0; xw < ow; ++xw) {
          const auto tx = taps(xw, w, wrap_x);
          const int x0 = static_cast<int>(tx[0]), x1 = static_cast<int>(tx[1]);
          const double fx = tx[2];
          const double v = (1 - fy) * ((1 - fx) * src[std::size_t(y0) * w + x0] +
                                       fx * src[std::size_t(y0) * w + x1]) +
                           fy * ((1 - fx) * src[std::size_t(y1) * w + x0] +
                                 fx * src[std::size_t(y1) * w + x1]);
          dst[static_cast<std::size_t>(y) * ow + xw] = static_cast<T>(v);
        }
      }
    }
  }

  auto backward = [x, mode, wrap_x, c_n, h, w, oh, ow, taps](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    const T* g = self.grad.data();
    for (int c = 0; c < c_n; ++c) {
      T* dst = dx.data() + static_cast<std::size_t>(c) * h * w;
      const T* gp = g + static_cast<std::size_t>(c) * oh * ow;
      if (mode == UpsampleMode::nearest) {
        for (int y = 0; y < oh; ++y)
          for (int xw = 0; xw < ow; ++xw)
            dst[static_cast<std::size_t>(y / 2) * w + xw / 2] +=
                gp[static_cast<std::size_t>(y) * ow + xw];
      } else {
        for (int y = 0; y < oh; ++y) {
          const auto ty = taps(y, h, false);
          const int y0 = static_cast<int>(ty[0]), y1 = static_cast<int>(ty[1]);
          const double fy = ty[2];
          for (int xw = 0; xw < ow; ++xw) {
            const auto tx = taps(xw, w, wrap_x);
            const int x0 = static_cast<int>(tx[0]), x1 = static_cast<int>(tx[1]);
            const double fx = tx[2];
            const double gv = gp[static_cast<std::size_t>(y) * ow + xw];
            dst[std::size_t(y0) * w + x0] += static_cast<T>((1 - fy) * (1 - fx) * gv);
            dst[std::size_t(y0) * w + x1] += static_cast<T>((1 - fy) * fx * gv);
            dst[std::size_t(y1) * w + x0] += static_cast<T>(fy * (1 - fx) * gv);
            dst[std::size_t(y1) * w + x1] += static_cast<T>(fy * fx * gv);
          }
        }
      }
    }
  };
  return make_op(std::move(out), {x}, backward);
}

template <typename T>
Var<T> global_avg_pool(const Var<T>& x) {
  const auto& xs = x->value.shape();
  if (xs.size() != 3) throw DataError("global_avg_pool: rank must be 3");
  const int c_n = xs[0];
  const std::size_t hw = static_cast<std::size_t>(xs[1]) * xs[2];
  Tensor<T> out({c_n});
  for (int c = 0; c < c_n; ++c) {
    const T* src = x->value.data() + c * hw;
    double s = 0.0;
    for (std::size_t i = 0; i < hw; ++i) s += static_cast<double>(src[i]);
    out[c] = static_cast<T>(s / static_cast<double>(hw));
  }
  auto backward = [x, c_n, hw](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    for (int c = 0; c < c_n; ++c) {
      const T gv = self.grad[c] / static_cast<T>(hw);
      T* dst = dx.data() + c * hw;
      for (std::size_t i = 0; i < hw; ++i) dst[i] += gv;
    }
  };
  return make_op(std::move(out), {x}, backward);
}

template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b) {
  const auto& xs = x->value.shape();
  const auto& ws = w->value.shape();
  if (xs.size() != 1 || ws.size() != 2 || ws[1] != xs[0])
    throw DataError("linear: shape mismatch");
  if (b->value.shape() != std::vector<int>{ws[0]}) throw DataError("linear: bad bias shape");
  const int m = ws[0], n = ws[1];
  Tensor<T> out({m});
  for (int i = 0; i < m; ++i) {
    const T* row = w->value.data() + static_cast<std::size_t>(i) * n;
    double s = static_cast<double>(b->value[i]);
    for (int j = 0; j < n; ++j) s += static_cast<double>(row[j]) * x->value[j];
    out[i] = static_cast<T>(s);
  }
  auto backward = [x, w, b, m, n](Node<T>& self) {
    const T* g = self.grad.data();
    if (b->requires_grad) {
      Tensor<T>& db = ensure_grad(*b);
      for (int i = 0; i < m; ++i) db[i] += g[i];
    }
    if (w->requires_grad) {
      Tensor<T>& dw = ensure_grad(*w);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
          dw[static_cast<std::size_t>(i) * n + j] += g[i] * x->value[j];
    }
    if (x->requires_grad) {
      Tensor<T>& dx = ensure_grad(*x);
      for (int i = 0; i < m; ++i) {
        const T* row = w->value.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) dx[j] += g[i] * row[j];
      }
    }
  };
  return make_op(std::move(out), {x, w, b}, backward);
}

// Mean absolute difference against a fixed target.
template <typename T>
Var<T> l1_loss(const Var<T>& pred, const Tensor<T>& target) {
  require_same_shape(pred->value.shape(), target.shape(), "l1_loss");
  const std::size_t n = pred->value.numel();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += std::abs(static_cast<double>(pred->value[i]) - static_cast<double>(target[i]));
  Tensor<T> out({1}, static_cast<T>(s / static_cast<double>(n)));
  auto target_copy = std::make_shared<Tensor<T>>(target);
  auto backward = [pred, target_copy, n](Node<T>& self) {
    if (!pred->requires_grad) return;
    Tensor<T>& dp = ensure_grad(*pred);
    const T gv = self.grad[0] / static_cast<T>(n);
    const Tensor<T>& t = *target_copy;
    for (std::size_t i = 0; i < n; ++i) {
      const T d = pred->value[i] - t[i];
      if (d > T(0))
        dp[i] += gv;
      else if (d < T(0))
        dp[i] -= gv;
    }
  };
  return make_op(std::move(out), {pred}, backward);
}

// Softmax cross-entropy of a logit vector against an integer class label.
template <typename T>
Var<T> softmax_cross_entropy(const Var<T>& logits, int label) {
  const auto& ls = logits->value.shape();
  if (ls.size() != 1) throw DataError("softmax_cross_entropy: logits must be a vector");
  const int n = ls[0];
  if (label < 0 || label >= n) throw DataError("softmax_cross_entropy: label out of range");
  double mx = logits->value[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, static_cast<double>(logits->value[i]));
  double se = 0.0;
  for (int i = 0; i < n; ++i) se += std::exp(static_cast<double>(logits->value[i]) - mx);
  const double lse = mx + std::log(se);
  Tensor<T> out({1}, static_cast<T>(lse - static_cast<double>(logits->value[label])));
  auto backward = [logits, label, n, mx, se](Node<T>& self) {
    if (!logits->requires_grad) return;
    Tensor<T>& dl = ensure_grad(*logits);
    const T gv = self.grad[0];
    for (int i = 0; i < n; ++i) {
      const double p = std::exp(static_cast<double>(logits->value[i]) - mx) / se;
      dl[i] += gv * static_cast<T>(p - (i == label ? 1.0 : 0.0));
    }
  };
  return make_op(std::move(out), {logits}, backward);
}

// Mean over elements of softplus(sign * x). With sign = -1 this is
// -mean log sigmoid(x); with sign = +1 it is -mean log(1 - sigmoid(x)).
template <typename T>
Var<T> mean_softplus(const Var<T>& x, T sign) {
  const std::size_t n = x->value.numel();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += static_cast<double>(detail::softplus(sign * x->value[i]));
  Tensor<T> out({1}, static_cast<T>(s / static_cast<double>(n)));
  auto backward = [x, sign, n](Node<T>& self) {
    if (!x->requires_grad) return;
    Tensor<T>& dx = ensure_grad(*x);
    const T gv = self.grad[0] / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i)
      dx[i] += gv * sign * detail::stable_sigmoid(sign * x->value[i]);
  };
  return make_op(std::move(out), {x}, backward);
}

}  // namespace pano360::nn
