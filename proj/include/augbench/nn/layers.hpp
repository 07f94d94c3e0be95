#pragma once

// Layers with explicit forward caches. forward() is const and writes any state
// needed for backpropagation into a caller-owned cache, so a trained network
// can be shared across threads for inference (pass a null cache).

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <string>
#include <vector>

#include "augbench/nn/tensor.hpp"
#include "augbench/rng.hpp"

namespace augbench::nn {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  Parameter(std::string name_, int n, int c, int h, int w)
      : name(std::move(name_)), value(n, c, h, w), grad(n, c, h, w) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), T(0)); }
};

template <typename T>
using ParameterList = std::vector<Parameter<T>*>;

// Convolution geometry shared by im2col / col2im.
struct ConvGeometry {
  int channels, height, width;  // image side
  int kernel, stride, pad;
  int out_h, out_w;             // column side

  int rows() const { return channels * kernel * kernel; }
  int cols() const { return out_h * out_w; }
};

inline int conv_out_size(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

template <typename T>
void im2col(const T* img, const ConvGeometry& g, T* col) {
  const int hw = g.cols();
  for (int c = 0; c < g.channels; ++c) {
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        T* row = col + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          T* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= g.height) {
            std::fill(dst, dst + g.out_w, T(0));
            continue;
          }
          const T* src = img + (static_cast<std::size_t>(c) * g.height + iy) * g.width;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            dst[ox] = (ix >= 0 && ix < g.width) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

// Accumulates columns back into an image buffer (which must be pre-zeroed).
template <typename T>
void col2im(const T* col, const ConvGeometry& g, T* img) {
  const int hw = g.cols();
  for (int c = 0; c < g.channels; ++c) {
    for (int ky = 0; ky < g.kernel; ++ky) {
      for (int kx = 0; kx < g.kernel; ++kx) {
        const T* row = col + static_cast<std::size_t>((c * g.kernel + ky) * g.kernel + kx) * hw;
        for (int oy = 0; oy < g.out_h; ++oy) {
          const int iy = oy * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.height) continue;
          T* dst = img + (static_cast<std::size_t>(c) * g.height + iy) * g.width;
          const T* src = row + oy * g.out_w;
          for (int ox = 0; ox < g.out_w; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void init_normal(Tensor<T>& t, Rng& rng, double stddev) {
  for (auto& v : t.data) v = static_cast<T>(rng.normal(0.0, stddev));
}

template <typename T>
void init_uniform(Tensor<T>& t, Rng& rng, double bound) {
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(-bound, bound));
}

/// 2-D convolution, weight layout (out, in, k, k).
template <typename T>
class Conv2d {
 public:
  struct Cache {
    int batch = 0;
    int in_h = 0;
    int in_w = 0;
    AlignedVector<T> columns;
  };

  Conv2d() = default;
  Conv2d(int in_channels, int out_channels, int kernel, int stride, int pad, const std::string& name)
      : in_(in_channels),
        out_(out_channels),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        weight_(name + ".weight", out_channels, in_channels, kernel, kernel),
        bias_(name + ".bias", 1, out_channels, 1, 1) {}

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int kernel() const { return kernel_; }
  int stride() const { return stride_; }
  int pad() const { return pad_; }
  int output_size(int in) const { return conv_out_size(in, kernel_, stride_, pad_); }

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  const Parameter<T>& weight() const { return weight_; }
  const Parameter<T>& bias() const { return bias_; }

  void collect(ParameterList<T>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

  ConvGeometry geometry(int h, int w) const {
    return {in_, h, w, kernel_, stride_, pad_, output_size(h), output_size(w)};
  }

  Tensor<T> forward(const Tensor<T>& x, Cache* cache) const {
    if (x.c != in_) {
      throw ValidationError(weight_.name + ": expected " + std::to_string(in_) +
                            " input channels, got " + std::to_string(x.c));
    }
    const ConvGeometry g = geometry(x.h, x.w);
    Tensor<T> y(x.n, out_, g.out_h, g.out_w);
    const std::size_t col_size = static_cast<std::size_t>(g.rows()) * g.cols();
    AlignedVector<T> scratch;
    if (cache) {
      cache->batch = x.n;
      cache->in_h = x.h;
      cache->in_w = x.w;
      cache->columns.resize(col_size * x.n);
    } else {
      scratch.resize(col_size);
    }
    ConstMatrixMap<T> wmat(weight_.value.data.data(), out_, g.rows());
    Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> b(bias_.value.data.data(), out_);
    for (int i = 0; i < x.n; ++i) {
      T* col = cache ? cache->columns.data() + col_size * i : scratch.data();
      im2col(x.sample(i), g, col);
      MatrixMap<T> out(y.sample(i), out_, g.cols());
      out.noalias() = wmat * ConstMatrixMap<T>(col, g.rows(), g.cols());
      out.colwise() += b;
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out, const Cache& cache, bool input_grad = true) {
    const ConvGeometry g = geometry(cache.in_h, cache.in_w);
    const std::size_t col_size = static_cast<std::size_t>(g.rows()) * g.cols();
    MatrixMap<T> dw(weight_.grad.data.data(), out_, g.rows());
    ConstMatrixMap<T> wmat(weight_.value.data.data(), out_, g.rows());
    Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(bias_.grad.data.data(), out_);
    Tensor<T> dx;
    if (input_grad) dx = Tensor<T>(cache.batch, in_, cache.in_h, cache.in_w);
    RowMatrix<T> dcol;
    for (int i = 0; i < cache.batch; ++i) {
      ConstMatrixMap<T> dy(grad_out.sample(i), out_, g.cols());
      ConstMatrixMap<T> col(cache.columns.data() + col_size * i, g.rows(), g.cols());
      dw.noalias() += dy * col.transpose();
      db += dy.rowwise().sum();
      if (input_grad) {
        dcol.noalias() = wmat.transpose() * dy;
        col2im(dcol.data(), g, dx.sample(i));
      }
    }
    return dx;
  }

 private:
  int in_ = 0, out_ = 0, kernel_ = 1, stride_ = 1, pad_ = 0;
  Parameter<T> weight_;
  Parameter<T> bias_;
};

/// Transposed convolution (fractionally strided), weight layout (in, out, k, k).
template <typename T>
class ConvTranspose2d {
 public:
  struct Cache {
    Tensor<T> input;
  };

  ConvTranspose2d() = default;
  ConvTranspose2d(int in_channels, int out_channels, int kernel, int stride, int pad,
                  const std::string& name)
      : in_(in_channels),
        out_(out_channels),
        kernel_(kernel),
        stride_(stride),
        pad_(pad),
        weight_(name + ".weight", in_channels, out_channels, kernel, kernel),
        bias_(name + ".bias", 1, out_channels, 1, 1) {}

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  int output_size(int in) const { return (in - 1) * stride_ - 2 * pad_ + kernel_; }

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }

  void collect(ParameterList<T>& out) {
    out.push_back(&weight_);
    out.push_back(&bias_);
  }

  // Geometry of the equivalent forward convolution (output image -> input grid).
  ConvGeometry geometry(int in_h, int in_w) const {
    return {out_, output_size(in_h), output_size(in_w), kernel_, stride_, pad_, in_h, in_w};
  }

  Tensor<T> forward(const Tensor<T>& x, Cache* cache) const {
    if (x.c != in_) {
      throw ValidationError(weight_.name + ": expected " + std::to_string(in_) +
                            " input channels, got " + std::to_string(x.c));
    }
    const ConvGeometry g = geometry(x.h, x.w);
    Tensor<T> y(x.n, out_, g.height, g.width);
    ConstMatrixMap<T> wmat(weight_.value.data.data(), in_, g.rows());
    RowMatrix<T> col;
    for (int i = 0; i < x.n; ++i) {
      col.noalias() = wmat.transpose() * ConstMatrixMap<T>(x.sample(i), in_, g.cols());
      col2im(col.data(), g, y.sample(i));
      T* ys = y.sample(i);
      for (int c = 0; c < out_; ++c) {
        const T b = bias_.value.data[c];
        T* p = ys + y.plane() * c;
        for (std::size_t k = 0; k < y.plane(); ++k) p[k] += b;
      }
    }
    if (cache) cache->input = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out, const Cache& cache, bool input_grad = true) {
    const Tensor<T>& x = cache.input;
    const ConvGeometry g = geometry(x.h, x.w);
    ConstMatrixMap<T> wmat(weight_.value.data.data(), in_, g.rows());
    MatrixMap<T> dw(weight_.grad.data.data(), in_, g.rows());
    Tensor<T> dx;
    if (input_grad) dx = Tensor<T>(x.n, in_, x.h, x.w);
    RowMatrix<T> dcol(g.rows(), g.cols());
    for (int i = 0; i < x.n; ++i) {
      im2col(grad_out.sample(i), g, dcol.data());
      ConstMatrixMap<T> xi(x.sample(i), in_, g.cols());
      dw.noalias() += xi * dcol.transpose();
      const T* gs = grad_out.sample(i);
      for (int c = 0; c < out_; ++c) {
        T acc = 0;
        const T* p = gs + grad_out.plane() * c;
        for (std::size_t k = 0; k < grad_out.plane(); ++k) acc += p[k];
        bias_.grad.data[c] += acc;
      }
      if (input_grad) {
        MatrixMap<T>(dx.sample(i), in_, g.cols()).noalias() = wmat * dcol;
      }
    }
    return dx;
  }

 private:
  int in_ = 0, out_ = 0, kernel_ = 4, stride_ = 2, pad_ = 1;
  Parameter<T> weight_;
  Parameter<T> bias_;
};

/// Per-sample, per-channel normalisation with learned scale and shift.
template <typename T>
class InstanceNorm2d {
 public:
  static constexpr double kEps = 1e-5;

  struct Cache {
    Tensor<T> normalized;
    std::vector<T> inv_std;
  };

  InstanceNorm2d() = default;
  InstanceNorm2d(int channels, const std::string& name)
      : channels_(channels),
        gamma_(name + ".gamma", 1, channels, 1, 1),
        beta_(name + ".beta", 1, channels, 1, 1) {
    std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), T(1));
  }

  void collect(ParameterList<T>& out) {
    out.push_back(&gamma_);
    out.push_back(&beta_);
  }

  Tensor<T> forward(const Tensor<T>& x, Cache* cache) const {
    Tensor<T> y(x.n, x.c, x.h, x.w);
    const std::size_t hw = x.plane();
    if (cache) {
      cache->normalized = Tensor<T>(x.n, x.c, x.h, x.w);
      cache->inv_std.assign(static_cast<std::size_t>(x.n) * x.c, T(0));
    }
    for (int i = 0; i < x.n; ++i) {
      for (int c = 0; c < x.c; ++c) {
        const std::size_t off = (static_cast<std::size_t>(i) * x.c + c) * hw;
        const T* p = x.data.data() + off;
        T mean = 0;
        for (std::size_t k = 0; k < hw; ++k) mean += p[k];
        mean /= static_cast<T>(hw);
        T var = 0;
        for (std::size_t k = 0; k < hw; ++k) var += (p[k] - mean) * (p[k] - mean);
        var /= static_cast<T>(hw);
        const T inv = T(1) / std::sqrt(var + static_cast<T>(kEps));
        const T g = gamma_.value.data[c];
        const T b = beta_.value.data[c];
        for (std::size_t k = 0; k < hw; ++k) {
          const T xn = (p[k] - mean) * inv;
          y.data[off + k] = g * xn + b;
          if (cache) cache->normalized.data[off + k] = xn;
        }
        if (cache) cache->inv_std[static_cast<std::size_t>(i) * x.c + c] = inv;
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& grad_out, const Cache& cache) {
    const Tensor<T>& xn = cache.normalized;
    Tensor<T> dx(xn.n, xn.c, xn.h, xn.w);
    const std::size_t hw = xn.plane();
    const T m = static_cast<T>(hw);
    for (int i = 0; i < xn.n; ++i) {
      for (int c = 0; c < xn.c; ++c) {
        const std::size_t off = (static_cast<std::size_t>(i) * xn.c + c) * hw;
        const T g = gamma_.value.data[c];
        T sum_dy = 0, sum_dy_xn = 0;
        for (std::size_t k = 0; k < hw; ++k) {
          sum_dy += grad_out.data[off + k];
          sum_dy_xn += grad_out.data[off + k] * xn.data[off + k];
        }
        gamma_.grad.data[c] += sum_dy_xn;
        beta_.grad.data[c] += sum_dy;
        const T inv = cache.inv_std[static_cast<std::size_t>(i) * xn.c + c];
        for (std::size_t k = 0; k < hw; ++k) {
          dx.data[off + k] = g * inv / m *
                             (m * grad_out.data[off + k] - sum_dy - xn.data[off + k] * sum_dy_xn);
        }
      }
    }
    return dx;
  }

 private:
  int channels_ = 0;
  Parameter<T> gamma_;
  Parameter<T> beta_;
};

// Elementwise activations. Backward functions take the forward input (or
// output for tanh/sigmoid) rather than a cache object.

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = v > T(0) ? v : v * slope;
  return y;
}

template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& grad, const Tensor<T>& input, T slope) {
  Tensor<T> dx = grad;
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (!(input.data[i] > T(0))) dx.data[i] *= slope;
  }
  return dx;
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  return leaky_relu(x, T(0));
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& grad, const Tensor<T>& input) {
  return leaky_relu_backward(grad, input, T(0));
}

template <typename T>
Tensor<T> tanh(const Tensor<T>& x) {
  Tensor<T> y = x;
  for (auto& v : y.data) v = std::tanh(v);
  return y;
}

template <typename T>
Tensor<T> tanh_backward(const Tensor<T>& grad, const Tensor<T>& output) {
  Tensor<T> dx = grad;
  for (std::size_t i = 0; i < dx.size(); ++i) dx.data[i] *= T(1) - output.data[i] * output.data[i];
  return dx;
}

template <typename T>
T sigmoid(T x) {
  return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

/// 2x2 max pooling, stride 2 (odd trailing rows/columns are dropped).
template <typename T>
struct MaxPool2x2 {
  struct Cache {
    int in_h = 0, in_w = 0;
    std::vector<std::uint32_t> argmax;
  };

  static Tensor<T> forward(const Tensor<T>& x, Cache* cache) {
    Tensor<T> y(x.n, x.c, x.h / 2, x.w / 2);
    if (cache) {
      cache->in_h = x.h;
      cache->in_w = x.w;
      cache->argmax.resize(y.size());
    }
    std::size_t o = 0;
    for (int i = 0; i < x.n; ++i) {
      for (int c = 0; c < x.c; ++c) {
        const std::size_t base = (static_cast<std::size_t>(i) * x.c + c) * x.plane();
        for (int oy = 0; oy < y.h; ++oy) {
          for (int ox = 0; ox < y.w; ++ox, ++o) {
            std::size_t best = base + static_cast<std::size_t>(2 * oy) * x.w + 2 * ox;
            for (int dy = 0; dy < 2; ++dy) {
              for (int dx = 0; dx < 2; ++dx) {
                const std::size_t k = base + static_cast<std::size_t>(2 * oy + dy) * x.w + 2 * ox + dx;
                if (x.data[k] > x.data[best]) best = k;
              }
            }
            y.data[o] = x.data[best];
            if (cache) cache->argmax[o] = static_cast<std::uint32_t>(best);
          }
        }
      }
    }
    return y;
  }

  static Tensor<T> backward(const Tensor<T>& grad, const Cache& cache) {
    Tensor<T> dx(grad.n, grad.c, cache.in_h, cache.in_w);
    for (std::size_t o = 0; o < grad.size(); ++o) dx.data[cache.argmax[o]] += grad.data[o];
    return dx;
  }
};

template <typename T>
Tensor<T> global_average_pool(const Tensor<T>& x) {
  Tensor<T> y(x.n, x.c, 1, 1);
  const std::size_t hw = x.plane();
  for (std::size_t k = 0; k < y.size(); ++k) {
    T acc = 0;
    const T* p = x.data.data() + k * hw;
    for (std::size_t j = 0; j < hw; ++j) acc += p[j];
    y.data[k] = acc / static_cast<T>(hw);
  }
  return y;
}

template <typename T>
Tensor<T> global_average_pool_backward(const Tensor<T>& grad, int h, int w) {
  Tensor<T> dx(grad.n, grad.c, h, w);
  const std::size_t hw = dx.plane();
  for (std::size_t k = 0; k < grad.size(); ++k) {
    const T g = grad.data[k] / static_cast<T>(hw);
    std::fill(dx.data.begin() + k * hw, dx.data.begin() + (k + 1) * hw, g);
  }
  return dx;
}

template <typename T>
std::size_t parameter_count(const ParameterList<T>& params) {
  std::size_t total = 0;
  for (const auto* p : params) total += p->value.size();
  return total;
}

}  // namespace augbench::nn
