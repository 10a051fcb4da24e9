#include "nn/layers.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "core/rng.hpp"
#include "kern/kernels.hpp"
#include "nn/im2col.hpp"

namespace framecast::nn {

namespace {

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Param make_param(const std::string& name, Shape s, int fan_in, double gain, uint64_t seed) {
  Param p;
  p.name = name;
  p.value = he_normal(s, fan_in, gain, seed, name);
  p.grad = Tensor::zeros(s);
  return p;
}

Param make_bias(const std::string& name, int n) {
  Param p;
  p.name = name;
  p.value = Tensor::zeros(Shape{n});
  p.grad = Tensor::zeros(Shape{n});
  return p;
}

}  // namespace

Tensor he_normal(Shape s, int fan_in, double gain, uint64_t seed, const std::string& name) {
  Tensor t(s);
  if (gain == 0.0) return t;
  Rng rng = Rng::derived(seed, name);
  const double std = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
  for (float& x : t.v) x = static_cast<float>(rng.normal() * std);
  return t;
}

// ===== Conv2d =====

Conv2d::Conv2d(std::string name, int cin, int cout, int k, int pad, uint64_t seed, double init_gain)
    : name_(std::move(name)), cin_(cin), cout_(cout), k_(k), pad_(pad) {
  require(cin > 0 && cout > 0 && k > 0 && pad >= 0, "Conv2d: bad geometry");
  w_ = make_param(name_ + ".w", Shape{cout, cin * k * k}, cin * k * k, init_gain, seed);
  b_ = make_bias(name_ + ".b", cout);
}

Tensor Conv2d::forward(const Tensor& x) {
  require(x.shape.rank == 4, "Conv2d: expected (N,C,H,W)");
  require(x.shape[1] == cin_, "Conv2d: channel mismatch");
  const int n = x.shape[0], h = x.shape[2], w = x.shape[3];
  const int ho = h + 2 * pad_ - k_ + 1, wo = w + 2 * pad_ - k_ + 1;
  require(ho > 0 && wo > 0, "Conv2d: kernel larger than padded input");
  x_ = x;
  const size_t pos = static_cast<size_t>(ho) * wo;
  cols_.resize(static_cast<size_t>(cin_) * k_ * k_ * pos);
  Tensor y(Shape{n, cout_, ho, wo});
  const size_t xs = static_cast<size_t>(cin_) * h * w;
  const size_t ys = static_cast<size_t>(cout_) * pos;
  for (int i = 0; i < n; ++i) {
    im2col_2d(x.data() + i * xs, cin_, h, w, k_, pad_, cols_.data());
    kern::gemm_nn(cout_, static_cast<int>(pos), cin_ * k_ * k_, w_.value.data(), cols_.data(),
                  y.data() + i * ys, false);
    float* yp = y.data() + i * ys;
    for (int co = 0; co < cout_; ++co) {
      const float bv = b_.value.v[static_cast<size_t>(co)];
      if (bv != 0.0f)
        for (size_t q = 0; q < pos; ++q) yp[co * pos + q] += bv;
    }
  }
  return y;
}

Tensor Conv2d::backward(const Tensor& dy, bool accumulate_param_grads) {
  const int n = x_.shape[0], h = x_.shape[2], w = x_.shape[3];
  const int ho = dy.shape[2], wo = dy.shape[3];
  const size_t pos = static_cast<size_t>(ho) * wo;
  const size_t xs = static_cast<size_t>(cin_) * h * w;
  const size_t ys = static_cast<size_t>(cout_) * pos;
  Tensor dx(x_.shape);
  std::vector<float> dcols(static_cast<size_t>(cin_) * k_ * k_ * pos);
  for (int i = 0; i < n; ++i) {
    const float* dyp = dy.data() + i * ys;
    if (accumulate_param_grads) {
      im2col_2d(x_.data() + i * xs, cin_, h, w, k_, pad_, cols_.data());
      kern::gemm_nt(cout_, cin_ * k_ * k_, static_cast<int>(pos), dyp, cols_.data(),
                    w_.grad.data(), true);
      for (int co = 0; co < cout_; ++co)
        b_.grad.v[static_cast<size_t>(co)] +=
            static_cast<float>(kern::sum(dyp + co * pos, pos));
    }
    kern::gemm_tn(cin_ * k_ * k_, static_cast<int>(pos), cout_, w_.value.data(), dyp, dcols.data(),
                  false);
    col2im_2d(dcols.data(), cin_, h, w, k_, pad_, dx.data() + i * xs);
  }
  return dx;
}

void Conv2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

void Conv2d::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "conv2d",
                 std::to_string(cin_) + "->" + std::to_string(cout_) + " k" + std::to_string(k_) +
                     " p" + std::to_string(pad_)});
}

// ===== Conv3d =====

Conv3d::Conv3d(std::string name, int cin, int cout, int kt, int k, int pt, int pad, uint64_t seed,
               double init_gain)
    : name_(std::move(name)), cin_(cin), cout_(cout), kt_(kt), k_(k), pt_(pt), pad_(pad) {
  require(cin > 0 && cout > 0 && kt > 0 && k > 0 && pt >= 0 && pad >= 0, "Conv3d: bad geometry");
  const int fan = cin * kt * k * k;
  w_ = make_param(name_ + ".w", Shape{cout, fan}, fan, init_gain, seed);
  b_ = make_bias(name_ + ".b", cout);
}

Tensor Conv3d::forward(const Tensor& x) {
  require(x.shape.rank == 5, "Conv3d: expected (N,C,T,H,W)");
  require(x.shape[1] == cin_, "Conv3d: channel mismatch");
  const int n = x.shape[0], t = x.shape[2], h = x.shape[3], w = x.shape[4];
  const int to = t + 2 * pt_ - kt_ + 1, ho = h + 2 * pad_ - k_ + 1, wo = w + 2 * pad_ - k_ + 1;
  require(to > 0 && ho > 0 && wo > 0, "Conv3d: kernel larger than padded input");
  x_ = x;
  const size_t pos = static_cast<size_t>(to) * ho * wo;
  const int fan = cin_ * kt_ * k_ * k_;
  cols_.resize(static_cast<size_t>(fan) * pos);
  Tensor y(Shape{n, cout_, to, ho, wo});
  const size_t xs = static_cast<size_t>(cin_) * t * h * w;
  const size_t ys = static_cast<size_t>(cout_) * pos;
  for (int i = 0; i < n; ++i) {
    im2col_3d(x.data() + i * xs, cin_, t, h, w, kt_, k_, pt_, pad_, cols_.data());
    kern::gemm_nn(cout_, static_cast<int>(pos), fan, w_.value.data(), cols_.data(),
                  y.data() + i * ys, false);
    float* yp = y.data() + i * ys;
    for (int co = 0; co < cout_; ++co) {
      const float bv = b_.value.v[static_cast<size_t>(co)];
      if (bv != 0.0f)
        for (size_t q = 0; q < pos; ++q) yp[co * pos + q] += bv;
    }
  }
  return y;
}

Tensor Conv3d::backward(const Tensor& dy, bool accumulate_param_grads) {
  const int n = x_.shape[0], t = x_.shape[2], h = x_.shape[3], w = x_.shape[4];
  const int to = dy.shape[2], ho = dy.shape[3], wo = dy.shape[4];
  const size_t pos = static_cast<size_t>(to) * ho * wo;
  const int fan = cin_ * kt_ * k_ * k_;
  const size_t xs = static_cast<size_t>(cin_) * t * h * w;
  const size_t ys = static_cast<size_t>(cout_) * pos;
  Tensor dx(x_.shape);
  std::vector<float> dcols(static_cast<size_t>(fan) * pos);
  for (int i = 0; i < n; ++i) {
    const float* dyp = dy.data() + i * ys;
    if (accumulate_param_grads) {
      im2col_3d(x_.data() + i * xs, cin_, t, h, w, kt_, k_, pt_, pad_, cols_.data());
      kern::gemm_nt(cout_, fan, static_cast<int>(pos), dyp, cols_.data(), w_.grad.data(), true);
      for (int co = 0; co < cout_; ++co)
        b_.grad.v[static_cast<size_t>(co)] +=
            static_cast<float>(kern::sum(dyp + co * pos, pos));
    }
    kern::gemm_tn(fan, static_cast<int>(pos), cout_, w_.value.data(), dyp, dcols.data(), false);
    col2im_3d(dcols.data(), cin_, t, h, w, kt_, k_, pt_, pad_, dx.data() + i * xs);
  }
  return dx;
}

void Conv3d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

void Conv3d::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "conv3d",
                 std::to_string(cin_) + "->" + std::to_string(cout_) + " k" + std::to_string(kt_) +
                     "x" + std::to_string(k_) + "x" + std::to_string(k_)});
}

// ===== ConvTranspose2d =====

ConvTranspose2d::ConvTranspose2d(std::string name, int cin, int cout, int k, int stride, int pad,
                                 int outpad, uint64_t seed, double init_gain)
    : name_(std::move(name)),
      cin_(cin),
      cout_(cout),
      k_(k),
      stride_(stride),
      pad_(pad),
      outpad_(outpad) {
  require(cin > 0 && cout > 0 && k > 0 && stride > 0 && pad >= 0 && outpad >= 0,
          "ConvTranspose2d: bad geometry");
  require(outpad < stride, "ConvTranspose2d: outpad must be < stride");
  w_ = make_param(name_ + ".w", Shape{cin, cout * k * k}, cin * k * k, init_gain, seed);
  b_ = make_bias(name_ + ".b", cout);
}

Tensor ConvTranspose2d::forward(const Tensor& x) {
  require(x.shape.rank == 4, "ConvTranspose2d: expected (N,C,H,W)");
  require(x.shape[1] == cin_, "ConvTranspose2d: channel mismatch");
  const int n = x.shape[0], h = x.shape[2], w = x.shape[3];
  const int ho = (h - 1) * stride_ - 2 * pad_ + k_ + outpad_;
  const int wo = (w - 1) * stride_ - 2 * pad_ + k_ + outpad_;
  require(ho > 0 && wo > 0, "ConvTranspose2d: empty output");
  x_ = x;
  const size_t posi = static_cast<size_t>(h) * w;
  const int rows = cout_ * k_ * k_;
  cols_.resize(static_cast<size_t>(rows) * posi);
  Tensor y(Shape{n, cout_, ho, wo});
  const size_t xs = static_cast<size_t>(cin_) * posi;
  const size_t ys = static_cast<size_t>(cout_) * ho * wo;
  for (int i = 0; i < n; ++i) {
    // cols = W^T x, then scatter each tap onto the strided output grid.
    kern::gemm_tn(rows, static_cast<int>(posi), cin_, w_.value.data(), x.data() + i * xs,
                  cols_.data(), false);
    float* yp = y.data() + i * ys;
    std::memset(yp, 0, sizeof(float) * ys);
    for (int co = 0; co < cout_; ++co) {
      float* plane = yp + static_cast<size_t>(co) * ho * wo;
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const float* crow = cols_.data() + (static_cast<size_t>(co) * k_ * k_ +
                                              static_cast<size_t>(ky) * k_ + kx) *
                                                 posi;
          for (int iy = 0; iy < h; ++iy) {
            const int oy = iy * stride_ - pad_ + ky;
            if (oy < 0 || oy >= ho) continue;
            float* orow = plane + static_cast<size_t>(oy) * wo;
            const float* cr = crow + static_cast<size_t>(iy) * w;
            for (int ix = 0; ix < w; ++ix) {
              const int ox = ix * stride_ - pad_ + kx;
              if (ox >= 0 && ox < wo) orow[ox] += cr[ix];
            }
          }
        }
      }
      const float bv = b_.value.v[static_cast<size_t>(co)];
      if (bv != 0.0f)
        for (size_t q = 0; q < static_cast<size_t>(ho) * wo; ++q) plane[q] += bv;
    }
  }
  return y;
}

Tensor ConvTranspose2d::backward(const Tensor& dy, bool accumulate_param_grads) {
  const int n = x_.shape[0], h = x_.shape[2], w = x_.shape[3];
  const int ho = dy.shape[2], wo = dy.shape[3];
  const size_t posi = static_cast<size_t>(h) * w;
  const int rows = cout_ * k_ * k_;
  const size_t xs = static_cast<size_t>(cin_) * posi;
  const size_t ys = static_cast<size_t>(cout_) * ho * wo;
  Tensor dx(x_.shape);
  std::vector<float> dcols(static_cast<size_t>(rows) * posi);
  for (int i = 0; i < n; ++i) {
    const float* dyp = dy.data() + i * ys;
    // Gather: dcols is dy sampled at each tap's output location.
    for (int co = 0; co < cout_; ++co) {
      const float* plane = dyp + static_cast<size_t>(co) * ho * wo;
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          float* crow = dcols.data() + (static_cast<size_t>(co) * k_ * k_ +
                                        static_cast<size_t>(ky) * k_ + kx) *
                                           posi;
          for (int iy = 0; iy < h; ++iy) {
            const int oy = iy * stride_ - pad_ + ky;
            float* cr = crow + static_cast<size_t>(iy) * w;
            if (oy < 0 || oy >= ho) {
              std::memset(cr, 0, sizeof(float) * static_cast<size_t>(w));
              continue;
            }
            const float* orow = plane + static_cast<size_t>(oy) * wo;
            for (int ix = 0; ix < w; ++ix) {
              const int ox = ix * stride_ - pad_ + kx;
              cr[ix] = (ox >= 0 && ox < wo) ? orow[ox] : 0.0f;
            }
          }
        }
      }
      if (accumulate_param_grads)
        b_.grad.v[static_cast<size_t>(co)] +=
            static_cast<float>(kern::sum(plane, static_cast<size_t>(ho) * wo));
    }
    if (accumulate_param_grads)
      kern::gemm_nt(cin_, rows, static_cast<int>(posi), x_.data() + i * xs, dcols.data(),
                    w_.grad.data(), true);
    kern::gemm_nn(cin_, static_cast<int>(posi), rows, w_.value.data(), dcols.data(),
                  dx.data() + i * xs, false);
  }
  return dx;
}

void ConvTranspose2d::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

void ConvTranspose2d::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "conv_transpose2d",
                 std::to_string(cin_) + "->" + std::to_string(cout_) + " k" + std::to_string(k_) +
                     " s" + std::to_string(stride_)});
}

// ===== Flatten / Dense =====

Tensor Flatten::forward(const Tensor& x) {
  require(x.shape.rank >= 2, "Flatten: expected batched input");
  in_shape_ = x.shape;
  const int n = x.shape[0];
  const int rest = static_cast<int>(x.numel() / n);
  return x.reshaped(Shape{n, rest});
}

Tensor Flatten::backward(const Tensor& dy, bool) { return dy.reshaped(in_shape_); }

void Flatten::describe(std::vector<LayerInfo>& out) const { out.push_back({name_, "flatten", ""}); }

Dense::Dense(std::string name, int in, int out, uint64_t seed, double init_gain)
    : name_(std::move(name)), in_(in), out_(out) {
  require(in > 0 && out > 0, "Dense: bad dims");
  w_ = make_param(name_ + ".w", Shape{out, in}, in, init_gain, seed);
  b_ = make_bias(name_ + ".b", out);
}

Tensor Dense::forward(const Tensor& x) {
  require(x.shape.rank == 2 && x.shape[1] == in_, "Dense: shape mismatch");
  x_ = x;
  const int n = x.shape[0];
  Tensor y(Shape{n, out_});
  kern::gemm_nt(n, out_, in_, x.data(), w_.value.data(), y.data(), false);
  for (int i = 0; i < n; ++i)
    for (int o = 0; o < out_; ++o) y.v[static_cast<size_t>(i) * out_ + o] += b_.value.v[o];
  return y;
}

Tensor Dense::backward(const Tensor& dy, bool accumulate_param_grads) {
  const int n = x_.shape[0];
  if (accumulate_param_grads) {
    kern::gemm_tn(out_, in_, n, dy.data(), x_.data(), w_.grad.data(), true);
    for (int i = 0; i < n; ++i)
      for (int o = 0; o < out_; ++o) b_.grad.v[o] += dy.v[static_cast<size_t>(i) * out_ + o];
  }
  Tensor dx(x_.shape);
  kern::gemm_nn(n, in_, out_, dy.data(), w_.value.data(), dx.data(), false);
  return dx;
}

void Dense::collect_params(std::vector<Param*>& out) {
  out.push_back(&w_);
  out.push_back(&b_);
}

void Dense::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "dense", std::to_string(in_) + "->" + std::to_string(out_)});
}

// ===== activations =====

Tensor LeakyReLU::forward(const Tensor& x) {
  x_ = x;
  Tensor y(x.shape);
  kern::leaky_relu(x.data(), y.data(), x.v.size(), slope_);
  return y;
}

Tensor LeakyReLU::backward(const Tensor& dy, bool) {
  Tensor dx(x_.shape);
  kern::leaky_relu_grad(x_.data(), dy.data(), dx.data(), dx.v.size(), slope_);
  return dx;
}

void LeakyReLU::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, slope_ == 0.0f ? "relu" : "leaky_relu",
                 slope_ == 0.0f ? "" : "slope " + std::to_string(slope_)});
}

Tensor Tanh::forward(const Tensor& x) {
  Tensor y(x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) y.v[i] = std::tanh(x.v[i]);
  y_ = y;
  return y;
}

Tensor Tanh::backward(const Tensor& dy, bool) {
  Tensor dx(y_.shape);
  for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] = dy.v[i] * (1.0f - y_.v[i] * y_.v[i]);
  return dx;
}

void Tanh::describe(std::vector<LayerInfo>& out) const { out.push_back({name_, "tanh", ""}); }

Tensor Sigmoid::forward(const Tensor& x) {
  Tensor y(x.shape);
  for (size_t i = 0; i < x.v.size(); ++i) y.v[i] = 1.0f / (1.0f + std::exp(-x.v[i]));
  y_ = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& dy, bool) {
  Tensor dx(y_.shape);
  for (size_t i = 0; i < dx.v.size(); ++i) dx.v[i] = dy.v[i] * y_.v[i] * (1.0f - y_.v[i]);
  return dx;
}

void Sigmoid::describe(std::vector<LayerInfo>& out) const { out.push_back({name_, "sigmoid", ""}); }

// ===== resampling =====

namespace {

struct SpatialDims {
  int outer;  // N*C or N*C*T
  int h, w;
};

SpatialDims spatial_dims(const Shape& s, const char* who) {
  require(s.rank == 4 || s.rank == 5, who);
  SpatialDims d;
  d.h = s[s.rank - 2];
  d.w = s[s.rank - 1];
  d.outer = 1;
  for (int i = 0; i + 2 < s.rank; ++i) d.outer *= s[i];
  return d;
}

Shape with_spatial(const Shape& s, int h, int w) {
  Shape o = s;
  o.d[static_cast<size_t>(s.rank - 2)] = h;
  o.d[static_cast<size_t>(s.rank - 1)] = w;
  return o;
}

}  // namespace

Tensor avgpool_spatial2(const Tensor& x) {
  const SpatialDims d = spatial_dims(x.shape, "avgpool: expected rank 4 or 5");
  require(d.h % 2 == 0 && d.w % 2 == 0, "avgpool: H and W must be even");
  const int ho = d.h / 2, wo = d.w / 2;
  Tensor y(with_spatial(x.shape, ho, wo));
  for (int o = 0; o < d.outer; ++o) {
    const float* ip = x.data() + static_cast<size_t>(o) * d.h * d.w;
    float* op = y.data() + static_cast<size_t>(o) * ho * wo;
    for (int yy = 0; yy < ho; ++yy)
      for (int xx = 0; xx < wo; ++xx) {
        const float* r0 = ip + static_cast<size_t>(2 * yy) * d.w + 2 * xx;
        const float* r1 = r0 + d.w;
        op[static_cast<size_t>(yy) * wo + xx] = 0.25f * (r0[0] + r0[1] + r1[0] + r1[1]);
      }
  }
  return y;
}

Tensor nn_upsample_spatial2(const Tensor& x) {
  const SpatialDims d = spatial_dims(x.shape, "nn_upsample: expected rank 4 or 5");
  const int ho = d.h * 2, wo = d.w * 2;
  Tensor y(with_spatial(x.shape, ho, wo));
  for (int o = 0; o < d.outer; ++o) {
    const float* ip = x.data() + static_cast<size_t>(o) * d.h * d.w;
    float* op = y.data() + static_cast<size_t>(o) * ho * wo;
    for (int yy = 0; yy < d.h; ++yy) {
      float* row0 = op + static_cast<size_t>(2 * yy) * wo;
      float* row1 = row0 + wo;
      const float* ir = ip + static_cast<size_t>(yy) * d.w;
      for (int xx = 0; xx < d.w; ++xx) {
        const float v = ir[xx];
        row0[2 * xx] = v;
        row0[2 * xx + 1] = v;
        row1[2 * xx] = v;
        row1[2 * xx + 1] = v;
      }
    }
  }
  return y;
}

Tensor avgpool_spatial2_backward(const Tensor& dy, const Shape& in_shape) {
  const SpatialDims d = spatial_dims(in_shape, "avgpool");
  const int ho = d.h / 2, wo = d.w / 2;
  Tensor dx(in_shape);
  for (int o = 0; o < d.outer; ++o) {
    float* ip = dx.data() + static_cast<size_t>(o) * d.h * d.w;
    const float* op = dy.data() + static_cast<size_t>(o) * ho * wo;
    for (int yy = 0; yy < ho; ++yy)
      for (int xx = 0; xx < wo; ++xx) {
        const float g = 0.25f * op[static_cast<size_t>(yy) * wo + xx];
        float* r0 = ip + static_cast<size_t>(2 * yy) * d.w + 2 * xx;
        float* r1 = r0 + d.w;
        r0[0] = g;
        r0[1] = g;
        r1[0] = g;
        r1[1] = g;
      }
  }
  return dx;
}

Tensor AvgPoolSpatial::forward(const Tensor& x) {
  in_shape_ = x.shape;
  return avgpool_spatial2(x);
}

Tensor AvgPoolSpatial::backward(const Tensor& dy, bool) {
  return avgpool_spatial2_backward(dy, in_shape_);
}

void AvgPoolSpatial::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "avg_pool2", "2x2 s2"});
}

Tensor MaxPool2d::forward(const Tensor& x) {
  require(x.shape.rank == 4, "MaxPool2d: expected (N,C,H,W)");
  in_shape_ = x.shape;
  const int outer = x.shape[0] * x.shape[1], h = x.shape[2], w = x.shape[3];
  const int ho = h / 2, wo = w / 2;
  require(ho > 0 && wo > 0, "MaxPool2d: input too small");
  Tensor y(Shape{x.shape[0], x.shape[1], ho, wo});
  argmax_.assign(y.v.size(), 0);
  for (int o = 0; o < outer; ++o) {
    const float* ip = x.data() + static_cast<size_t>(o) * h * w;
    const size_t base = static_cast<size_t>(o) * h * w;
    for (int yy = 0; yy < ho; ++yy)
      for (int xx = 0; xx < wo; ++xx) {
        size_t best = base + static_cast<size_t>(2 * yy) * w + 2 * xx;
        float bv = ip[static_cast<size_t>(2 * yy) * w + 2 * xx];
        const int cand[3][2] = {{2 * yy, 2 * xx + 1}, {2 * yy + 1, 2 * xx}, {2 * yy + 1, 2 * xx + 1}};
        for (auto& c : cand) {
          if (c[0] >= h || c[1] >= w) continue;
          const float v = ip[static_cast<size_t>(c[0]) * w + c[1]];
          if (v > bv) {
            bv = v;
            best = base + static_cast<size_t>(c[0]) * w + c[1];
          }
        }
        const size_t oi = static_cast<size_t>(o) * ho * wo + static_cast<size_t>(yy) * wo + xx;
        y.v[oi] = bv;
        argmax_[oi] = static_cast<int64_t>(best);
      }
  }
  return y;
}

Tensor MaxPool2d::backward(const Tensor& dy, bool) {
  Tensor dx(in_shape_);
  for (size_t i = 0; i < dy.v.size(); ++i) dx.v[static_cast<size_t>(argmax_[i])] += dy.v[i];
  return dx;
}

void MaxPool2d::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "max_pool2", "2x2 s2"});
}

Tensor nn_upsample_spatial2_backward(const Tensor& dy) {
  const SpatialDims up = spatial_dims(dy.shape, "nn_upsample");
  require(up.h % 2 == 0 && up.w % 2 == 0, "nn_upsample backward: H and W must be even");
  const Shape in_shape = with_spatial(dy.shape, up.h / 2, up.w / 2);
  const SpatialDims d = spatial_dims(in_shape, "nn_upsample");
  const int wo = up.w;
  Tensor dx(in_shape);
  for (int o = 0; o < d.outer; ++o) {
    float* ip = dx.data() + static_cast<size_t>(o) * d.h * d.w;
    const float* op = dy.data() + static_cast<size_t>(o) * up.h * up.w;
    for (int yy = 0; yy < d.h; ++yy) {
      const float* row0 = op + static_cast<size_t>(2 * yy) * wo;
      const float* row1 = row0 + wo;
      float* ir = ip + static_cast<size_t>(yy) * d.w;
      for (int xx = 0; xx < d.w; ++xx)
        ir[xx] = row0[2 * xx] + row0[2 * xx + 1] + row1[2 * xx] + row1[2 * xx + 1];
    }
  }
  return dx;
}

Tensor NNUpsampleSpatial::forward(const Tensor& x) { return nn_upsample_spatial2(x); }

Tensor NNUpsampleSpatial::backward(const Tensor& dy, bool) {
  return nn_upsample_spatial2_backward(dy);
}

void NNUpsampleSpatial::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "nn_upsample2", "2x nearest"});
}

// ===== PixelNorm =====

namespace {

struct ChannelDims {
  int n, c;
  size_t inner;  // T*H*W or H*W
};

ChannelDims channel_dims(const Shape& s) {
  require(s.rank >= 3, "PixelNorm: expected rank >= 3");
  ChannelDims d;
  d.n = s[0];
  d.c = s[1];
  d.inner = 1;
  for (int i = 2; i < s.rank; ++i) d.inner *= static_cast<size_t>(s[i]);
  return d;
}

}  // namespace

Tensor PixelNorm::forward(const Tensor& x) {
  const ChannelDims d = channel_dims(x.shape);
  x_ = x;
  Tensor y(x.shape);
  for (int i = 0; i < d.n; ++i) {
    const float* xb = x.data() + static_cast<size_t>(i) * d.c * d.inner;
    float* yb = y.data() + static_cast<size_t>(i) * d.c * d.inner;
    for (size_t q = 0; q < d.inner; ++q) {
      float m = 0.0f;
      for (int c = 0; c < d.c; ++c) {
        const float v = xb[static_cast<size_t>(c) * d.inner + q];
        m += v * v;
      }
      const float inv = 1.0f / std::sqrt(m / static_cast<float>(d.c) + eps_);
      for (int c = 0; c < d.c; ++c)
        yb[static_cast<size_t>(c) * d.inner + q] = xb[static_cast<size_t>(c) * d.inner + q] * inv;
    }
  }
  return y;
}

Tensor PixelNorm::backward(const Tensor& dy, bool) {
  const ChannelDims d = channel_dims(x_.shape);
  Tensor dx(x_.shape);
  for (int i = 0; i < d.n; ++i) {
    const float* xb = x_.data() + static_cast<size_t>(i) * d.c * d.inner;
    const float* gb = dy.data() + static_cast<size_t>(i) * d.c * d.inner;
    float* ob = dx.data() + static_cast<size_t>(i) * d.c * d.inner;
    for (size_t q = 0; q < d.inner; ++q) {
      float m = 0.0f, s = 0.0f;
      for (int c = 0; c < d.c; ++c) {
        const float v = xb[static_cast<size_t>(c) * d.inner + q];
        m += v * v;
        s += gb[static_cast<size_t>(c) * d.inner + q] * v;
      }
      const float msq = m / static_cast<float>(d.c) + eps_;
      const float inv = 1.0f / std::sqrt(msq);
      const float corr = s / (static_cast<float>(d.c) * msq);
      for (int c = 0; c < d.c; ++c) {
        const size_t ix = static_cast<size_t>(c) * d.inner + q;
        ob[ix] = (gb[ix] - xb[ix] * corr) * inv;
      }
    }
  }
  return dx;
}

void PixelNorm::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "pixel_norm", ""});
}

// ===== MeanReduce =====

Tensor MeanReduce::forward(const Tensor& x) {
  require(x.shape.rank >= 2, "MeanReduce: expected batched input");
  in_shape_ = x.shape;
  const int n = x.shape[0];
  const size_t inner = static_cast<size_t>(x.numel() / n);
  Tensor y(Shape{n, 1});
  for (int i = 0; i < n; ++i)
    y.v[static_cast<size_t>(i)] =
        static_cast<float>(kern::sum(x.data() + i * inner, inner) / static_cast<double>(inner));
  return y;
}

Tensor MeanReduce::backward(const Tensor& dy, bool) {
  const int n = in_shape_[0];
  const size_t inner = static_cast<size_t>(in_shape_.numel() / n);
  Tensor dx(in_shape_);
  for (int i = 0; i < n; ++i) {
    const float g = dy.v[static_cast<size_t>(i)] / static_cast<float>(inner);
    float* p = dx.data() + i * inner;
    for (size_t q = 0; q < inner; ++q) p[q] = g;
  }
  return dx;
}

void MeanReduce::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "mean_reduce", "global mean"});
}

// ===== composites =====

Tensor Sequential::forward(const Tensor& x) {
  Tensor h = x;
  for (auto& m : children_) h = m->forward(h);
  return h;
}

Tensor Sequential::backward(const Tensor& dy, bool accumulate_param_grads) {
  Tensor g = dy;
  for (auto it = children_.rbegin(); it != children_.rend(); ++it)
    g = (*it)->backward(g, accumulate_param_grads);
  return g;
}

void Sequential::collect_params(std::vector<Param*>& out) {
  for (auto& m : children_) m->collect_params(out);
}

void Sequential::describe(std::vector<LayerInfo>& out) const {
  for (auto& m : children_) m->describe(out);
}

Tensor ResidualBlock::forward(const Tensor& x) {
  Tensor y = inner_->forward(x);
  require(y.shape == x.shape, "ResidualBlock: inner must preserve shape");
  kern::add(y.data(), x.data(), y.data(), y.v.size());
  return y;
}

Tensor ResidualBlock::backward(const Tensor& dy, bool accumulate_param_grads) {
  Tensor dx = inner_->backward(dy, accumulate_param_grads);
  kern::add(dx.data(), dy.data(), dx.data(), dx.v.size());
  return dx;
}

void ResidualBlock::collect_params(std::vector<Param*>& out) { inner_->collect_params(out); }

void ResidualBlock::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "residual_block", "skip over:"});
  inner_->describe(out);
}

Tensor GlobalPixelResidual::forward(const Tensor& x) {
  Tensor r = inner_->forward(x);
  require(r.shape == x.shape, "GlobalPixelResidual: inner must preserve shape");
  pre_ = Tensor(x.shape);
  kern::add(x.data(), r.data(), pre_.data(), pre_.v.size());
  Tensor y(x.shape);
  kern::clamp01(pre_.data(), y.data(), y.v.size());
  return y;
}

Tensor GlobalPixelResidual::backward(const Tensor& dy, bool accumulate_param_grads) {
  Tensor dpre(pre_.shape);
  for (size_t i = 0; i < dpre.v.size(); ++i) {
    const float p = pre_.v[i];
    dpre.v[i] = (p >= 0.0f && p <= 1.0f) ? dy.v[i] : 0.0f;
  }
  Tensor dx = inner_->backward(dpre, accumulate_param_grads);
  kern::add(dx.data(), dpre.data(), dx.data(), dx.v.size());
  return dx;
}

void GlobalPixelResidual::collect_params(std::vector<Param*>& out) { inner_->collect_params(out); }

void GlobalPixelResidual::describe(std::vector<LayerInfo>& out) const {
  out.push_back({name_, "global_residual", "clamp01(x + f(x))"});
  inner_->describe(out);
}

}  // namespace framecast::nn
