#include "kern/backend_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstring>

// AVX2 + FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma, and it deliberately contains no inline functions visible to
// other TUs: everything is file-local and reached through the dispatch table,
// so no AVX2 code can leak into binaries running on older CPUs.
//
// Reductions widen each 8-float lane to two 4-double accumulators before
// adding, which keeps them within reassociation distance of the scalar
// double-precision reference.

namespace framecast::kern::detail {
namespace {

float hsum256(__m256 v) {
  __m128 lo = _mm256_castps256_ps128(v);
  __m128 hi = _mm256_extractf128_ps(v, 1);
  lo = _mm_add_ps(lo, hi);
  lo = _mm_hadd_ps(lo, lo);
  lo = _mm_hadd_ps(lo, lo);
  return _mm_cvtss_f32(lo);
}

double hsum256d(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void v_add(const float* a, const float* b, float* y, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void v_sub(const float* a, const float* b, float* y, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] - b[i];
}

void v_mul(const float* a, const float* b, float* y, size_t n) {
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] * b[i];
}

void v_axpy(float alpha, const float* x, float* y, size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void v_scale(float alpha, float* y, size_t n) {
  const __m256 va = _mm256_set1_ps(alpha);
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_mul_ps(va, _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] *= alpha;
}

void v_clamp01(const float* x, float* y, size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  const __m256 one = _mm256_set1_ps(1.0f);
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_min_ps(one, _mm256_max_ps(zero, _mm256_loadu_ps(x + i))));
  for (; i < n; ++i) {
    float v = x[i];
    if (v < 0.0f) v = 0.0f;
    if (v > 1.0f) v = 1.0f;
    y[i] = v;
  }
}

void v_leaky_relu(const float* x, float* y, size_t n, float slope) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 neg = _mm256_mul_ps(vs, v);
    const __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, v, mask));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void v_leaky_relu_grad(const float* x, const float* dy, float* dx, size_t n, float slope) {
  const __m256 vs = _mm256_set1_ps(slope);
  const __m256 zero = _mm256_setzero_ps();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 g = _mm256_loadu_ps(dy + i);
    const __m256 neg = _mm256_mul_ps(vs, g);
    const __m256 mask = _mm256_cmp_ps(v, zero, _CMP_GT_OQ);
    _mm256_storeu_ps(dx + i, _mm256_blendv_ps(neg, g, mask));
  }
  for (; i < n; ++i) dx[i] = x[i] > 0.0f ? dy[i] : slope * dy[i];
}

double v_sum(const float* x, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
    acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
  }
  double acc = hsum256d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double v_sumsq(const float* x, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    const __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    acc0 = _mm256_fmadd_pd(lo, lo, acc0);
    acc1 = _mm256_fmadd_pd(hi, hi, acc1);
  }
  double acc = hsum256d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += static_cast<double>(x[i]) * x[i];
  return acc;
}

double v_dot(const float* a, const float* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                           _mm256_cvtps_pd(_mm256_castps256_ps128(vb)), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                           _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)), acc1);
  }
  double acc = hsum256d(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
  return acc;
}

// Broadcast-A over B rows; C rows stay hot in registers across the j loop.
void v_gemm_nn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(float) * static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<size_t>(i) * n;
    for (int p = 0; p < k; ++p) {
      const float av = a[static_cast<size_t>(i) * k + p];
      if (av == 0.0f) continue;
      const __m256 va = _mm256_set1_ps(av);
      const float* brow = b + static_cast<size_t>(p) * n;
      int j = 0;
      for (; j + 16 <= n; j += 16) {
        _mm256_storeu_ps(crow + j,
                         _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j), _mm256_loadu_ps(crow + j)));
        _mm256_storeu_ps(crow + j + 8, _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j + 8),
                                                       _mm256_loadu_ps(crow + j + 8)));
      }
      for (; j + 8 <= n; j += 8)
        _mm256_storeu_ps(crow + j,
                         _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j), _mm256_loadu_ps(crow + j)));
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void v_gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, sizeof(float) * static_cast<size_t>(m) * n);
  for (int p = 0; p < k; ++p) {
    const float* arow = a + static_cast<size_t>(p) * m;
    const float* brow = b + static_cast<size_t>(p) * n;
    for (int i = 0; i < m; ++i) {
      const float av = arow[i];
      if (av == 0.0f) continue;
      const __m256 va = _mm256_set1_ps(av);
      float* crow = c + static_cast<size_t>(i) * n;
      int j = 0;
      for (; j + 8 <= n; j += 8)
        _mm256_storeu_ps(crow + j,
                         _mm256_fmadd_ps(va, _mm256_loadu_ps(brow + j), _mm256_loadu_ps(crow + j)));
      for (; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// Row-by-row dot products; k is the contiguous axis for both operands.
void v_gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  for (int i = 0; i < m; ++i) {
    const float* arow = a + static_cast<size_t>(i) * k;
    for (int j = 0; j < n; ++j) {
      const float* brow = b + static_cast<size_t>(j) * k;
      __m256 acc = _mm256_setzero_ps();
      int p = 0;
      for (; p + 8 <= k; p += 8)
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(arow + p), _mm256_loadu_ps(brow + p), acc);
      float s = hsum256(acc);
      for (; p < k; ++p) s += arow[p] * brow[p];
      float* cv = c + static_cast<size_t>(i) * n + j;
      *cv = accumulate ? *cv + s : s;
    }
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t = {
      v_add,  v_sub,    v_mul,   v_axpy,    v_scale,   v_clamp01, v_leaky_relu,
      v_leaky_relu_grad, v_sum,  v_sumsq,   v_dot,     v_gemm_nn, v_gemm_tn,
      v_gemm_nt,
  };
  return t;
}

}  // namespace framecast::kern::detail

#endif  // x86-64
