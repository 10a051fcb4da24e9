#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kern/backend_impl.hpp"
#include "kern/kernels.hpp"

namespace framecast::kern {
namespace {

using detail::KernelTable;

bool cpu_has_avx2_fma() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(FRAMECAST_HAVE_AVX2_TU)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct Dispatch {
  Backend backend;
  const KernelTable* table;

  Dispatch() {
    backend = Backend::scalar;
    if (cpu_has_avx2_fma()) backend = Backend::avx2;
    if (const char* env = std::getenv("FRAMECAST_KERNELS")) {
      const std::string v(env);
      if (v == "scalar") {
        backend = Backend::scalar;
      } else if (v == "avx2") {
        if (!cpu_has_avx2_fma())
          throw std::runtime_error("FRAMECAST_KERNELS=avx2 but AVX2+FMA is unavailable");
        backend = Backend::avx2;
      }
      // "auto" and anything else: keep the detected choice.
    }
    table = pick(backend);
  }

  static const KernelTable* pick(Backend b) {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(FRAMECAST_HAVE_AVX2_TU)
    if (b == Backend::avx2) return &detail::avx2_table();
#endif
    (void)b;
    return &detail::scalar_table();
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool avx2_supported() { return cpu_has_avx2_fma(); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2_fma())
    throw std::invalid_argument("AVX2 backend requested but not supported on this CPU");
  dispatch().backend = b;
  dispatch().table = Dispatch::pick(b);
}

void add(const float* a, const float* b, float* y, size_t n) { dispatch().table->add(a, b, y, n); }
void sub(const float* a, const float* b, float* y, size_t n) { dispatch().table->sub(a, b, y, n); }
void mul(const float* a, const float* b, float* y, size_t n) { dispatch().table->mul(a, b, y, n); }
void axpy(float alpha, const float* x, float* y, size_t n) { dispatch().table->axpy(alpha, x, y, n); }
void scale(float alpha, float* y, size_t n) { dispatch().table->scale(alpha, y, n); }
void clamp01(const float* x, float* y, size_t n) { dispatch().table->clamp01(x, y, n); }
void leaky_relu(const float* x, float* y, size_t n, float slope) {
  dispatch().table->leaky_relu(x, y, n, slope);
}
void leaky_relu_grad(const float* x, const float* dy, float* dx, size_t n, float slope) {
  dispatch().table->leaky_relu_grad(x, dy, dx, n, slope);
}
double sum(const float* x, size_t n) { return dispatch().table->sum(x, n); }
double sumsq(const float* x, size_t n) { return dispatch().table->sumsq(x, n); }
double dot(const float* a, const float* b, size_t n) { return dispatch().table->dot(a, b, n); }
void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  dispatch().table->gemm_nn(m, n, k, a, b, c, accumulate);
}
void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  dispatch().table->gemm_tn(m, n, k, a, b, c, accumulate);
}
void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate) {
  dispatch().table->gemm_nt(m, n, k, a, b, c, accumulate);
}

}  // namespace framecast::kern
