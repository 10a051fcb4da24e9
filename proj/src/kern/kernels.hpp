#pragma once

#include <cstddef>
#include <string>

// Hot numeric kernels. Every operation has a scalar reference implementation
// and, on x86-64, an AVX2+FMA variant. The active backend is chosen once at
// startup: the FRAMECAST_KERNELS environment variable ("scalar", "avx2",
// "auto") wins, otherwise CPU detection picks the widest supported variant.
// The scalar path is the semantic reference; the vector paths may reassociate
// additions and fuse multiplies, so results can differ in the last bits.

namespace framecast::kern {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
bool avx2_supported();

// Test hook. Forces a backend; throws std::invalid_argument if unavailable.
void set_backend(Backend b);

// ===== elementwise =====

void add(const float* a, const float* b, float* y, size_t n);   // y = a + b
void sub(const float* a, const float* b, float* y, size_t n);   // y = a - b
void mul(const float* a, const float* b, float* y, size_t n);   // y = a * b
void axpy(float alpha, const float* x, float* y, size_t n);     // y += alpha * x
void scale(float alpha, float* y, size_t n);                    // y *= alpha
void clamp01(const float* x, float* y, size_t n);
void leaky_relu(const float* x, float* y, size_t n, float slope);
// dx = dy * (x > 0 ? 1 : slope)
void leaky_relu_grad(const float* x, const float* dy, float* dx, size_t n, float slope);

// ===== reductions (double accumulation in both backends) =====

double sum(const float* x, size_t n);
double sumsq(const float* x, size_t n);
double dot(const float* a, const float* b, size_t n);

// ===== GEMM, row-major =====
// C is M x N. When accumulate is false C is overwritten, otherwise added to.
// gemm_nn: C (+)= A[M,K] * B[K,N]
// gemm_tn: C (+)= A^T * B where A is stored K x M
// gemm_nt: C (+)= A * B^T where B is stored N x K

void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
void gemm_tn(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);
void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c, bool accumulate);

}  // namespace framecast::kern
