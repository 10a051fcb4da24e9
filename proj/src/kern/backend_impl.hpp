#pragma once

#include <cstddef>

// Internal: per-backend entry points wired up by dispatch.cpp. Not part of
// the public kernel API.

namespace framecast::kern::detail {

struct KernelTable {
  void (*add)(const float*, const float*, float*, size_t);
  void (*sub)(const float*, const float*, float*, size_t);
  void (*mul)(const float*, const float*, float*, size_t);
  void (*axpy)(float, const float*, float*, size_t);
  void (*scale)(float, float*, size_t);
  void (*clamp01)(const float*, float*, size_t);
  void (*leaky_relu)(const float*, float*, size_t, float);
  void (*leaky_relu_grad)(const float*, const float*, float*, size_t, float);
  double (*sum)(const float*, size_t);
  double (*sumsq)(const float*, size_t);
  double (*dot)(const float*, const float*, size_t);
  void (*gemm_nn)(int, int, int, const float*, const float*, float*, bool);
  void (*gemm_tn)(int, int, int, const float*, const float*, float*, bool);
  void (*gemm_nt)(int, int, int, const float*, const float*, float*, bool);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();  // only defined when the AVX2 TU is built

}  // namespace framecast::kern::detail
