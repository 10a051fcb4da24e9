#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace framecast::nn {

// Dense float32 tensor, contiguous row-major, rank 1..5. Video batches use
// (N, C, T, H, W), image batches (N, C, H, W). Small enough on purpose: no
// views, no strides, no broadcasting.

struct Shape {
  std::array<int, 5> d{1, 1, 1, 1, 1};
  int rank = 0;

  Shape() = default;
  Shape(std::initializer_list<int> dims) {
    if (dims.size() == 0 || dims.size() > 5)
      throw std::invalid_argument("Shape: rank must be 1..5");
    rank = static_cast<int>(dims.size());
    int i = 0;
    for (int v : dims) {
      if (v <= 0) throw std::invalid_argument("Shape: dims must be positive");
      d[i++] = v;
    }
  }

  int operator[](int i) const { return d[static_cast<size_t>(i)]; }

  int64_t numel() const {
    int64_t n = 1;
    for (int i = 0; i < rank; ++i) n *= d[static_cast<size_t>(i)];
    return rank == 0 ? 0 : n;
  }

  bool operator==(const Shape& o) const {
    if (rank != o.rank) return false;
    for (int i = 0; i < rank; ++i)
      if (d[static_cast<size_t>(i)] != o.d[static_cast<size_t>(i)]) return false;
    return true;
  }
  bool operator!=(const Shape& o) const { return !(*this == o); }

  std::string str() const {
    std::string s = "(";
    for (int i = 0; i < rank; ++i) {
      if (i) s += ",";
      s += std::to_string(d[static_cast<size_t>(i)]);
    }
    return s + ")";
  }
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape s) : shape(s), v(static_cast<size_t>(s.numel()), 0.0f) {}

  static Tensor zeros(Shape s) { return Tensor(s); }
  static Tensor full(Shape s, float value) {
    Tensor t(s);
    for (float& x : t.v) x = value;
    return t;
  }

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  bool empty() const { return v.empty(); }
  float* data() { return v.data(); }
  const float* data() const { return v.data(); }

  // Reinterprets the buffer under a new shape of equal element count.
  Tensor reshaped(Shape s) const {
    if (s.numel() != numel()) throw std::invalid_argument("reshape: element count mismatch");
    Tensor t = *this;
    t.shape = s;
    return t;
  }

  // Element access for tests and glue code; hot paths index manually.
  float& at(std::initializer_list<int> idx) { return v[offset(idx)]; }
  float at(std::initializer_list<int> idx) const { return v[offset(idx)]; }

  Shape shape;
  std::vector<float> v;

 private:
  size_t offset(std::initializer_list<int> idx) const {
    if (static_cast<int>(idx.size()) != shape.rank)
      throw std::invalid_argument("Tensor::at: rank mismatch");
    size_t off = 0;
    int i = 0;
    for (int ix : idx) {
      off = off * static_cast<size_t>(shape[i]) + static_cast<size_t>(ix);
      ++i;
    }
    return off;
  }
};

}  // namespace framecast::nn
