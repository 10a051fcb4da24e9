#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace framecast {

// Little-endian binary IO helpers for the container formats. The build
// targets little-endian hosts; a static assertion in binio.cpp guards this.

inline void put_u32(std::string& out, uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

inline void put_u64(std::string& out, uint64_t v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}

class ByteReader {
 public:
  ByteReader(const char* data, size_t n) : p_(data), end_(data + n) {}

  uint32_t u32() {
    uint32_t v;
    take(&v, 4);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    take(&v, 8);
    return v;
  }
  std::string bytes(size_t n) {
    need(n);
    std::string s(p_, n);
    p_ += n;
    return s;
  }
  void floats(float* dst, size_t count) { take(dst, count * sizeof(float)); }
  size_t remaining() const { return static_cast<size_t>(end_ - p_); }

 private:
  void need(size_t n) const {
    if (remaining() < n) throw IoError("truncated payload");
  }
  void take(void* dst, size_t n) {
    need(n);
    std::memcpy(dst, p_, n);
    p_ += n;
  }
  const char* p_;
  const char* end_;
};

void write_file_bytes(const std::string& path, const std::string& bytes);
std::string read_file_bytes(const std::string& path);

}  // namespace framecast
