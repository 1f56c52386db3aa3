#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstring>

namespace dax {

/// FNV-1a over raw little-endian byte streams; used to fingerprint the
/// observation sequence each filter run consumes.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001B3ull;
    }
  }

  void add_double(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    add_bytes(&bits, sizeof bits);
  }

  void add_vector(const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) add_double(v[i]);
  }

  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xCBF29CE484222325ull;
};

}  // namespace dax
