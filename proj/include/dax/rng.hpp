#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace dax {

/// Stateless splitmix64 finalizer round.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Substream seed derivation: sm(sm(sm(base) ^ trial) ^ tag), with sm the
/// splitmix64 finalizer above. The exact function is part of the output
/// format contract (see README) so result files are portable.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t trial,
                                 std::uint64_t stream_tag) {
  return splitmix64(splitmix64(splitmix64(base_seed) ^ trial) ^ stream_tag);
}

/// Counting wrapper around mt19937_64. Gaussian variates use Box-Muller with
/// a fixed two-raws-per-variate layout, so the draw counter is exact and the
/// variate sequence does not depend on the standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() {
    ++draws_;
    return engine_();
  }

  /// Uniform in the open interval (0, 1).
  double uniform() { return (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  Eigen::VectorXd normal_vector(int dim) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal();
    return v;
  }

  /// Column-major fill order (member by member).
  Eigen::MatrixXd normal_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
      for (int i = 0; i < rows; ++i) m(i, j) = normal();
    return m;
  }

  /// Number of raw 64-bit engine outputs consumed so far.
  std::uint64_t draw_count() const { return draws_; }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace dax
