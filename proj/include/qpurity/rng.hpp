#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace qpurity {

// Deterministic random stream. All randomness in the library flows through
// this class so that a fixed seed reproduces results bit for bit: the raw
// mt19937_64 output is converted to doubles manually instead of through
// std::*_distribution, whose output is implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  // Decorrelated stream for (seed, index), splitmix64 mixing.
  static RandomStream substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return RandomStream(z ^ (z >> 31));
  }

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // Marsaglia polar method; avoids trig for cross-libm reproducibility.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::complex<double> complex_gaussian() { return {gaussian(), gaussian()}; }

  // Haar-distributed unit vector in C^dim.
  Eigen::VectorXcd unit_vector(int dim) {
    Eigen::VectorXcd v(dim);
    double n = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = complex_gaussian();
      n = v.norm();
    } while (n < 1e-12);
    return v / n;
  }

  Eigen::MatrixXcd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = complex_gaussian();
    return m;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qpurity
