#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "qpurity/matrix_ops.hpp"
#include "qpurity/rng.hpp"
#include "test_util.hpp"

using namespace qpurity;
using Catch::Approx;

namespace {

// Independent Kronecker-product oracle: direct index formula
// (a (x) b)(i*rb + k, j*cb + l) = a(i,j) b(k,l).
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Independent two-factor partial-trace oracle by explicit double-index sums.
ComplexMatrix ptrace_oracle_keep_first(const ComplexMatrix& m, int d1, int d2) {
  ComplexMatrix out = ComplexMatrix::Zero(d1, d1);
  for (int a = 0; a < d1; ++a)
    for (int b = 0; b < d1; ++b)
      for (int t = 0; t < d2; ++t) out(a, b) += m(a * d2 + t, b * d2 + t);
  return out;
}

ComplexMatrix ptrace_oracle_keep_second(const ComplexMatrix& m, int d1, int d2) {
  ComplexMatrix out = ComplexMatrix::Zero(d2, d2);
  for (int a = 0; a < d2; ++a)
    for (int b = 0; b < d2; ++b)
      for (int t = 0; t < d1; ++t) out(a, b) += m(t * d2 + a, t * d2 + b);
  return out;
}

ComplexMatrix pauli_x() {
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  return x;
}

}  // namespace

TEST_CASE("tensor: identity and projector cases") {
  const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
  REQUIRE(max_abs(tensor(i2, i2) - ComplexMatrix::Identity(4, 4)) == 0.0);

  ComplexMatrix p(2, 2);
  p << 1, 0, 0, 0;
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 1;
  REQUIRE(max_abs(tensor(p, p) - expected) == 0.0);
}

TEST_CASE("tensor: random entries match the index-formula oracle") {
  RandomStream rng(101);
  const ComplexMatrix a = rng.gaussian_matrix(2, 2);
  const ComplexMatrix b = rng.gaussian_matrix(2, 2);
  REQUIRE(max_abs(tensor(a, b) - kron_oracle(a, b)) < 1e-14);
}

TEST_CASE("tensor: dimension product beyond max_dim is rejected") {
  const ComplexMatrix a = ComplexMatrix::Zero(64, 64);
  const ComplexMatrix b = ComplexMatrix::Zero(65, 65);
  REQUIRE_THROWS_AS(tensor(a, b), std::invalid_argument);
}

TEST_CASE("partial_trace: product state factorizes") {
  RandomStream rng(7);
  const ComplexMatrix rho = testing::random_density_matrix(rng, 2);
  const ComplexMatrix sigma = testing::random_density_matrix(rng, 3);
  const FactorShape shape({2, 3});
  const ComplexMatrix joint = tensor(rho, sigma);
  REQUIRE(max_abs(partial_trace(joint, shape, {0}) - rho) < 1e-12);
  REQUIRE(max_abs(partial_trace(joint, shape, {1}) - sigma) < 1e-12);
}

TEST_CASE("partial_trace: maximally entangled pair reduces to I/2") {
  ComplexVector bell = ComplexVector::Zero(4);
  bell[0] = bell[3] = 1.0 / std::sqrt(2.0);
  const ComplexMatrix rho = bell * bell.adjoint();
  const ComplexMatrix red = partial_trace(rho, FactorShape({2, 2}), {0});
  REQUIRE(max_abs(red - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-14);
}

TEST_CASE("partial_trace: random 4x4 density matches index-sum oracle") {
  RandomStream rng(21);
  const ComplexMatrix m = testing::random_density_matrix(rng, 4);
  const FactorShape shape({2, 2});
  REQUIRE(max_abs(partial_trace(m, shape, {0}) - ptrace_oracle_keep_first(m, 2, 2)) <
          1e-14);
  REQUIRE(max_abs(partial_trace(m, shape, {1}) - ptrace_oracle_keep_second(m, 2, 2)) <
          1e-14);
}

TEST_CASE("partial_trace: preserves trace and rejects bad keep sets") {
  RandomStream rng(3);
  const ComplexMatrix m = testing::random_density_matrix(rng, 6);
  const FactorShape shape({2, 3});
  const ComplexMatrix red = partial_trace(m, shape, {1});
  REQUIRE(std::abs(red.trace() - m.trace()) < 1e-13);
  REQUIRE_THROWS_AS(partial_trace(m, shape, {2}), std::out_of_range);
  REQUIRE_THROWS_AS(partial_trace(m, shape, {0, 0}), std::invalid_argument);
}

TEST_CASE("partial_trace: disjoint keep-sets compose order-independently") {
  RandomStream rng(33);
  const ComplexMatrix m = testing::random_density_matrix(rng, 8);
  const FactorShape shape({2, 2, 2});
  // Tracing out factor 2 then factor 1 equals tracing both at once.
  const ComplexMatrix once = partial_trace(m, shape, {0});
  const ComplexMatrix step1 = partial_trace(m, shape, {0, 1});
  const ComplexMatrix step2 = partial_trace(step1, FactorShape({2, 2}), {0});
  REQUIRE(max_abs(once - step2) < 1e-13);
  // And the dual route through the other intermediate factor.
  const ComplexMatrix alt1 = partial_trace(m, shape, {0, 2});
  const ComplexMatrix alt2 = partial_trace(alt1, FactorShape({2, 2}), {0});
  REQUIRE(max_abs(once - alt2) < 1e-13);
}

TEST_CASE("eig_hermitian: known spectra") {
  ComplexMatrix d(2, 2);
  d << 0.75, 0, 0, 0.25;
  const HermitianEigen e = eig_hermitian(d);
  REQUIRE(e.values[0] == Approx(0.75).margin(1e-14));
  REQUIRE(e.values[1] == Approx(0.25).margin(1e-14));

  const HermitianEigen ex = eig_hermitian(pauli_x());
  REQUIRE(ex.values[0] == Approx(1.0).margin(1e-12));
  REQUIRE(ex.values[1] == Approx(-1.0).margin(1e-12));
}

TEST_CASE("eig_hermitian: reconstruction oracle on random 3x3") {
  RandomStream rng(5);
  ComplexMatrix g = rng.gaussian_matrix(3, 3);
  const ComplexMatrix h = 0.5 * (g + g.adjoint());
  const HermitianEigen e = eig_hermitian(h);
  const ComplexMatrix rebuilt =
      e.vectors * e.values.asDiagonal() * e.vectors.adjoint();
  REQUIRE(max_abs(rebuilt - h) < 1e-10);
  REQUIRE(std::is_sorted(e.values.data(), e.values.data() + 3,
                         std::greater<double>()));
}

TEST_CASE("eig_hermitian: rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(eig_hermitian(m), std::invalid_argument);
}

TEST_CASE("eig_hermitian: density-matrix eigenvalues sum to one") {
  RandomStream rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix rho = testing::random_density_matrix(rng, 4);
    const HermitianEigen e = eig_hermitian(rho);
    REQUIRE(e.values.sum() == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("entropy: pure, maximally mixed, and the binary oracle") {
  REQUIRE(entropy(DensityMatrix::from_pure(PureState::basis(3, 0))) ==
          Approx(0.0).margin(1e-12));
  REQUIRE(entropy(DensityMatrix::maximally_mixed(4)) ==
          Approx(2.0).margin(1e-12));

  // Scalar oracle: -0.75 log2 0.75 - 0.25 log2 0.25.
  const double expected = -0.75 * std::log2(0.75) - 0.25 * std::log2(0.25);
  REQUIRE(expected == Approx(0.811278).margin(1e-6));
  ComplexMatrix d(2, 2);
  d << 0.75, 0, 0, 0.25;
  REQUIRE(entropy(DensityMatrix(d)) == Approx(expected).margin(1e-12));
}

TEST_CASE("entropy: additive over tensor products") {
  RandomStream rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = testing::random_density_matrix(rng, 2);
    const ComplexMatrix b = testing::random_density_matrix(rng, 3);
    const double joint = entropy(DensityMatrix(tensor(a, b)));
    const double parts = entropy(DensityMatrix(a)) + entropy(DensityMatrix(b));
    REQUIRE(joint == Approx(parts).margin(1e-9));
  }
}

TEST_CASE("schatten_norm: fixed values and the scalar oracle") {
  const ComplexMatrix half = 0.5 * ComplexMatrix::Identity(2, 2);
  REQUIRE(schatten_norm(half, 2.0) == Approx(1.0 / std::sqrt(2.0)).margin(1e-12));

  const ComplexMatrix proj = PureState::basis(3, 1).projector();
  for (double p : {1.0, 2.0, 3.5}) {
    REQUIRE(schatten_norm(proj, p) == Approx(1.0).margin(1e-12));
  }
  REQUIRE(schatten_norm(proj, std::numeric_limits<double>::infinity()) ==
          Approx(1.0).margin(1e-12));

  ComplexMatrix d(2, 2);
  d << 0.75, 0, 0, 0.25;
  const double oracle = std::cbrt(std::pow(0.75, 3) + std::pow(0.25, 3));
  REQUIRE(schatten_norm(d, 3.0) == Approx(oracle).margin(1e-12));
}

TEST_CASE("schatten_norm: p < 1 rejected, p = 1 and p = inf behave") {
  const ComplexMatrix x = pauli_x();
  REQUIRE_THROWS_AS(schatten_norm(x, 0.5), std::invalid_argument);
  REQUIRE(schatten_norm(x, 1.0) == Approx(2.0).margin(1e-12));
  REQUIRE(schatten_norm(x, std::numeric_limits<double>::infinity()) ==
          Approx(1.0).margin(1e-12));
}

TEST_CASE("schatten_norm: multiplicative over tensor products") {
  RandomStream rng(11);
  for (double p : {1.5, 2.0, 4.0}) {
    const ComplexMatrix a = testing::random_density_matrix(rng, 2);
    const ComplexMatrix b = testing::random_density_matrix(rng, 2);
    REQUIRE(schatten_norm(tensor(a, b), p) ==
            Approx(schatten_norm(a, p) * schatten_norm(b, p)).margin(1e-9));
  }
}

TEST_CASE("schatten_norm: nonincreasing in p for density matrices") {
  RandomStream rng(13);
  const ComplexMatrix rho = testing::random_density_matrix(rng, 4);
  double prev = std::numeric_limits<double>::infinity();
  for (double p : {1.0, 1.5, 2.0, 3.0, 10.0}) {
    const double v = schatten_norm(rho, p);
    REQUIRE(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("min_eigenvalue: pure, mixed, diagonal") {
  REQUIRE(min_eigenvalue(DensityMatrix::from_pure(PureState::basis(2, 0))) ==
          Approx(0.0).margin(1e-12));
  REQUIRE(min_eigenvalue(DensityMatrix::maximally_mixed(2)) ==
          Approx(0.5).margin(1e-12));
  ComplexMatrix d(2, 2);
  d << 0.75, 0, 0, 0.25;
  REQUIRE(min_eigenvalue(DensityMatrix(d)) == Approx(0.25).margin(1e-12));
}

TEST_CASE("DensityMatrix: invariant violations rejected") {
  ComplexMatrix nonherm(2, 2);
  nonherm << 0.5, 0.1, 0.0, 0.5;
  REQUIRE_THROWS_AS(DensityMatrix(nonherm), std::invalid_argument);

  ComplexMatrix badtrace = 0.7 * ComplexMatrix::Identity(2, 2);
  REQUIRE_THROWS_AS(DensityMatrix(badtrace), std::invalid_argument);

  ComplexMatrix negeig(2, 2);
  negeig << 1.5, 0, 0, -0.5;
  REQUIRE_THROWS_AS(DensityMatrix(negeig), std::invalid_argument);
}

TEST_CASE("PureState: norm invariant enforced") {
  ComplexVector v(2);
  v << 0.5, 0.5;
  REQUIRE_THROWS_AS(PureState(v), std::invalid_argument);
  REQUIRE(PureState::normalized(v).dim() == 2);
}

TEST_CASE("FactorShape: validation") {
  REQUIRE_THROWS_AS(FactorShape({2, 1}), std::invalid_argument);
  REQUIRE(FactorShape({2, 3, 2}).total() == 12);
}
