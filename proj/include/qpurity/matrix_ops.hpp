#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpurity/format.hpp"

namespace qpurity {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances for double-precision dense algebra at dim <= 64.
namespace tol {
inline constexpr double herm = 1e-9;    // Hermiticity defect
inline constexpr double trace = 1e-9;   // unit-trace / weight-sum defect
inline constexpr double psd = 1e-8;     // allowed negative eigenvalue
inline constexpr double eig = 1e-10;    // eigendecomposition reconstruction
inline constexpr double norm = 1e-9;    // unit-vector norm defect
inline constexpr double tp = 1e-8;      // trace-preservation defect
inline constexpr int max_dim = 4096;    // tensor-product dimension cap
}  // namespace tol

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline const double kLog2E = 1.4426950408889634;  // 1/ln2

//=============================================================================
// Domain types
//=============================================================================

// Unit vector in a finite-dimensional complex space.
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() < 1)
      throw std::invalid_argument("PureState: empty amplitude vector");
    if (!amp_.allFinite())
      throw std::invalid_argument("PureState: non-finite amplitude");
    const double n = amp_.norm();
    if (std::abs(n - 1.0) > tol::norm)
      throw std::invalid_argument("PureState: norm deviates from 1 by " +
                                  fmt12(std::abs(n - 1.0)));
  }

  static PureState basis(int dim, int index) {
    if (index < 0 || index >= dim)
      throw std::out_of_range("PureState::basis: index out of range");
    ComplexVector v = ComplexVector::Zero(dim);
    v[index] = 1.0;
    return PureState(std::move(v));
  }

  // Normalizes before constructing; rejects (near-)zero input.
  static PureState normalized(const ComplexVector& v) {
    const double n = v.norm();
    if (!(n > 1e-12))
      throw std::invalid_argument("PureState::normalized: zero vector");
    return PureState(v / n);
  }

  int dim() const { return static_cast<int>(amp_.size()); }
  const ComplexVector& amplitudes() const { return amp_; }
  ComplexMatrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  ComplexVector amp_;
};

namespace detail {
// Ascending eigenvalues of the symmetrized matrix, no validation.
inline RealVector hermitian_eigenvalues(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()),
                                                  Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Von Neumann entropy in bits of a PSD matrix given as a dense matrix.
// Eigenvalues are clamped to [0,1] and 0 log 0 := 0.
inline double entropy_psd(const ComplexMatrix& m) {
  const RealVector ev = hermitian_eigenvalues(m);
  double h = 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    const double lam = std::clamp(ev[i], 0.0, 1.0);
    if (lam > 0.0) h -= lam * std::log2(lam);
  }
  return h;
}
}  // namespace detail

// Positive unit-trace Hermitian operator.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
    if (mat_.rows() < 1 || mat_.rows() != mat_.cols())
      throw std::invalid_argument("DensityMatrix: matrix must be square");
    if (!mat_.allFinite())
      throw std::invalid_argument("DensityMatrix: non-finite entry");
    const double hd = hermiticity_defect(mat_);
    if (hd > tol::herm)
      throw std::invalid_argument("DensityMatrix: hermiticity defect " +
                                  fmt12(hd));
    const double td = std::abs(mat_.trace() - std::complex<double>(1.0, 0.0));
    if (td > tol::trace)
      throw std::invalid_argument("DensityMatrix: trace deviates from 1 by " +
                                  fmt12(td));
    const double lmin = detail::hermitian_eigenvalues(mat_)[0];
    if (lmin < -tol::psd)
      throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                  fmt12(lmin));
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.projector());
  }

  static DensityMatrix maximally_mixed(int dim) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / double(dim));
  }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

// Ordered factor dimensions d_1,...,d_n of a tensor-product space.
class FactorShape {
 public:
  explicit FactorShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("FactorShape: no factors");
    long long total = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("FactorShape: factor dim < 2");
      total *= d;
      if (total > tol::max_dim)
        throw std::invalid_argument("FactorShape: total dimension " +
                                    std::to_string(total) + " exceeds max_dim " +
                                    std::to_string(tol::max_dim));
    }
    total_ = static_cast<int>(total);
  }

  int count() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(i); }
  int total() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

//=============================================================================
// Operations
//=============================================================================

// Kronecker product with the configured dimension cap.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  const long long rr = static_cast<long long>(a.rows()) * b.rows();
  const long long cc = static_cast<long long>(a.cols()) * b.cols();
  if (rr > tol::max_dim || cc > tol::max_dim)
    throw std::invalid_argument("tensor: product dimension " +
                                std::to_string(std::max(rr, cc)) +
                                " exceeds max_dim " +
                                std::to_string(tol::max_dim));
  return Eigen::kroneckerProduct(a, b);
}

// Left-to-right fold of n factors.
inline ComplexMatrix tensor_all(const std::vector<ComplexMatrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_all: no factors");
  ComplexMatrix acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = tensor(acc, factors[i]);
  return acc;
}

inline ComplexVector tensor_vector(const ComplexVector& a,
                                   const ComplexVector& b) {
  const long long n = static_cast<long long>(a.size()) * b.size();
  if (n > tol::max_dim)
    throw std::invalid_argument("tensor_vector: dimension exceeds max_dim");
  ComplexVector out(n);
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

inline PureState tensor_state(const PureState& a, const PureState& b) {
  return PureState::normalized(tensor_vector(a.amplitudes(), b.amplitudes()));
}

// Partial trace keeping the factors listed in `keep` (0-based, in their
// original relative order). Tr(result) = Tr(m).
inline ComplexMatrix partial_trace(const ComplexMatrix& m,
                                   const FactorShape& shape,
                                   const std::vector<int>& keep) {
  const int n = shape.count();
  const int d = shape.total();
  if (m.rows() != d || m.cols() != d)
    throw std::invalid_argument("partial_trace: matrix dim " +
                                std::to_string(m.rows()) +
                                " does not match shape total " +
                                std::to_string(d));
  std::vector<char> kept(n, 0);
  for (int k : keep) {
    if (k < 0 || k >= n)
      throw std::out_of_range("partial_trace: keep index " + std::to_string(k) +
                              " out of range for " + std::to_string(n) +
                              " factors");
    if (kept[k])
      throw std::invalid_argument("partial_trace: duplicate keep index");
    kept[k] = 1;
  }

  // Row-major factor strides: factor 0 is the most significant digit,
  // matching the Kronecker-product index convention.
  std::vector<long long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * shape.dim(i + 1);

  int dk = 1, dt = 1;
  for (int i = 0; i < n; ++i) (kept[i] ? dk : dt) *= shape.dim(i);

  // Base offsets of keep-subindices and traced-subindices in the full index.
  std::vector<long long> base_keep(dk, 0), base_trace(dt, 0);
  {
    std::vector<int> keep_factors, trace_factors;
    for (int i = 0; i < n; ++i) (kept[i] ? keep_factors : trace_factors).push_back(i);
    auto fill = [&](const std::vector<int>& factors, std::vector<long long>& base) {
      const int count = static_cast<int>(base.size());
      for (int sub = 0; sub < count; ++sub) {
        int rem = sub;
        long long off = 0;
        for (int j = static_cast<int>(factors.size()) - 1; j >= 0; --j) {
          const int f = factors[j];
          off += static_cast<long long>(rem % shape.dim(f)) * stride[f];
          rem /= shape.dim(f);
        }
        base[sub] = off;
      }
    };
    fill(keep_factors, base_keep);
    fill(trace_factors, base_trace);
  }

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b) {
      std::complex<double> acc = 0.0;
      for (int t = 0; t < dt; ++t)
        acc += m(base_keep[a] + base_trace[t], base_keep[b] + base_trace[t]);
      out(a, b) = acc;
    }
  return out;
}

struct HermitianEigen {
  RealVector values;       // descending
  ComplexMatrix vectors;   // columns matching values
};

// Eigendecomposition of a Hermitian matrix (symmetrized first), eigenvalues
// sorted descending. Rejects inputs with hermiticity defect beyond tolerance.
inline HermitianEigen eig_hermitian(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("eig_hermitian: matrix must be square");
  const double hd = hermiticity_defect(m);
  if (hd > tol::herm)
    throw std::invalid_argument("eig_hermitian: hermiticity defect " +
                                fmt12(hd) + " exceeds tolerance " +
                                fmt12(tol::herm));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  const int d = static_cast<int>(m.rows());
  HermitianEigen out{RealVector(d), ComplexMatrix(d, d)};
  for (int i = 0; i < d; ++i) {
    out.values[i] = es.eigenvalues()[d - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

// Von Neumann entropy in bits; value in [0, log2 dim].
inline double entropy(const DensityMatrix& rho) {
  return detail::entropy_psd(rho.matrix());
}

// Schatten p-norm (Tr |A|^p)^(1/p); p = inf gives the operator norm.
// Hermitian inputs use eigenvalue magnitudes, others singular values.
inline double schatten_norm(const ComplexMatrix& m, double p) {
  if (std::isnan(p) || p < 1.0)
    throw std::invalid_argument("schatten_norm: p must be >= 1, got " +
                                fmt12(p));
  if (m.rows() != m.cols())
    throw std::invalid_argument("schatten_norm: matrix must be square");
  RealVector s;
  if (hermiticity_defect(m) <= tol::herm) {
    s = detail::hermitian_eigenvalues(m).cwiseAbs();
  } else {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    s = svd.singularValues();
  }
  if (std::isinf(p)) return s.maxCoeff();
  if (p == 1.0) return s.sum();
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) acc += std::pow(s[i], p);
  return std::pow(acc, 1.0 / p);
}

// Smallest eigenvalue, clamped to >= 0 (singular outputs read as 0).
inline double min_eigenvalue(const DensityMatrix& rho) {
  return std::max(detail::hermitian_eigenvalues(rho.matrix())[0], 0.0);
}

}  // namespace qpurity
