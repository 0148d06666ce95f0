#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpurity/matrix_ops.hpp"

namespace qpurity {

//=============================================================================
// Channel: completely positive trace-preserving map in Kraus form
//=============================================================================

class Channel {
 public:
  explicit Channel(std::vector<ComplexMatrix> kraus, std::string label = "")
      : kraus_(std::move(kraus)), label_(std::move(label)) {
    if (kraus_.empty())
      throw std::invalid_argument("Channel: empty Kraus list");
    dim_out_ = static_cast<int>(kraus_.front().rows());
    dim_in_ = static_cast<int>(kraus_.front().cols());
    if (dim_in_ < 1 || dim_out_ < 1)
      throw std::invalid_argument("Channel: degenerate Kraus operator shape");
    for (const auto& a : kraus_) {
      if (a.rows() != dim_out_ || a.cols() != dim_in_)
        throw std::invalid_argument("Channel: inconsistent Kraus shapes");
      if (!a.allFinite())
        throw std::invalid_argument("Channel: non-finite Kraus entry");
    }
    // Trace preservation: sum A_k^† A_k = I.
    ComplexMatrix comp = ComplexMatrix::Zero(dim_in_, dim_in_);
    for (const auto& a : kraus_) comp += a.adjoint() * a;
    const double tp_defect =
        max_abs(comp - ComplexMatrix::Identity(dim_in_, dim_in_));
    if (tp_defect > tol::tp)
      throw std::invalid_argument(
          "Channel: trace preservation violated, defect " + fmt12(tp_defect));
    // Complete positivity: Choi matrix PSD. A Kraus list is CP by
    // construction; the check guards against pathological numeric input and
    // is skipped at dimensions where the Choi eigenproblem would dominate.
    if (static_cast<long long>(dim_in_) * dim_out_ <= 1024) {
      const double cp_min = detail::hermitian_eigenvalues(choi())[0];
      if (cp_min < -tol::psd)
        throw std::invalid_argument(
            "Channel: complete positivity violated, Choi eigenvalue " +
            fmt12(cp_min));
    }
  }

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  int kraus_count() const { return static_cast<int>(kraus_.size()); }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  // Linear action sum_k A_k rho A_k^†, no density-matrix validation.
  ComplexMatrix apply_matrix(const ComplexMatrix& rho) const {
    if (rho.rows() != dim_in_ || rho.cols() != dim_in_)
      throw std::invalid_argument("Channel::apply_matrix: dimension mismatch");
    ComplexMatrix out = ComplexMatrix::Zero(dim_out_, dim_out_);
    for (const auto& a : kraus_) out.noalias() += a * rho * a.adjoint();
    return out;
  }

  // Action on a pure input |psi><psi| as sum of outer products.
  ComplexMatrix apply_pure(const ComplexVector& psi) const {
    if (psi.size() != dim_in_)
      throw std::invalid_argument("Channel::apply_pure: dimension mismatch");
    ComplexMatrix v(dim_out_, kraus_count());
    for (int k = 0; k < kraus_count(); ++k) v.col(k).noalias() = kraus_[k] * psi;
    return v * v.adjoint();
  }

  DensityMatrix apply(const DensityMatrix& rho) const {
    ComplexMatrix out = apply_matrix(rho.matrix());
    out = 0.5 * (out + out.adjoint());
    return DensityMatrix(std::move(out));
  }

  // Choi matrix sum_k vec(A_k) vec(A_k)^†, column-major vec.
  ComplexMatrix choi() const {
    const int n = dim_in_ * dim_out_;
    ComplexMatrix j = ComplexMatrix::Zero(n, n);
    for (const auto& a : kraus_) {
      ComplexVector v = a.reshaped();
      j.noalias() += v * v.adjoint();
    }
    return j;
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::string label_;
  int dim_in_ = 0;
  int dim_out_ = 0;
};

inline Channel make_channel(std::vector<ComplexMatrix> kraus,
                            std::string label = "") {
  return Channel(std::move(kraus), std::move(label));
}

inline DensityMatrix apply(const Channel& phi, const DensityMatrix& rho) {
  return phi.apply(rho);
}

//=============================================================================
// Subsets of tensor factors
//=============================================================================

struct SubsetMask {
  int n = 0;
  std::uint32_t bits = 0;

  SubsetMask(int factor_count, std::uint32_t members)
      : n(factor_count), bits(members) {
    if (n < 1 || n > 30)
      throw std::invalid_argument("SubsetMask: factor count out of range");
    if (bits >> n)
      throw std::invalid_argument("SubsetMask: member index out of range");
  }

  static SubsetMask from_indices(int factor_count,
                                 const std::vector<int>& members) {
    std::uint32_t bits = 0;
    for (int i : members) {
      if (i < 0 || i >= factor_count)
        throw std::out_of_range("SubsetMask: index " + std::to_string(i) +
                                " out of range");
      bits |= (1u << i);
    }
    return SubsetMask(factor_count, bits);
  }

  static SubsetMask empty(int factor_count) { return {factor_count, 0}; }
  static SubsetMask full(int factor_count) {
    return {factor_count, (1u << factor_count) - 1u};
  }

  bool contains(int i) const { return (bits >> i) & 1u; }

  SubsetMask unite(const SubsetMask& other) const {
    if (n != other.n)
      throw std::invalid_argument("SubsetMask: mismatched factor counts");
    return {n, bits | other.bits};
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int i = 0; i < n; ++i)
      if (contains(i)) {
        if (!first) s += ",";
        s += std::to_string(i);
        first = false;
      }
    return s + "}";
  }
};

//=============================================================================
// Channel families and combinators
//=============================================================================

inline Channel identity_channel(int dim) {
  if (dim < 1) throw std::invalid_argument("identity_channel: dim < 1");
  return Channel({ComplexMatrix::Identity(dim, dim)},
                 "identity:d=" + std::to_string(dim));
}

namespace detail {
// Discrete Weyl (shift/clock) unitaries X^a Z^b, a,b in [0,d).
inline std::vector<ComplexMatrix> weyl_unitaries(int d) {
  const std::complex<double> i01(0.0, 1.0);
  const double two_pi = 2.0 * M_PI;
  std::vector<ComplexMatrix> ws;
  ws.reserve(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      ComplexMatrix w = ComplexMatrix::Zero(d, d);
      for (int j = 0; j < d; ++j)
        w((j + a) % d, j) = std::exp(i01 * (two_pi * b * j / d));
      ws.push_back(std::move(w));
    }
  return ws;
}
}  // namespace detail

// Depolarizing channel rho -> (1-p) rho + (p/d) Tr(rho) I, realized with the
// d^2 Weyl unitaries: weight (1-p)+p/d^2 on the identity, p/d^2 elsewhere.
inline Channel depolarizing(int d, double p) {
  if (d < 2) throw std::invalid_argument("depolarizing: d must be >= 2");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("depolarizing: p must lie in [0,1], got " +
                                fmt12(p));
  const double w_id = (1.0 - p) + p / (double(d) * d);
  const double w_other = p / (double(d) * d);
  std::vector<ComplexMatrix> kraus;
  const auto ws = detail::weyl_unitaries(d);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const double w = (i == 0) ? w_id : w_other;
    if (w <= 0.0) continue;
    kraus.push_back(std::sqrt(w) * ws[i]);
  }
  return Channel(std::move(kraus),
                 "depolarizing:d=" + std::to_string(d) + ",p=" + fmt12(p));
}

// Convex mixture (1-eps) Id + eps phi via Kraus {sqrt(1-eps) I} u {sqrt(eps) A_k}.
inline Channel weak_noise(const Channel& phi, double eps) {
  if (phi.dim_in() != phi.dim_out())
    throw std::invalid_argument("weak_noise: channel must be square");
  if (!(eps >= 0.0 && eps <= 1.0))
    throw std::invalid_argument("weak_noise: eps must lie in [0,1], got " +
                                fmt12(eps));
  std::vector<ComplexMatrix> kraus;
  const int d = phi.dim_in();
  if (eps < 1.0)
    kraus.push_back(std::sqrt(1.0 - eps) *
                    ComplexMatrix::Identity(d, d));
  if (eps > 0.0)
    for (const auto& a : phi.kraus()) kraus.push_back(std::sqrt(eps) * a);
  return Channel(std::move(kraus),
                 "weaknoise:base=" + phi.label() + ",eps=" + fmt12(eps));
}

// Tensor product channel with Kraus list {A_i (x) B_j}.
inline Channel tensor_channel(const Channel& a, const Channel& b) {
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(a.kraus().size() * b.kraus().size());
  for (const auto& ak : a.kraus())
    for (const auto& bk : b.kraus()) kraus.push_back(tensor(ak, bk));
  return Channel(std::move(kraus), "tensor:" + a.label() + ";" + b.label());
}

inline Channel tensor_channel_all(const std::vector<Channel>& factors) {
  if (factors.empty())
    throw std::invalid_argument("tensor_channel_all: no factors");
  Channel acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i)
    acc = tensor_channel(acc, factors[i]);
  return acc;
}

// Conditional expectation eps_L: completely depolarizes the factors in L and
// acts as the identity elsewhere. Satisfies eps_L1 ∘ eps_L2 = eps_{L1 u L2}.
inline Channel conditional_expectation(const FactorShape& shape,
                                       const SubsetMask& L) {
  if (L.n != shape.count())
    throw std::invalid_argument(
        "conditional_expectation: mask/shape factor count mismatch");
  std::vector<std::vector<ComplexMatrix>> factor_kraus;
  for (int i = 0; i < shape.count(); ++i) {
    const int d = shape.dim(i);
    if (L.contains(i)) {
      auto ws = detail::weyl_unitaries(d);
      for (auto& w : ws) w /= double(d);
      factor_kraus.push_back(std::move(ws));
    } else {
      factor_kraus.push_back({ComplexMatrix::Identity(d, d)});
    }
  }
  // Cartesian product of the per-factor Kraus lists, folded left-to-right.
  std::vector<ComplexMatrix> kraus = {ComplexMatrix::Identity(1, 1)};
  for (const auto& fk : factor_kraus) {
    std::vector<ComplexMatrix> next;
    next.reserve(kraus.size() * fk.size());
    for (const auto& acc : kraus)
      for (const auto& a : fk) next.push_back(tensor(acc, a));
    kraus = std::move(next);
  }
  std::string dims;
  for (int i = 0; i < shape.count(); ++i) {
    if (i) dims += "x";
    dims += std::to_string(shape.dim(i));
  }
  return Channel(std::move(kraus),
                 "condexp:dims=" + dims + ",L=" + L.to_string());
}

//=============================================================================
// Channel mixtures
//=============================================================================

struct ChannelMixture {
  std::vector<std::pair<double, Channel>> terms;

  explicit ChannelMixture(std::vector<std::pair<double, Channel>> t)
      : terms(std::move(t)) {
    if (terms.empty()) throw std::invalid_argument("ChannelMixture: empty");
    double sum = 0.0;
    const int din = terms.front().second.dim_in();
    const int dout = terms.front().second.dim_out();
    for (const auto& [w, ch] : terms) {
      if (w < -1e-15)
        throw std::invalid_argument("ChannelMixture: negative weight " +
                                    fmt12(w));
      if (ch.dim_in() != din || ch.dim_out() != dout)
        throw std::invalid_argument("ChannelMixture: mismatched dims");
      sum += w;
    }
    if (std::abs(sum - 1.0) > tol::trace)
      throw std::invalid_argument("ChannelMixture: weights sum to " +
                                  fmt12(sum));
  }
};

// Convex combination as a single channel: Kraus {sqrt(w_t) A_k^(t)}.
inline Channel mix(const ChannelMixture& mixture) {
  std::vector<ComplexMatrix> kraus;
  for (const auto& [w, ch] : mixture.terms) {
    if (w <= 0.0) continue;
    const double s = std::sqrt(w);
    for (const auto& a : ch.kraus()) kraus.push_back(s * a);
  }
  return Channel(std::move(kraus),
                 "mix:" + std::to_string(mixture.terms.size()) + " terms");
}

// Expansion of a product of depolarizing channels over conditional
// expectations: 2^n terms, weight prod_i p_i^{theta_L(i)} (1-p_i)^{1-theta_L(i)}
// on eps_L, ordered by subset bitmask.
inline ChannelMixture depolarizing_expansion(const FactorShape& shape,
                                             const std::vector<double>& ps) {
  const int n = shape.count();
  if (static_cast<int>(ps.size()) != n)
    throw std::invalid_argument("depolarizing_expansion: need one p per factor");
  for (double p : ps)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("depolarizing_expansion: p outside [0,1]");
  std::vector<std::pair<double, Channel>> terms;
  terms.reserve(1u << n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= ((mask >> i) & 1u) ? ps[i] : 1.0 - ps[i];
    terms.emplace_back(w, conditional_expectation(shape, SubsetMask(n, mask)));
  }
  return ChannelMixture(std::move(terms));
}

//=============================================================================
// Complementary channel and bistochasticity
//=============================================================================

// Channel into the environment space of dimension = Kraus count, with
// [Psi(rho)]_{kl} = Tr(A_l^† A_k rho). Built algebraically from the Kraus
// operators: B_j has (k,i) entry <j|A_k|i>.
inline Channel complementary(const Channel& phi) {
  const int m = phi.kraus_count();
  const int din = phi.dim_in();
  const int dout = phi.dim_out();
  std::vector<ComplexMatrix> b(dout, ComplexMatrix::Zero(m, din));
  for (int j = 0; j < dout; ++j)
    for (int k = 0; k < m; ++k) b[j].row(k) = phi.kraus()[k].row(j);
  return Channel(std::move(b), "complementary:" + phi.label());
}

// True iff ||Phi(I) - I||_inf <= tol_tp. Requires a square channel.
inline bool is_bistochastic(const Channel& phi) {
  if (phi.dim_in() != phi.dim_out())
    throw std::invalid_argument("is_bistochastic: channel must be square");
  const int d = phi.dim_in();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& a : phi.kraus()) out.noalias() += a * a.adjoint();
  return schatten_norm(out - ComplexMatrix::Identity(d, d),
                       std::numeric_limits<double>::infinity()) <= tol::tp;
}

}  // namespace qpurity
