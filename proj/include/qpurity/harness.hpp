#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpurity/capacity.hpp"
#include "qpurity/purity.hpp"

namespace qpurity {

//=============================================================================
// Report types
//=============================================================================

// Two-sided comparison of a tensor-product functional against the product of
// (or sum over) its factors. For max-type measures gap = joint - product, for
// min-type (entropy, smallest eigenvalue) gap = product - joint; the easy
// inequality direction makes gap >= -tol_gap always.
struct GapReport {
  std::string measure;
  std::string channel_a;
  std::string channel_b;
  double joint_value = 0.0;
  double product_value = 0.0;
  double gap = 0.0;
  bool min_type = false;
  int converged_joint = 0;
  int converged_a = 0;
  int converged_b = 0;
  int best_restart_joint = -1;
};

inline constexpr double kGapTolerance = 1e-6;

struct ExpansionRow {
  double param = 0.0;      // eps, q, or p
  double measured = 0.0;
  double predicted = 0.0;
  double residual = 0.0;
  double ratio = 0.0;      // residual / leading parameter
  std::string note;
};

struct ExpansionReport {
  std::string kind;
  std::vector<ExpansionRow> rows;
  double fitted_order = 0.0;      // log-log slope of |residual| vs param
  bool ratios_decreasing = true;  // weak-noise scans
  bool monotone = true;           // p->1 scans
  bool product_below_entangled = true;  // strong depolarization
  double reference = 0.0;  // nu_flat(base), mean flat, or nu_H target
  double flat_delta = 0.0; // |nu_flat(delta Phi) - mean factor flat|
  int min_converged = std::numeric_limits<int>::max();
};

namespace detail {

inline void require_strictly_decreasing(const std::vector<double>& xs,
                                        const std::string& what) {
  if (xs.empty()) throw std::invalid_argument(what + ": empty grid");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1]))
      throw std::invalid_argument(what + ": grid must be strictly decreasing");
}

// Least-squares slope of ln y against ln x over points with y > floor.
inline double loglog_slope(const std::vector<std::pair<double, double>>& xy,
                           double floor = 1e-14) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [x, y] : xy) {
    if (!(x > 0.0) || !(y > floor)) continue;
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

}  // namespace detail

//=============================================================================
// Product gaps
//=============================================================================

// Computes nu_*(phi1 (x) phi2) against the factor values with shared config.
// The joint optimizer is seeded with the tensor product of the factor
// optimizers' states, so the easy inequality direction is always achieved.
inline GapReport product_gap(const Channel& phi1, const Channel& phi2,
                             const Measure& m, const OptimizerConfig& cfg) {
  const PurityResult r1 = optimize_measure(phi1, m, cfg);
  const PurityResult r2 = optimize_measure(phi2, m, cfg);
  const Channel joint = tensor_channel(phi1, phi2);
  const std::vector<PureState> seeds = {
      tensor_state(r1.argmax_state, r2.argmax_state)};
  const PurityResult rj = optimize_measure(joint, m, cfg, seeds);

  const bool min_type =
      m.kind == MeasureKind::entropy || m.kind == MeasureKind::min_eig;
  const double product = m.kind == MeasureKind::entropy
                             ? r1.value + r2.value
                             : r1.value * r2.value;
  const double gap = min_type ? product - rj.value : rj.value - product;
  return GapReport{m.name(),  phi1.label(),         phi2.label(),
                   rj.value,  product,              gap,
                   min_type,  rj.converged_restarts, r1.converged_restarts,
                   r2.converged_restarts, rj.best_restart};
}

//=============================================================================
// Depolarizing closed forms
//=============================================================================

struct ClosedFormRow {
  std::string measure;
  double closed_form = 0.0;
  double optimizer_value = 0.0;
  double deviation = 0.0;
  int converged_restarts = 0;
  int best_restart = -1;
};

// Closed-form values for a product of depolarizing channels:
//   nu_2      = prod ((d_i-1)/d_i (1-p_i)^2 + 1/d_i)^(1/2)
//   nu_inf    = prod (1 - p_i (d_i-1)/d_i)
//   nu_-inf   = prod p_i/d_i
// each compared against the corresponding optimizer value.
inline std::vector<ClosedFormRow> depolarizing_closed_forms(
    const std::vector<int>& dims, const std::vector<double>& ps,
    const OptimizerConfig& cfg) {
  if (dims.empty() || dims.size() != ps.size())
    throw std::invalid_argument("depolarizing_closed_forms: need one p per dim");
  double closed2 = 1.0, closed_inf = 1.0, closed_min = 1.0;
  std::vector<Channel> factors;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double d = dims[i], p = ps[i];
    closed2 *= std::sqrt((d - 1.0) / d * (1.0 - p) * (1.0 - p) + 1.0 / d);
    closed_inf *= 1.0 - p * (d - 1.0) / d;
    closed_min *= p / d;
    factors.push_back(depolarizing(dims[i], p));
  }
  const Channel phi = tensor_channel_all(factors);
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<ClosedFormRow> rows;
  const PurityResult r2 = nu_p(phi, 2.0, cfg);
  rows.push_back({"p=2", closed2, r2.value, std::abs(r2.value - closed2),
                  r2.converged_restarts, r2.best_restart});
  const PurityResult ri = nu_p(phi, inf, cfg);
  rows.push_back({"p=inf", closed_inf, ri.value,
                  std::abs(ri.value - closed_inf), ri.converged_restarts,
                  ri.best_restart});
  const PurityResult rm = nu_minus_inf(phi, cfg);
  rows.push_back({"mininv", closed_min, rm.value,
                  std::abs(rm.value - closed_min), rm.converged_restarts,
                  rm.best_restart});
  return rows;
}

//=============================================================================
// Weak-noise expansions
//=============================================================================

// Measures nu_inf((1-eps) Id + eps Phi) against the first-order prediction
// 1 - eps + eps nu_flat(Phi). The ratios residual/eps must fall toward 0.
inline ExpansionReport weaknoise_scan(const Channel& base,
                                      const std::vector<double>& eps_list,
                                      const OptimizerConfig& cfg) {
  detail::require_strictly_decreasing(eps_list, "weaknoise_scan eps_list");
  for (double e : eps_list)
    if (!(e > 0.0 && e <= 0.5))
      throw std::invalid_argument("weaknoise_scan: eps must lie in (0, 1/2]");
  const PurityResult flat = nu_flat(base, cfg);
  const double inf = std::numeric_limits<double>::infinity();

  ExpansionReport rep;
  rep.kind = "weaknoise";
  rep.reference = flat.value;
  rep.min_converged = flat.converged_restarts;
  std::vector<std::pair<double, double>> fit;
  double prev_ratio = inf;
  for (double eps : eps_list) {
    const Channel noisy = weak_noise(base, eps);
    const PurityResult r = nu_p(noisy, inf, cfg, {flat.argmax_state});
    const double predicted = 1.0 - eps + eps * flat.value;
    const double residual = r.value - predicted;
    const double ratio = residual / eps;
    rep.rows.push_back({eps, r.value, predicted, residual, ratio, ""});
    rep.min_converged = std::min(rep.min_converged, r.converged_restarts);
    if (!(ratio < prev_ratio)) rep.ratios_decreasing = false;
    prev_ratio = ratio;
    fit.emplace_back(eps, std::abs(residual));
  }
  rep.fitted_order = detail::loglog_slope(fit);
  return rep;
}

// Tensor product of weak-noise channels against the averaged-channel
// prediction 1 - n eps + eps sum_k nu_flat(Phi_k); also checks directly that
// nu_flat(delta Phi) equals the mean of the factor flats.
inline ExpansionReport weaknoise_product_check(
    const std::vector<Channel>& bases, const std::vector<double>& eps_list,
    const OptimizerConfig& cfg) {
  if (bases.size() < 2)
    throw std::invalid_argument("weaknoise_product_check: need >= 2 factors");
  detail::require_strictly_decreasing(eps_list,
                                      "weaknoise_product_check eps_list");
  const int n = static_cast<int>(bases.size());
  const double inf = std::numeric_limits<double>::infinity();

  ExpansionReport rep;
  rep.kind = "weaknoise-product";

  double flat_sum = 0.0;
  std::vector<PurityResult> flats;
  for (const auto& b : bases) {
    flats.push_back(nu_flat(b, cfg));
    flat_sum += flats.back().value;
    rep.min_converged =
        std::min(rep.min_converged, flats.back().converged_restarts);
  }
  const double flat_mean = flat_sum / n;
  rep.reference = flat_mean;

  // delta Phi = average of Id (x) ... (x) Phi_k (x) ... (x) Id.
  std::vector<std::pair<double, Channel>> terms;
  for (int k = 0; k < n; ++k) {
    std::vector<Channel> embed;
    for (int i = 0; i < n; ++i)
      embed.push_back(i == k ? bases[k] : identity_channel(bases[i].dim_in()));
    terms.emplace_back(1.0 / n, tensor_channel_all(embed));
  }
  const Channel delta_phi = mix(ChannelMixture(std::move(terms)));
  const PurityResult flat_delta = nu_flat(delta_phi, cfg);
  rep.flat_delta = std::abs(flat_delta.value - flat_mean);
  rep.min_converged = std::min(rep.min_converged, flat_delta.converged_restarts);

  PureState product_seed = flats[0].argmax_state;
  for (int k = 1; k < n; ++k)
    product_seed = tensor_state(product_seed, flats[k].argmax_state);

  std::vector<std::pair<double, double>> fit;
  double prev_ratio = inf;
  for (double eps : eps_list) {
    std::vector<Channel> noisy;
    for (const auto& b : bases) noisy.push_back(weak_noise(b, eps));
    const Channel joint = tensor_channel_all(noisy);
    const PurityResult r = nu_p(joint, inf, cfg, {product_seed});
    const double predicted = 1.0 - n * eps + eps * flat_sum;
    const double residual = r.value - predicted;
    const double ratio = residual / eps;
    rep.rows.push_back({eps, r.value, predicted, residual, ratio, ""});
    rep.min_converged = std::min(rep.min_converged, r.converged_restarts);
    if (!(ratio < prev_ratio)) rep.ratios_decreasing = false;
    prev_ratio = ratio;
    fit.emplace_back(eps, std::abs(residual));
  }
  rep.fitted_order = detail::loglog_slope(fit);
  return rep;
}

//=============================================================================
// Strong depolarization
//=============================================================================

namespace detail {
// Tr A_1^2 = d sum_i q_i^2 (d_i Tr rho_i^2 - 1) for the second-order
// expansion of a product of depolarizing channels at p_i = 1 - q_i.
inline double strong_depol_tr_a1_sq(const FactorShape& shape,
                                    const std::vector<double>& qs,
                                    const ComplexMatrix& state) {
  double acc = 0.0;
  for (int i = 0; i < shape.count(); ++i) {
    const ComplexMatrix rho_i = partial_trace(state, shape, {i});
    const double purity = (rho_i * rho_i).trace().real();
    acc += qs[i] * qs[i] * (shape.dim(i) * purity - 1.0);
  }
  return shape.total() * acc;
}
}  // namespace detail

// Exact output entropy of a strongly depolarizing product channel against the
// second-order prediction log2 d - Tr A_1^2 / (2 d ln 2), probed on random
// product and entangled pure inputs. Residuals are fitted against q on a
// log-log scale (cubic remainder); the prediction's minimizer property is
// checked by comparing product inputs against the maximally entangled one.
inline ExpansionReport strong_depolarization_check(
    const std::vector<int>& dims, const std::vector<double>& q_list, int trials,
    const OptimizerConfig& cfg) {
  detail::require_strictly_decreasing(q_list, "strong_depolarization q_list");
  for (double q : q_list)
    if (!(q > 0.0 && q <= 0.1))
      throw std::invalid_argument(
          "strong_depolarization_check: q must lie in (0, 0.1]");
  if (trials < 1)
    throw std::invalid_argument("strong_depolarization_check: trials < 1");
  const FactorShape shape{dims};
  const int n = shape.count();
  const int d = shape.total();
  const double log2d = std::log2(double(d));

  ExpansionReport rep;
  rep.kind = "strong-depolarization";
  rep.reference = log2d;
  rep.min_converged = 0;  // no optimizer involved

  // Maximally entangled probe across the first two factors (identical dims)
  // or the full space otherwise.
  ComplexVector maxent;
  if (n == 2 && dims[0] == dims[1]) {
    maxent = ComplexVector::Zero(d);
    for (int i = 0; i < dims[0]; ++i) maxent[i * dims[0] + i] = 1.0;
    maxent /= maxent.norm();
  }

  std::vector<std::pair<double, double>> fit;
  for (std::size_t qi = 0; qi < q_list.size(); ++qi) {
    const double q = q_list[qi];
    const std::vector<double> qs(n, q);
    std::vector<Channel> factors;
    for (int i = 0; i < n; ++i) factors.push_back(depolarizing(dims[i], 1.0 - q));
    const Channel phi = tensor_channel_all(factors);

    auto probe = [&](const ComplexVector& psi, const std::string& kind) {
      const ComplexMatrix state = psi * psi.adjoint();
      const double h_exact = detail::entropy_psd(phi.apply_pure(psi));
      const double tr_a1_sq = detail::strong_depol_tr_a1_sq(shape, qs, state);
      const double predicted = log2d - tr_a1_sq / (2.0 * d) * kLog2E;
      const double residual = std::abs(h_exact - predicted);
      rep.rows.push_back({q, h_exact, predicted, residual, residual / q, kind});
      fit.emplace_back(q, residual);
      return h_exact;
    };

    double max_product_h = -std::numeric_limits<double>::infinity();
    // Deterministic product probe: first basis state.
    max_product_h = std::max(
        max_product_h, probe(PureState::basis(d, 0).amplitudes(), "product"));
    for (int t = 0; t < trials; ++t) {
      RandomStream rng =
          RandomStream::substream(cfg.seed, 5000 + 100 * qi + t);
      if (t % 2 == 0) {
        ComplexVector psi = rng.unit_vector(dims[0]);
        for (int i = 1; i < n; ++i)
          psi = tensor_vector(psi, rng.unit_vector(dims[i]));
        max_product_h = std::max(max_product_h, probe(psi, "product"));
      } else {
        probe(rng.unit_vector(d), "entangled");
      }
    }
    if (maxent.size() > 0) {
      const double h_ent = probe(maxent, "maxent");
      if (!(max_product_h < h_ent)) rep.product_below_entangled = false;
    }
  }
  rep.fitted_order = detail::loglog_slope(fit);
  return rep;
}

//=============================================================================
// p -> 1 limit scan
//=============================================================================

// s(p) = (1 - nu_p(Phi)^p) / ((p-1) ln 2) in bits, monotone nondecreasing as
// p decreases to 1 and approaching nu_H(Phi) from below.
inline ExpansionReport pnorm_limit_scan(const Channel& phi,
                                        const std::vector<double>& p_list,
                                        const OptimizerConfig& cfg) {
  detail::require_strictly_decreasing(p_list, "pnorm_limit_scan p_list");
  for (double p : p_list)
    if (!(p > 1.0))
      throw std::invalid_argument("pnorm_limit_scan: p values must exceed 1");

  const PurityResult ent = nu_entropy(phi, cfg);
  ExpansionReport rep;
  rep.kind = "pnorm-limit";
  rep.reference = ent.value;
  rep.min_converged = ent.converged_restarts;

  std::vector<std::pair<double, double>> fit;
  double prev_s = -std::numeric_limits<double>::infinity();
  for (double p : p_list) {
    const PurityResult r = nu_p(phi, p, cfg, {ent.argmax_state});
    const double s = (1.0 - std::pow(r.value, p)) / (p - 1.0) * kLog2E;
    const double residual = ent.value - s;
    rep.rows.push_back({p, s, ent.value, residual, residual / (p - 1.0), ""});
    rep.min_converged = std::min(rep.min_converged, r.converged_restarts);
    if (s < prev_s - 1e-10) rep.monotone = false;
    prev_s = std::max(prev_s, s);
    fit.emplace_back(p - 1.0, std::abs(residual));
  }
  rep.fitted_order = detail::loglog_slope(fit);
  return rep;
}

//=============================================================================
// Capacity additivity
//=============================================================================

// Sandwich for C(phi1 (x) phi2): the chi of the product of factor-optimal
// ensembles from below, log2(dim) - nu_H(phi1 (x) phi2) from above. A small
// gap certifies additivity numerically at n = 2.
inline GapReport capacity_additivity_check(const Channel& phi1,
                                           const Channel& phi2,
                                           const OptimizerConfig& cfg) {
  auto factor_capacity = [&](const Channel& phi) {
    if (phi.dim_in() == 2 && phi.dim_out() == 2 && is_bistochastic(phi))
      return capacity_binary_bistochastic(phi, cfg);
    return capacity(phi, cfg);
  };
  const CapacityResult c1 = factor_capacity(phi1);
  const CapacityResult c2 = factor_capacity(phi2);
  const Channel joint = tensor_channel(phi1, phi2);

  const EnsembleState product_ens = tensor_ensemble(c1.ensemble, c2.ensemble);
  const double lower = holevo_quantity(joint, product_ens);

  // Entropy minimizer of the joint channel, seeded with the product of the
  // factor minimizers.
  const PurityResult e1 = nu_entropy(phi1, cfg);
  const PurityResult e2 = nu_entropy(phi2, cfg);
  const PurityResult ej = nu_entropy(
      joint, cfg, {tensor_state(e1.argmax_state, e2.argmax_state)});
  const double upper = capacity_upper_bound(joint, ej.value);

  return GapReport{"capacity",
                   phi1.label(),
                   phi2.label(),
                   upper,
                   lower,
                   upper - lower,
                   false,
                   ej.converged_restarts,
                   c1.converged_restarts,
                   c2.converged_restarts,
                   ej.best_restart};
}

}  // namespace qpurity
