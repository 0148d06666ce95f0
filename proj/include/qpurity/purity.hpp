#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpurity/channel.hpp"
#include "qpurity/rng.hpp"

namespace qpurity {

//=============================================================================
// Purity measures
//=============================================================================

enum class MeasureKind { pnorm, entropy, min_eig, flat };

struct Measure {
  MeasureKind kind = MeasureKind::pnorm;
  double p = 2.0;

  static Measure pnorm(double p) { return {MeasureKind::pnorm, p}; }
  static Measure entropy() { return {MeasureKind::entropy, 0.0}; }
  static Measure min_eig() { return {MeasureKind::min_eig, 0.0}; }
  static Measure flat() { return {MeasureKind::flat, 0.0}; }

  // p-norms and the diagonal fidelity are maximized, entropy and the
  // smallest output eigenvalue minimized.
  bool maximize() const {
    return kind == MeasureKind::pnorm || kind == MeasureKind::flat;
  }

  std::string name() const {
    switch (kind) {
      case MeasureKind::pnorm:
        return std::isinf(p) ? "p=inf" : "p=" + fmt12(p);
      case MeasureKind::entropy: return "entropy";
      case MeasureKind::min_eig: return "mininv";
      case MeasureKind::flat: return "flat";
    }
    return "?";
  }
};

inline Measure parse_measure(const std::string& text) {
  if (text == "entropy") return Measure::entropy();
  if (text == "mininv") return Measure::min_eig();
  if (text == "flat") return Measure::flat();
  if (text.rfind("p=", 0) == 0) {
    const std::string arg = text.substr(2);
    if (arg == "inf") return Measure::pnorm(std::numeric_limits<double>::infinity());
    try {
      std::size_t used = 0;
      const double p = std::stod(arg, &used);
      if (used == arg.size()) return Measure::pnorm(p);
    } catch (const std::exception&) {
    }
  }
  throw std::invalid_argument(
      "parse_measure: expected p=<x>|p=inf|entropy|mininv|flat, got '" + text +
      "'");
}

//=============================================================================
// Optimizer configuration and results
//=============================================================================

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 2000;
  double step_tol = 1e-10;
  double value_tol = 1e-9;
  std::uint64_t seed = 42;

  void validate() const {
    if (restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts < 1");
    if (max_iters < 1) throw std::invalid_argument("OptimizerConfig: max_iters < 1");
    if (!(step_tol > 0.0) || !(value_tol > 0.0))
      throw std::invalid_argument("OptimizerConfig: tolerances must be > 0");
  }
};

struct PurityResult {
  double value = 0.0;
  PureState argmax_state;      // optimizing input (coefficient vector for the
                               // Kraus characterization of the operator norm)
  std::string measure;
  int converged_restarts = 0;
  int best_restart = -1;
  int restarts_total = 0;
};

//=============================================================================
// Sphere optimizer
//=============================================================================

namespace detail {

struct ObjectiveEval {
  double value = 0.0;
  // Eigenvalue gap relevant to the measure; near-degeneracy (< 1e-8)
  // triggers random perturbation probes when line search stalls.
  double gap = std::numeric_limits<double>::infinity();
};

struct SphereOutcome {
  ComplexVector x;
  double value = 0.0;
  bool converged = false;
  int iters = 0;
};

// Multi-start local ascent/descent on the unit sphere of C^n: central
// finite-difference gradients on the real 2n-parameter representation,
// renormalization after each step, backtracking on non-improvement.
template <typename F>
SphereOutcome optimize_unit_sphere(const F& objective, const ComplexVector& seed,
                                   bool maximize, const OptimizerConfig& cfg,
                                   RandomStream& rng) {
  constexpr double kFdStep = 1e-6;
  constexpr double kDegenerateGap = 1e-8;
  constexpr int kProbes = 20;
  constexpr int kStallLimit = 3;

  const int n = static_cast<int>(seed.size());
  const double sign = maximize ? 1.0 : -1.0;

  ComplexVector x = seed.normalized();
  ObjectiveEval cur = objective(x);
  double step = 0.25;
  int stall = 0;
  bool converged = false;
  int iter = 0;

  ComplexVector grad(n), work(n);
  for (; iter < cfg.max_iters; ++iter) {
    // Gradient of f(x/|x|) by central differences per real coordinate.
    for (int i = 0; i < n; ++i) {
      double dre, dim;
      for (int part = 0; part < 2; ++part) {
        const std::complex<double> delta =
            part == 0 ? std::complex<double>(kFdStep, 0.0)
                      : std::complex<double>(0.0, kFdStep);
        work = x;
        work[i] += delta;
        const double fp = objective(work.normalized()).value;
        work = x;
        work[i] -= delta;
        const double fm = objective(work.normalized()).value;
        (part == 0 ? dre : dim) = (fp - fm) / (2.0 * kFdStep);
      }
      grad[i] = std::complex<double>(dre, dim);
    }
    // Project out the radial and global-phase directions.
    grad -= x.dot(grad) * x;
    const double gnorm = grad.norm();

    bool improved = false;
    double accepted_step = step;
    if (gnorm > 1e-14) {
      const ComplexVector dir = (sign / gnorm) * grad;
      for (double s = step; s >= cfg.step_tol; s *= 0.5) {
        work = (x + s * dir).normalized();
        const ObjectiveEval trial = objective(work);
        if (sign * (trial.value - cur.value) > 0.0) {
          const double delta = std::abs(trial.value - cur.value);
          x = work;
          cur = trial;
          improved = true;
          accepted_step = s;
          stall = (delta < cfg.value_tol) ? stall + 1 : 0;
          break;
        }
      }
    }
    if (!improved && cur.gap < kDegenerateGap) {
      // Near-degenerate eigenvalue: finite differences are unreliable, probe
      // random tangent directions at the current scale.
      for (int probe = 0; probe < kProbes && !improved; ++probe) {
        ComplexVector t = rng.unit_vector(n);
        t -= x.dot(t) * x;
        const double tn = t.norm();
        if (tn < 1e-12) continue;
        work = (x + step * (sign / tn) * t).normalized();
        const ObjectiveEval trial = objective(work);
        if (sign * (trial.value - cur.value) > 0.0) {
          const double delta = std::abs(trial.value - cur.value);
          x = work;
          cur = trial;
          improved = true;
          stall = (delta < cfg.value_tol) ? stall + 1 : 0;
        }
      }
    }
    if (!improved) {
      // No improving direction down to step_tol: local extremum.
      converged = true;
      break;
    }
    step = std::min(0.5, accepted_step * 2.0);
    if (stall >= kStallLimit) {
      converged = true;
      break;
    }
  }
  return {std::move(x), cur.value, converged, iter};
}

// Measure evaluation on the channel output for a pure input.
inline ObjectiveEval eval_measure(const Channel& phi, const ComplexVector& psi,
                                  const Measure& m) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (m.kind == MeasureKind::flat) {
    double acc = 0.0;
    for (const auto& a : phi.kraus()) acc += std::norm(psi.dot(a * psi));
    return {acc, kInf};
  }
  const RealVector ev = hermitian_eigenvalues(phi.apply_pure(psi));  // ascending
  const int d = static_cast<int>(ev.size());
  switch (m.kind) {
    case MeasureKind::pnorm: {
      if (std::isinf(m.p)) {
        const double top = std::max(ev[d - 1], 0.0);
        return {top, d >= 2 ? ev[d - 1] - ev[d - 2] : kInf};
      }
      double acc = 0.0;
      for (int i = 0; i < d; ++i) acc += std::pow(std::max(ev[i], 0.0), m.p);
      return {std::pow(acc, 1.0 / m.p), kInf};
    }
    case MeasureKind::entropy: {
      double h = 0.0;
      for (int i = 0; i < d; ++i) {
        const double lam = std::clamp(ev[i], 0.0, 1.0);
        if (lam > 0.0) h -= lam * std::log2(lam);
      }
      return {h, kInf};
    }
    case MeasureKind::min_eig:
      return {std::max(ev[0], 0.0), d >= 2 ? ev[1] - ev[0] : kInf};
    default:
      break;
  }
  throw std::logic_error("eval_measure: unhandled measure");
}

// Shared multi-start driver. Deterministic seeds (basis vectors, then the
// caller's extra seeds) come first; at least ceil(restarts/2) uniformly
// random sphere points follow. Reduction is max/min with ties broken by
// lowest restart index, so results are independent of evaluation order.
template <typename F>
PurityResult multistart_optimize(int dim, const F& objective, bool maximize,
                                 const std::string& measure_name,
                                 const OptimizerConfig& cfg,
                                 const std::vector<PureState>& extra_seeds) {
  cfg.validate();
  std::vector<ComplexVector> seeds;
  for (int i = 0; i < dim; ++i) seeds.push_back(PureState::basis(dim, i).amplitudes());
  for (const auto& s : extra_seeds) {
    if (s.dim() != dim)
      throw std::invalid_argument("optimizer seed dimension mismatch");
    seeds.push_back(s.amplitudes());
  }
  const int n_det = static_cast<int>(seeds.size());
  const int n_random = std::max(cfg.restarts - n_det, (cfg.restarts + 1) / 2);
  const int total = n_det + n_random;

  bool have_best = false;
  SphereOutcome best;
  int best_idx = -1;
  int converged = 0;
  for (int r = 0; r < total; ++r) {
    RandomStream rng = RandomStream::substream(cfg.seed, r);
    const ComplexVector x0 = r < n_det ? seeds[r] : rng.unit_vector(dim);
    SphereOutcome out = optimize_unit_sphere(objective, x0, maximize, cfg, rng);
    if (out.converged) ++converged;
    const bool better =
        !have_best ||
        (maximize ? out.value > best.value : out.value < best.value);
    if (better) {
      best = std::move(out);
      best_idx = r;
      have_best = true;
    }
  }
  return PurityResult{best.value, PureState::normalized(best.x), measure_name,
                      converged, best_idx, total};
}

}  // namespace detail

//=============================================================================
// Purity functionals
//=============================================================================

// Generic optimizer over pure inputs for any measure.
inline PurityResult optimize_measure(const Channel& phi, const Measure& m,
                                     const OptimizerConfig& cfg,
                                     const std::vector<PureState>& extra_seeds = {}) {
  if (m.kind == MeasureKind::flat && phi.dim_in() != phi.dim_out())
    throw std::invalid_argument("flat measure requires a square channel");
  auto objective = [&](const ComplexVector& psi) {
    return detail::eval_measure(phi, psi, m);
  };
  return detail::multistart_optimize(phi.dim_in(), objective, m.maximize(),
                                     m.name(), cfg, extra_seeds);
}

// max_rho ||Phi(rho)||_p over pure inputs, p in (1, inf]. The reported value
// is achieved at argmax_state, hence a certified lower bound on the true
// maximum. p <= 1 is rejected (p=1 is identically 1 for TP maps).
inline PurityResult nu_p(const Channel& phi, double p, const OptimizerConfig& cfg,
                         const std::vector<PureState>& extra_seeds = {}) {
  if (std::isnan(p) || p <= 1.0)
    throw std::invalid_argument("nu_p: p must lie in (1, inf], got " + fmt12(p));
  return optimize_measure(phi, Measure::pnorm(p), cfg, extra_seeds);
}

// min_rho H(Phi(rho)) in bits; certified upper bound on the true minimum.
inline PurityResult nu_entropy(const Channel& phi, const OptimizerConfig& cfg,
                               const std::vector<PureState>& extra_seeds = {}) {
  return optimize_measure(phi, Measure::entropy(), cfg, extra_seeds);
}

// min_rho lambda_min(Phi(rho)); 0 when some output is singular.
inline PurityResult nu_minus_inf(const Channel& phi, const OptimizerConfig& cfg,
                                 const std::vector<PureState>& extra_seeds = {}) {
  return optimize_measure(phi, Measure::min_eig(), cfg, extra_seeds);
}

// sup_psi <psi, Phi(|psi><psi|) psi>; requires input and output space equal.
inline PurityResult nu_flat(const Channel& phi, const OptimizerConfig& cfg,
                            const std::vector<PureState>& extra_seeds = {}) {
  return optimize_measure(phi, Measure::flat(), cfg, extra_seeds);
}

// Kraus-form characterization of the operator-norm purity:
// sup over unit coefficient vectors chi of ||sum_k chi_k A_k||^2.
// argmax_state is the optimizing chi (dimension = Kraus count).
inline PurityResult nu_inf_kraus(const Channel& phi, const OptimizerConfig& cfg) {
  const auto& kraus = phi.kraus();
  auto objective = [&](const ComplexVector& chi) -> detail::ObjectiveEval {
    ComplexMatrix m = ComplexMatrix::Zero(phi.dim_out(), phi.dim_in());
    for (int k = 0; k < phi.kraus_count(); ++k) m.noalias() += chi[k] * kraus[k];
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    const double top = s[0];
    const double gap = s.size() >= 2 ? top * top - s[1] * s[1]
                                     : std::numeric_limits<double>::infinity();
    return {top * top, gap};
  };
  return detail::multistart_optimize(phi.kraus_count(), objective, true,
                                     "kraus-inf", cfg, {});
}

// Brute-force Bloch-sphere grid verifier for qubit-input channels:
// psi(theta, phi) = (cos theta/2, e^{i phi} sin theta/2) over a
// resolution x resolution grid.
inline double grid_oracle(const Channel& phi, const Measure& m, int resolution) {
  if (phi.dim_in() != 2)
    throw std::invalid_argument("grid_oracle: requires dim_in = 2");
  if (resolution < 2)
    throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  const bool maximize = m.maximize();
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  ComplexVector psi(2);
  for (int i = 0; i < resolution; ++i) {
    const double theta = M_PI * double(i) / double(resolution - 1);
    for (int j = 0; j < resolution; ++j) {
      const double azimuth = 2.0 * M_PI * double(j) / double(resolution);
      psi[0] = std::cos(0.5 * theta);
      psi[1] = std::polar(std::sin(0.5 * theta), azimuth);
      const double v = detail::eval_measure(phi, psi, m).value;
      best = maximize ? std::max(best, v) : std::min(best, v);
    }
  }
  return best;
}

}  // namespace qpurity
