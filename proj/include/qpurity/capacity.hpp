#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpurity/purity.hpp"

namespace qpurity {

//=============================================================================
// Ensembles
//=============================================================================

// Finite probability distribution over pure states {p_i, |psi_i>}.
struct EnsembleState {
  std::vector<double> probs;
  std::vector<PureState> states;

  EnsembleState(std::vector<double> p, std::vector<PureState> s)
      : probs(std::move(p)), states(std::move(s)) {
    if (probs.empty() || probs.size() != states.size())
      throw std::invalid_argument("EnsembleState: size mismatch");
    double sum = 0.0;
    const int dim = states.front().dim();
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] < -1e-15)
        throw std::invalid_argument("EnsembleState: negative probability");
      if (states[i].dim() != dim)
        throw std::invalid_argument("EnsembleState: mixed state dimensions");
      sum += probs[i];
    }
    if (std::abs(sum - 1.0) > tol::trace)
      throw std::invalid_argument("EnsembleState: probabilities sum to " +
                                  fmt12(sum));
  }

  int size() const { return static_cast<int>(probs.size()); }
  int dim() const { return states.front().dim(); }
};

// Product ensemble {p_i q_j, |psi_i> (x) |phi_j>}.
inline EnsembleState tensor_ensemble(const EnsembleState& a,
                                     const EnsembleState& b) {
  std::vector<double> probs;
  std::vector<PureState> states;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      probs.push_back(a.probs[i] * b.probs[j]);
      states.push_back(tensor_state(a.states[i], b.states[j]));
    }
  return EnsembleState(std::move(probs), std::move(states));
}

//=============================================================================
// Holevo quantity and capacity
//=============================================================================

// chi = H(sum_i p_i Phi(rho_i)) - sum_i p_i H(Phi(rho_i)) in bits.
inline double holevo_quantity(const Channel& phi, const EnsembleState& ens) {
  if (ens.dim() != phi.dim_in())
    throw std::invalid_argument("holevo_quantity: ensemble dimension mismatch");
  ComplexMatrix avg = ComplexMatrix::Zero(phi.dim_out(), phi.dim_out());
  double mean_h = 0.0;
  for (int i = 0; i < ens.size(); ++i) {
    const ComplexMatrix out = phi.apply_pure(ens.states[i].amplitudes());
    avg += ens.probs[i] * out;
    mean_h += ens.probs[i] * detail::entropy_psd(out);
  }
  return detail::entropy_psd(avg) - mean_h;
}

struct CapacityResult {
  double value = 0.0;  // bits
  EnsembleState ensemble;
  double upper_bound = 0.0;  // bits
  std::string method;
  int converged_restarts = 0;
  int best_restart = -1;
  int restarts_total = 0;
};

// C(Phi) <= log2 dim_out - nu_H(Phi).
inline double capacity_upper_bound(const Channel& phi, double nu_h_bits) {
  return std::log2(double(phi.dim_out())) - nu_h_bits;
}

namespace detail {

// Deterministic informationally rich seed ensemble of d^2 states:
// the d basis vectors plus (e_i+e_j)/sqrt2 and (e_i+i e_j)/sqrt2 pairs.
inline std::vector<PureState> deterministic_ensemble_states(int d) {
  std::vector<PureState> states;
  for (int i = 0; i < d; ++i) states.push_back(PureState::basis(d, i));
  const std::complex<double> i01(0.0, 1.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      ComplexVector v = ComplexVector::Zero(d);
      v[i] = 1.0;
      v[j] = 1.0;
      states.push_back(PureState::normalized(v));
      v[j] = i01;
      states.push_back(PureState::normalized(v));
    }
  return states;
}

// Multiplicative-weights (Blahut-Arimoto) ascent of chi over probabilities
// with the output states held fixed. chi is concave in the probabilities;
// the update p_i <- p_i exp(D(sigma_i || sigma_bar)) / Z increases it.
inline std::vector<double> ba_probabilities(std::vector<double> probs,
                                            const std::vector<ComplexMatrix>& outputs,
                                            int max_iters = 500,
                                            double rel_tol = 1e-10) {
  const int m = static_cast<int>(outputs.size());
  const int d = static_cast<int>(outputs.front().rows());
  std::vector<double> h_nats(m);
  for (int i = 0; i < m; ++i)
    h_nats[i] = entropy_psd(outputs[i]) / kLog2E;

  double prev_chi = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    ComplexMatrix avg = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < m; ++i) avg += probs[i] * outputs[i];
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (avg + avg.adjoint()));
    const RealVector mu = es.eigenvalues();
    const ComplexMatrix& u = es.eigenvectors();

    // D(sigma_i || avg) in nats; support(sigma_i) lies inside support(avg)
    // whenever p_i > 0, so the floor only guards exact zeros.
    std::vector<double> div(m);
    double chi = 0.0;
    for (int i = 0; i < m; ++i) {
      double tr_log = 0.0;
      for (int a = 0; a < d; ++a) {
        const double w = (u.col(a).adjoint() * outputs[i] * u.col(a))(0).real();
        tr_log += w * std::log(std::max(mu[a], 1e-18));
      }
      div[i] = -h_nats[i] - tr_log;
      chi += probs[i] * div[i];
    }
    if (std::abs(chi - prev_chi) <= rel_tol * std::max(1.0, std::abs(chi)))
      break;
    prev_chi = chi;

    const double dmax = *std::max_element(div.begin(), div.end());
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
      probs[i] *= std::exp(div[i] - dmax);
      z += probs[i];
    }
    for (int i = 0; i < m; ++i) probs[i] /= z;
  }
  return probs;
}

}  // namespace detail

// One-step classical capacity by alternating ensemble optimization over
// m = dim_in^2 pure states: probabilities by multiplicative reweighting,
// states by sphere local ascent, multi-start over cfg.restarts. The value is
// an achieved lower bound; upper_bound carries log2 dim_out - nu_H.
inline CapacityResult capacity(const Channel& phi, const OptimizerConfig& cfg,
                               const std::vector<EnsembleState>& seed_ensembles = {}) {
  cfg.validate();
  const int d = phi.dim_in();
  const int m = d * d;
  constexpr int kMaxRounds = 50;
  constexpr double kPruneTol = 1e-12;

  OptimizerConfig state_cfg = cfg;
  state_cfg.max_iters = std::min(cfg.max_iters, 120);

  const int total =
      std::max(cfg.restarts, 1 + static_cast<int>(seed_ensembles.size()));

  double best_chi = -1.0;
  std::vector<double> best_probs;
  std::vector<PureState> best_states;
  int best_idx = -1;
  int converged_count = 0;

  for (int r = 0; r < total; ++r) {
    RandomStream rng = RandomStream::substream(cfg.seed, 1000 + r);
    std::vector<PureState> states;
    std::vector<double> probs;
    if (r == 0) {
      states = detail::deterministic_ensemble_states(d);
      probs.assign(states.size(), 1.0 / double(states.size()));
    } else if (r - 1 < static_cast<int>(seed_ensembles.size())) {
      const EnsembleState& e = seed_ensembles[r - 1];
      if (e.dim() != d)
        throw std::invalid_argument("capacity: seed ensemble dimension mismatch");
      states = e.states;
      probs = e.probs;
    } else {
      for (int i = 0; i < m; ++i) states.push_back(PureState(rng.unit_vector(d)));
      probs.assign(m, 1.0 / double(m));
    }

    std::vector<ComplexMatrix> outputs;
    for (const auto& s : states) outputs.push_back(phi.apply_pure(s.amplitudes()));
    auto chi_of = [&]() {
      ComplexMatrix avg = ComplexMatrix::Zero(phi.dim_out(), phi.dim_out());
      double mean_h = 0.0;
      for (std::size_t i = 0; i < outputs.size(); ++i) {
        avg += probs[i] * outputs[i];
        mean_h += probs[i] * detail::entropy_psd(outputs[i]);
      }
      return detail::entropy_psd(avg) - mean_h;
    };

    double chi = chi_of();
    bool restart_converged = false;
    for (int round = 0; round < kMaxRounds; ++round) {
      probs = detail::ba_probabilities(probs, outputs);
      for (std::size_t i = 0; i < states.size(); ++i) {
        if (probs[i] <= kPruneTol) continue;
        ComplexMatrix rest = ComplexMatrix::Zero(phi.dim_out(), phi.dim_out());
        for (std::size_t j = 0; j < outputs.size(); ++j)
          if (j != i) rest += probs[j] * outputs[j];
        const double pi = probs[i];
        auto objective = [&](const ComplexVector& psi) -> detail::ObjectiveEval {
          const ComplexMatrix out = phi.apply_pure(psi);
          const double v = detail::entropy_psd(rest + pi * out) -
                           pi * detail::entropy_psd(out);
          return {v, std::numeric_limits<double>::infinity()};
        };
        detail::SphereOutcome o = detail::optimize_unit_sphere(
            objective, states[i].amplitudes(), true, state_cfg, rng);
        states[i] = PureState::normalized(o.x);
        outputs[i] = phi.apply_pure(states[i].amplitudes());
      }
      const double next = chi_of();
      if (next - chi < cfg.value_tol) {
        chi = std::max(chi, next);
        restart_converged = true;
        break;
      }
      chi = next;
    }
    probs = detail::ba_probabilities(probs, outputs);
    chi = chi_of();

    if (restart_converged) ++converged_count;
    if (chi > best_chi) {
      best_chi = chi;
      best_probs = probs;
      best_states = states;
      best_idx = r;
    }
  }

  // Prune zero-probability members and renormalize.
  std::vector<double> probs;
  std::vector<PureState> states;
  double z = 0.0;
  for (std::size_t i = 0; i < best_probs.size(); ++i) {
    if (best_probs[i] > kPruneTol) {
      probs.push_back(best_probs[i]);
      states.push_back(best_states[i]);
      z += best_probs[i];
    }
  }
  for (auto& p : probs) p /= z;

  const PurityResult ent = nu_entropy(phi, cfg);
  return CapacityResult{std::max(best_chi, 0.0),
                        EnsembleState(std::move(probs), std::move(states)),
                        capacity_upper_bound(phi, ent.value),
                        "ensemble-opt",
                        converged_count,
                        best_idx,
                        total};
}

// Shortcut for binary bistochastic channels: C = log 2 - min_rho H(Phi(rho)),
// achieved by the equiprobable pair {rho*, I - rho*} at the entropy minimizer.
inline CapacityResult capacity_binary_bistochastic(const Channel& phi,
                                                   const OptimizerConfig& cfg) {
  if (phi.dim_in() != 2 || phi.dim_out() != 2)
    throw std::invalid_argument(
        "capacity_binary_bistochastic: channel must be binary");
  if (!is_bistochastic(phi))
    throw std::invalid_argument(
        "capacity_binary_bistochastic: channel is not bistochastic");
  const PurityResult ent = nu_entropy(phi, cfg);
  const ComplexVector& psi = ent.argmax_state.amplitudes();
  ComplexVector orth(2);
  orth[0] = -std::conj(psi[1]);
  orth[1] = std::conj(psi[0]);
  EnsembleState ens({0.5, 0.5},
                    {ent.argmax_state, PureState::normalized(orth)});
  const double value = 1.0 - ent.value;
  return CapacityResult{value,           std::move(ens),
                        value,           "binary-bistochastic",
                        ent.converged_restarts, ent.best_restart,
                        ent.restarts_total};
}

}  // namespace qpurity
