#pragma once

#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpurity/channel_spec.hpp"
#include "qpurity/harness.hpp"
#include "qpurity/report.hpp"
#include "qpurity/version.hpp"

namespace qpurity {

namespace cli_detail {

struct RunConfig {
  std::uint64_t seed = 42;
  int restarts = 32;
  double tol = 1e-9;
  std::string format = "csv";
  std::string out;

  OptimizerConfig optimizer() const {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.value_tol = tol;
    cfg.step_tol = std::min(tol / 10.0, 1e-10);
    return cfg;
  }
};

inline void add_common_options(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--seed", rc.seed, "Random seed");
  cmd->add_option("--restarts", rc.restarts, "Optimizer restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", rc.tol, "Optimizer value tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--format", rc.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", rc.out, "Output path (default: stdout)");
}

inline std::vector<double> parse_double_list(const std::string& text,
                                             const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument("trailing chars");
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& text,
                                       const std::string& what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    const int i = static_cast<int>(v);
    if (double(i) != v) throw std::invalid_argument(what + ": expected integer");
    out.push_back(i);
  }
  return out;
}

inline std::string state_to_string(const PureState& psi) {
  std::string s;
  for (int i = 0; i < psi.dim(); ++i) {
    if (i) s += " ";
    const auto a = psi.amplitudes()[i];
    s += fmt12(a.real()) + (a.imag() < 0 ? "-" : "+") +
         fmt12(std::abs(a.imag())) + "i";
  }
  return s;
}

inline std::string join_double_list(const std::vector<double>& v,
                                    const char* sep = ";") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += fmt12(v[i]);
  }
  return s;
}

inline std::string join_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(v[i]);
  }
  return s;
}

inline int emit(const Table& table, const RunConfig& rc) {
  const std::string payload = rc.format == "json" ? to_json(table) : to_csv(table);
  if (rc.out.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(rc.out, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot write output file '" << rc.out << "'\n";
      return 1;
    }
    f << payload;
  }
  return 0;
}

}  // namespace cli_detail

// Front-end entry point: parses argv, runs one subcommand, writes one
// CSV/JSON report. Exit codes: 0 success, 1 validation failure,
// 2 optimizer non-convergence (no restart converged).
inline int run_command(int argc, const char* const* argv) {
  using namespace cli_detail;

  CLI::App app{std::string(kToolName) +
               " - output-purity functionals and one-step classical capacity "
               "of quantum channels"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  RunConfig rc;

  // purity
  std::string channel_spec, measure_spec;
  auto* purity_cmd = app.add_subcommand(
      "purity", "Optimize one purity functional of a channel");
  purity_cmd->add_option("--channel", channel_spec, "Channel spec or file")
      ->required();
  purity_cmd
      ->add_option("--measure", measure_spec,
                   "Measure: p=<x>|p=inf|entropy|mininv|flat")
      ->required();
  add_common_options(purity_cmd, rc);

  // capacity
  auto* capacity_cmd = app.add_subcommand(
      "capacity", "One-step classical capacity by ensemble optimization");
  capacity_cmd->add_option("--channel", channel_spec, "Channel spec or file")
      ->required();
  add_common_options(capacity_cmd, rc);

  // product-test
  std::string spec_a, spec_b;
  auto* product_cmd = app.add_subcommand(
      "product-test",
      "Tensor-product value of a measure against the factor product");
  product_cmd->add_option("-a,--a", spec_a, "First factor")->required();
  product_cmd->add_option("-b,--b", spec_b, "Second factor")->required();
  product_cmd
      ->add_option("--measure", measure_spec,
                   "Measure: p=<x>|p=inf|entropy|mininv|flat")
      ->required();
  add_common_options(product_cmd, rc);

  // depolarizing-validate
  std::string dims_text = "2,2", p_text, q_text, eps_text;
  auto* depol_cmd = app.add_subcommand(
      "depolarizing-validate",
      "Closed-form depolarizing purities against the optimizer");
  depol_cmd->add_option("--dims", dims_text, "Factor dimensions, e.g. 2,3")
      ->required();
  depol_cmd
      ->add_option("--p-list", p_text,
                   "Depolarizing parameter per factor, e.g. 0.3,0.6")
      ->required();
  add_common_options(depol_cmd, rc);

  // weaknoise-scan
  auto* weak_cmd = app.add_subcommand(
      "weaknoise-scan", "First-order expansion of nu_inf for weak noise");
  weak_cmd->add_option("--channel", channel_spec, "Base channel")->required();
  weak_cmd->add_option("--eps-list", eps_text,
                       "Strictly decreasing noise levels in (0, 1/2]")
      ->default_val("0.2,0.1,0.05,0.01");
  add_common_options(weak_cmd, rc);

  // strongdepol-check
  int trials = 20;
  auto* strong_cmd = app.add_subcommand(
      "strongdepol-check",
      "Second-order entropy expansion under strong depolarization");
  strong_cmd->add_option("--dims", dims_text, "Factor dimensions")
      ->default_val("2,2");
  strong_cmd->add_option("--q-list", q_text,
                         "Strictly decreasing q = 1-p values in (0, 0.1]")
      ->default_val("0.05,0.02,0.01");
  strong_cmd->add_option("--trials", trials, "Random probe states per q")
      ->check(CLI::PositiveNumber);
  add_common_options(strong_cmd, rc);

  // pnorm-limit
  auto* pnorm_cmd = app.add_subcommand(
      "pnorm-limit", "s(p) = (1 - nu_p^p)/((p-1) ln 2) scan toward p = 1");
  pnorm_cmd->add_option("--channel", channel_spec, "Channel spec or file")
      ->required();
  pnorm_cmd->add_option("--p-list", p_text,
                        "Strictly decreasing exponents > 1")
      ->default_val("1.5,1.2,1.1,1.01,1.001");
  add_common_options(pnorm_cmd, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
    app.exit(e);
    return 1;
  }

  try {
    const OptimizerConfig cfg = rc.optimizer();
    const std::int64_t seed_i = static_cast<std::int64_t>(rc.seed);
    const std::int64_t restarts_i = rc.restarts;

    if (purity_cmd->parsed()) {
      const Channel phi = parse_channel_spec(channel_spec);
      const Measure m = parse_measure(measure_spec);
      PurityResult r = m.kind == MeasureKind::pnorm && std::isinf(m.p) &&
                               measure_spec == "p=inf"
                           ? nu_p(phi, m.p, cfg)
                           : optimize_measure(phi, m, cfg);
      Table t({"version", "command", "seed", "restarts", "channel", "measure",
               "value", "converged_restarts", "best_restart", "argmax_state"});
      t.add_row({std::string(kVersion), std::string("purity"), seed_i,
                 restarts_i, phi.label(), r.measure, r.value,
                 std::int64_t(r.converged_restarts),
                 std::int64_t(r.best_restart),
                 state_to_string(r.argmax_state)});
      const int rcode = emit(t, rc);
      return rcode != 0 ? rcode : (r.converged_restarts == 0 ? 2 : 0);
    }

    if (capacity_cmd->parsed()) {
      const Channel phi = parse_channel_spec(channel_spec);
      const CapacityResult r = capacity(phi, cfg);
      Table t({"version", "command", "seed", "restarts", "channel", "method",
               "value", "upper_bound", "ensemble_size", "ensemble_probs",
               "converged_restarts"});
      t.add_row({std::string(kVersion), std::string("capacity"), seed_i,
                 restarts_i, phi.label(), r.method, r.value, r.upper_bound,
                 std::int64_t(r.ensemble.size()),
                 join_double_list(r.ensemble.probs, " "),
                 std::int64_t(r.converged_restarts)});
      const int rcode = emit(t, rc);
      return rcode != 0 ? rcode : (r.converged_restarts == 0 ? 2 : 0);
    }

    if (product_cmd->parsed()) {
      const Channel a = parse_channel_spec(spec_a);
      const Channel b = parse_channel_spec(spec_b);
      const Measure m = parse_measure(measure_spec);
      const GapReport r = product_gap(a, b, m, cfg);
      Table t({"version", "command", "seed", "restarts", "channel_a",
               "channel_b", "measure", "joint_value", "product_value", "gap",
               "converged_joint", "converged_a", "converged_b"});
      t.add_row({std::string(kVersion), std::string("product-test"), seed_i,
                 restarts_i, r.channel_a, r.channel_b, r.measure,
                 r.joint_value, r.product_value, r.gap,
                 std::int64_t(r.converged_joint), std::int64_t(r.converged_a),
                 std::int64_t(r.converged_b)});
      const int rcode = emit(t, rc);
      if (rcode != 0) return rcode;
      return (r.converged_joint == 0 || r.converged_a == 0 || r.converged_b == 0)
                 ? 2
                 : 0;
    }

    if (depol_cmd->parsed()) {
      const std::vector<int> dims = parse_int_list(dims_text, "--dims");
      const std::vector<double> ps = parse_double_list(p_text, "--p-list");
      const auto rows = depolarizing_closed_forms(dims, ps, cfg);
      Table t({"version", "command", "seed", "restarts", "dims", "params",
               "measure", "closed_form", "optimizer_value", "deviation",
               "converged_restarts"});
      int min_conv = std::numeric_limits<int>::max();
      for (const auto& row : rows) {
        t.add_row({std::string(kVersion), std::string("depolarizing-validate"),
                   seed_i, restarts_i, join_int_list(dims),
                   join_double_list(ps), row.measure, row.closed_form,
                   row.optimizer_value, row.deviation,
                   std::int64_t(row.converged_restarts)});
        min_conv = std::min(min_conv, row.converged_restarts);
      }
      const int rcode = emit(t, rc);
      return rcode != 0 ? rcode : (min_conv == 0 ? 2 : 0);
    }

    if (weak_cmd->parsed()) {
      const Channel base = parse_channel_spec(channel_spec);
      const auto eps = parse_double_list(eps_text, "--eps-list");
      const ExpansionReport r = weaknoise_scan(base, eps, cfg);
      Table t({"version", "command", "seed", "restarts", "channel",
               "nu_flat_base", "eps", "measured", "predicted", "residual",
               "residual_over_eps"});
      for (const auto& row : r.rows)
        t.add_row({std::string(kVersion), std::string("weaknoise-scan"), seed_i,
                   restarts_i, base.label(), r.reference, row.param,
                   row.measured, row.predicted, row.residual, row.ratio});
      const int rcode = emit(t, rc);
      return rcode != 0 ? rcode : (r.min_converged == 0 ? 2 : 0);
    }

    if (strong_cmd->parsed()) {
      const std::vector<int> dims = parse_int_list(dims_text, "--dims");
      const auto qs = parse_double_list(q_text, "--q-list");
      const ExpansionReport r = strong_depolarization_check(dims, qs, trials, cfg);
      Table t({"version", "command", "seed", "restarts", "dims", "q",
               "state_kind", "h_exact", "h_predicted", "residual",
               "fitted_order", "product_below_entangled"});
      for (const auto& row : r.rows)
        t.add_row({std::string(kVersion), std::string("strongdepol-check"),
                   seed_i, restarts_i, join_int_list(dims), row.param,
                   row.note, row.measured, row.predicted, row.residual,
                   r.fitted_order,
                   std::int64_t(r.product_below_entangled ? 1 : 0)});
      return emit(t, rc);
    }

    if (pnorm_cmd->parsed()) {
      const Channel phi = parse_channel_spec(channel_spec);
      const auto ps = parse_double_list(p_text, "--p-list");
      const ExpansionReport r = pnorm_limit_scan(phi, ps, cfg);
      Table t({"version", "command", "seed", "restarts", "channel", "nu_h",
               "p", "s_bits", "residual", "monotone"});
      for (const auto& row : r.rows)
        t.add_row({std::string(kVersion), std::string("pnorm-limit"), seed_i,
                   restarts_i, phi.label(), r.reference, row.param,
                   row.measured, row.residual,
                   std::int64_t(r.monotone ? 1 : 0)});
      const int rcode = emit(t, rc);
      return rcode != 0 ? rcode : (r.min_converged == 0 ? 2 : 0);
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace qpurity
