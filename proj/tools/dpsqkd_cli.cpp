// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: reproducible desk-scale experiments with JSON
// and CSV artifacts. Exit codes: 0 success, 1 usage/config error,
// 2 protocol abort, 3 numerical-guard trip.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <string>

#include "artifact_io.hpp"
#include "dpsqkd/adversary.hpp"
#include "dpsqkd/entropy.hpp"
#include "dpsqkd/keyrate.hpp"
#include "dpsqkd/sim.hpp"
#include "dpsqkd/source.hpp"
#include "dpsqkd/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace dpsqkd;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAbort = 2;
constexpr int kExitGuard = 3;

json report_to_json(const sim::SimReport& report) {
  json out;
  out["blocks"] = report.blocks;
  out["detections"] = report.detections;
  out["errors"] = report.errors;
  out["P_det_hat"] = report.p_det_hat;
  out["qber_hat"] = report.qber_hat;
  out["qber_defined"] = report.qber_defined;
  out["per_timing_counts"] = report.per_timing_counts;
  out["z_scores"] = report.z_scores;
  out["seed"] = report.seed;
  return out;
}

int cmd_simulate(const keyrate::ProtocolParams& params, const std::string& attack_name,
                 std::uint64_t blocks, std::uint64_t seed, const std::string& out_path,
                 const std::string& tag_nu_path) {
  adversary::AttackConfig attack;
  if (attack_name == "none") {
    attack.mode = adversary::AttackConfig::Mode::none;
  } else if (attack_name == "intercept") {
    attack.mode = adversary::AttackConfig::Mode::intercept_resend;
  } else {
    throw CLI::ValidationError("--attack must be none or intercept");
  }

  std::vector<sim::BlockRecord> block_log;
  std::vector<sim::BlockRecord>* log_ptr = tag_nu_path.empty() ? nullptr : &block_log;
  const auto report = sim::run_protocol(params, attack, blocks, seed,
                                        cli::workers_from_env(), log_ptr);

  const double p_err = report.qber_hat * report.p_det_hat;
  const bool aborted =
      keyrate::abort_decision(report.p_det_hat, p_err, params) == keyrate::Decision::kAbort;

  json artifact;
  artifact["command"] = "simulate";
  artifact["version"] = kVersion;
  artifact["config"] = {{"n", params.n},
                        {"mu", params.mu},
                        {"eta", params.eta},
                        {"f_det", params.f_det},
                        {"f_err", params.f_err},
                        {"e", params.e},
                        {"attack", attack_name},
                        {"blocks", blocks},
                        {"seed", seed},
                        {"nu_max", source::SourceConfig(params.n, params.mu).nu_max}};
  artifact["report"] = report_to_json(report);
  artifact["abort_decision"] = aborted ? "abort" : "continue";
  cli::write_artifact(out_path, artifact.dump(2));

  if (!tag_nu_path.empty()) {
    cli::CsvTable table;
    table.header = {"block_index", "nu", "timing", "alice_bit", "bob_bit"};
    table.rows.reserve(block_log.size());
    for (const auto& record : block_log) {
      table.rows.push_back({std::to_string(record.index), std::to_string(record.nu),
                            std::to_string(record.outcome.detected ? record.outcome.timing : -1),
                            std::to_string(record.alice_bit), std::to_string(record.bob_bit)});
    }
    cli::write_artifact(tag_nu_path, table.serialize());
  }
  return aborted ? kExitAbort : kExitOk;
}

int cmd_verify_lemmas(int n_max, int trials, std::uint64_t seed, double tol,
                      const std::string& out_path, const std::string& format) {
  if (n_max < 3 || n_max > 8) {
    throw CLI::ValidationError("--n-max must lie in [3, 8] (span work is O(4^n))");
  }

  bool all_pass = true;
  json rows = json::array();
  cli::CsvTable table;
  table.header = {"n", "nu", "gram_rank", "closed_form", "match", "below_2_pow_n_minus_1",
                  "expected_below", "verdict", "note"};
  for (int n = 3; n <= n_max; ++n) {
    for (int nu = 0; nu <= n - 1; ++nu) {
      const long long rank = source::span_dimension(n, nu);
      const long long closed = source::span_dimension_closed_form(n, nu);
      const bool match = rank == closed;
      const bool below = rank < (1LL << (n - 1));
      const bool expected_below = nu <= n - 2;
      const bool pass = match && below == expected_below;
      all_pass = all_pass && pass;
      const std::string note = nu == n - 1 ? "sharpness (nu = n-1)" : "";
      rows.push_back({{"n", n},
                      {"nu", nu},
                      {"gram_rank", rank},
                      {"closed_form", closed},
                      {"match", match},
                      {"below_2_pow_n_minus_1", below},
                      {"expected_below", expected_below},
                      {"verdict", pass ? "PASS" : "FAIL"},
                      {"note", note}});
      table.rows.push_back({std::to_string(n), std::to_string(nu), std::to_string(rank),
                            std::to_string(closed), match ? "true" : "false",
                            below ? "true" : "false", expected_below ? "true" : "false",
                            pass ? "PASS" : "FAIL", note});
    }
  }

  // Randomized support-disjointness suite: zero conditional entropy and
  // disjoint supports must coincide, and the entropy must be nonnegative.
  Rng rng(seed);
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const auto dim = static_cast<Eigen::Index>(2 + rng.next_u64() % 7);
    const bool disjoint = rng.next_bit();
    const auto state = disjoint ? entropy::sample_disjoint_cq_state(dim, rng)
                                : entropy::sample_cq_state(dim, rng);
    const double h = entropy::conditional_entropy_cq(state);
    const bool zero_entropy = h <= 1e-9;
    if (h < -1e-9 || zero_entropy != entropy::disjoint_support_check(state, tol)) {
      ++failures;
    }
  }
  all_pass = all_pass && failures == 0;

  if (format == "csv") {
    table.rows.push_back({"", "", "", "", "", "", "",
                          failures == 0 ? "PASS" : "FAIL",
                          "support suite: " + std::to_string(trials) + " trials, " +
                              std::to_string(failures) + " failures"});
    cli::write_artifact(out_path, table.serialize());
  } else {
    json artifact;
    artifact["command"] = "verify-lemmas";
    artifact["version"] = kVersion;
    artifact["config"] = {{"n_max", n_max}, {"trials", trials}, {"seed", seed}, {"tol", tol}};
    artifact["rows"] = rows;
    artifact["support_suite"] = {{"trials", trials}, {"failures", failures}};
    artifact["all_pass"] = all_pass;
    cli::write_artifact(out_path, artifact.dump(2));
  }
  return all_pass ? kExitOk : kExitGuard;
}

int cmd_bounds(int n, double e, double eta_min, double eta_max, int points, double f_det,
               double h_n, bool estimate_floor, int restarts, std::uint64_t seed,
               const std::string& out_path, const std::string& summary_path) {
  if (e != 0.0) {
    std::cerr << "bounds: the closed-form lower bound exists only at zero QBER; "
                 "for e > 0 only the upper envelope is defined. Rerun with --e 0.\n";
    return kExitUsage;
  }
  if (f_det <= 0.0) f_det = keyrate::default_f_det(n);

  std::string floor_source = "flag";
  if (h_n <= 0.0) {
    if (estimate_floor || n <= 4) {
      const int budget = (1 << (n - 1)) - 1;
      const auto estimate = adversary::estimate_entropy_floor(
          n, std::min(1, n - 2), budget, restarts, 1e-9, seed, cli::workers_from_env());
      h_n = std::max(estimate.value, 1e-9);
      floor_source = "estimator";
    } else {
      // The simplex estimator does not scale to the d = 2^{n-1} - 1 budget
      // beyond n = 4; exponents do not depend on the constant anyway.
      h_n = 1.0;
      floor_source = "default";
    }
  }

  const auto grid = keyrate::log_spaced_grid(eta_min, eta_max, points);
  const auto envelope = adversary::upper_bound_envelope(n, grid);
  const auto curve = keyrate::lower_bound_rate_curve(n, grid, f_det, h_n);

  cli::CsvTable table;
  table.header = {"eta", "mu_star", "g_upper_cap", "mu_lower", "g_lower", "H_n_used"};
  std::vector<std::pair<double, double>> upper_points;
  std::vector<std::pair<double, double>> lower_points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.rows.push_back({cli::format_double(envelope[i].eta),
                          cli::format_double(envelope[i].mu_star),
                          cli::format_double(envelope[i].rate_cap),
                          cli::format_double(curve[i].mu_used),
                          cli::format_double(curve[i].g_lower), cli::format_double(h_n)});
    upper_points.emplace_back(envelope[i].eta, envelope[i].rate_cap);
    if (curve[i].g_lower > 0.0) lower_points.emplace_back(curve[i].eta, curve[i].g_lower);
  }
  cli::write_artifact(out_path, table.serialize());

  const auto upper_fit = keyrate::fit_scaling_exponent(upper_points);
  const auto lower_fit = keyrate::fit_scaling_exponent(lower_points);
  const double difference = std::abs(upper_fit.exponent - lower_fit.exponent);

  json summary;
  summary["command"] = "bounds";
  summary["version"] = kVersion;
  summary["config"] = {{"n", n},       {"e", e},
                       {"eta_min", eta_min}, {"eta_max", eta_max},
                       {"points", points},  {"f_det", f_det},
                       {"seed", seed},      {"restarts", restarts}};
  summary["upper_exponent"] = upper_fit.exponent;
  summary["upper_stderr"] = upper_fit.stderr_exponent;
  summary["lower_exponent"] = lower_fit.exponent;
  summary["lower_stderr"] = lower_fit.stderr_exponent;
  summary["target_exponent"] = 1.0 + 1.0 / (n - 2);
  summary["difference"] = difference;
  summary["tightness"] = difference <= 0.1 ? "PASS" : "FAIL";
  summary["H_n_used"] = h_n;
  summary["H_n_source"] = floor_source;
  cli::write_artifact(summary_path, summary.dump(2));
  return kExitOk;
}

int cmd_estimate_hn(int n, int nu, int dim, int restarts, double tol, std::uint64_t seed,
                    bool force, const std::string& out_path) {
  if (n > 5 && !force) {
    throw CLI::ValidationError(
        "estimate-hn: the objective dimension grows as d*2^n; n > 5 needs --force");
  }
  if (dim <= 0) dim = (1 << (n - 1)) - 1;

  const int workers = cli::workers_from_env();
  const auto estimate =
      adversary::estimate_entropy_floor(n, nu, dim, restarts, tol, seed, workers);

  // Relaxed-budget control: at d = 2^{n-1} the disjoint-support
  // configuration is feasible and the floor collapses to zero.
  const int control_dim = 1 << (n - 1);
  const auto control = adversary::estimate_entropy_floor(
      n, nu, control_dim, std::min(restarts, 4), tol, seed, workers);

  const auto& best = estimate.best_vectors;
  std::uint64_t digest = 0xCBF29CE484222325ULL;
  for (Eigen::Index col = 0; col < best.cols(); ++col) {
    for (Eigen::Index row = 0; row < best.rows(); ++row) {
      const double parts[2] = {best(row, col).real(), best(row, col).imag()};
      digest = cli::fnv1a(reinterpret_cast<const unsigned char*>(parts), sizeof(parts)) ^
               (digest * 0x100000001B3ULL);
    }
  }

  json artifact;
  artifact["command"] = "estimate-hn";
  artifact["version"] = kVersion;
  artifact["config"] = {{"n", n},   {"nu", nu},   {"d", dim},     {"restarts", restarts},
                        {"tol", tol}, {"seed", seed}, {"force", force}};
  artifact["n"] = n;
  artifact["nu"] = nu;
  artifact["d"] = dim;
  artifact["estimate"] = estimate.value;
  artifact["restarts"] = restarts;
  artifact["best_params_digest"] = cli::hex64(digest);
  artifact["converged"] = estimate.converged;
  artifact["control"] = {{"d", control_dim}, {"estimate", control.value}};
  cli::write_artifact(out_path, artifact.dump(2));
  return kExitOk;
}

int cmd_fit(const std::string& in_path, const std::string& x_col, const std::string& y_col,
            const std::string& out_path) {
  const auto table = cli::read_csv(in_path);
  auto column_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == name) return i;
    }
    throw std::invalid_argument("column '" + name + "' not found in " + in_path);
  };
  const std::size_t xi = column_index(x_col);
  const std::size_t yi = column_index(y_col);
  std::vector<std::pair<double, double>> points;
  for (const auto& row : table.rows) {
    if (row.size() <= std::max(xi, yi)) continue;
    if (row[xi].empty() || row[yi].empty()) continue;
    points.emplace_back(std::stod(row[xi]), std::stod(row[yi]));
  }
  const auto fit = keyrate::fit_scaling_exponent(points);

  json artifact;
  artifact["command"] = "fit";
  artifact["version"] = kVersion;
  artifact["config"] = {{"in", in_path}, {"x_col", x_col}, {"y_col", y_col}};
  artifact["points"] = points.size();
  artifact["exponent"] = fit.exponent;
  artifact["intercept"] = fit.intercept;
  artifact["stderr"] = fit.stderr_exponent;
  artifact["eta_range"] = {fit.eta_range.first, fit.eta_range.second};
  cli::write_artifact(out_path, artifact.dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-wise phase-randomized DPS QKD laboratory"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo protocol run");
  keyrate::ProtocolParams params{3, 1.0, 0.1, 0.5, 2.0, 0.0};
  std::uint64_t blocks = 100000;
  std::uint64_t seed = 0;
  std::string attack = "none";
  std::string out_path;
  std::string tag_nu_path;
  simulate->add_option("--n", params.n, "block size (>= 3)")->required();
  simulate->add_option("--mu", params.mu, "mean photons per block")->required();
  simulate->add_option("--eta", params.eta, "channel transmission")->required();
  simulate->add_option("--f-det", params.f_det, "detection-rate deficit tolerance");
  simulate->add_option("--f-err", params.f_err, "error-rate excess tolerance");
  simulate->add_option("--e", params.e, "target QBER");
  simulate->add_option("--blocks", blocks, "number of blocks")->required();
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--attack", attack, "none | intercept");
  simulate->add_option("--out", out_path, "report path (default stdout)");
  simulate->add_option("--tag-nu", tag_nu_path,
                       "also write a per-block CSV tagged with the photon number");

  // verify-lemmas
  auto* verify = app.add_subcommand("verify-lemmas",
                                    "span-dimension table and support-disjointness suite");
  int n_max = 6;
  int trials = 2000;
  std::uint64_t verify_seed = 0;
  double support_tol = 1e-6;
  std::string verify_out;
  std::string verify_format = "json";
  verify->add_option("--n-max", n_max, "largest block size (<= 8)");
  verify->add_option("--trials", trials, "randomized support-suite size");
  verify->add_option("--seed", verify_seed, "suite seed");
  verify->add_option("--tol", support_tol, "support-comparison tolerance");
  verify->add_option("--out", verify_out, "artifact path (default stdout)");
  verify->add_option("--format", verify_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // bounds
  auto* bounds = app.add_subcommand("bounds", "upper/lower rate bounds over an eta grid");
  int bounds_n = 3;
  double bounds_e = 0.0;
  double eta_min = 1e-5;
  double eta_max = 1e-2;
  int points = 20;
  double f_det_flag = 0.0;
  double h_n_flag = 0.0;
  bool estimate_floor = false;
  int bounds_restarts = 20;
  std::uint64_t bounds_seed = 0;
  std::string bounds_out;
  std::string summary_out;
  bounds->add_option("--n", bounds_n, "block size")->required();
  bounds->add_option("--e", bounds_e, "target QBER (only 0 is supported)");
  bounds->add_option("--eta-min", eta_min, "grid lower end");
  bounds->add_option("--eta-max", eta_max, "grid upper end");
  bounds->add_option("--points", points, "grid size");
  bounds->add_option("--f-det", f_det_flag,
                     "detection threshold factor (default 2n/((n-1)(n-1)!))");
  bounds->add_option("--h-n", h_n_flag, "entropy floor to use (skips the estimator)");
  bounds->add_flag("--estimate-h-n", estimate_floor, "force the floor estimator");
  bounds->add_option("--restarts", bounds_restarts, "estimator restarts");
  bounds->add_option("--seed", bounds_seed, "estimator seed");
  bounds->add_option("--out", bounds_out, "CSV path (default stdout)");
  bounds->add_option("--summary-out", summary_out, "JSON summary path (default stdout)");

  // estimate-hn
  auto* estimate = app.add_subcommand("estimate-hn", "entropy-floor estimator");
  int est_n = 3;
  int est_nu = 1;
  int est_d = 0;
  int est_restarts = 50;
  double est_tol = 1e-9;
  std::uint64_t est_seed = 0;
  bool est_force = false;
  std::string est_out;
  estimate->add_option("--n", est_n, "block size")->required();
  estimate->add_option("--nu", est_nu, "photon-number label");
  estimate->add_option("--d", est_d, "dimension budget (default 2^{n-1} - 1)");
  estimate->add_option("--restarts", est_restarts, "optimizer restarts");
  estimate->add_option("--tol", est_tol, "simplex convergence tolerance");
  estimate->add_option("--seed", est_seed, "restart seed");
  estimate->add_flag("--force", est_force, "allow n > 5");
  estimate->add_option("--out", est_out, "artifact path (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "log-log least-squares fit on a CSV column pair");
  std::string fit_in;
  std::string fit_x = "eta";
  std::string fit_y = "g_lower";
  std::string fit_out;
  fit->add_option("--in", fit_in, "input CSV")->required();
  fit->add_option("--x-col", fit_x, "abscissa column name");
  fit->add_option("--y-col", fit_y, "ordinate column name");
  fit->add_option("--out", fit_out, "artifact path (default stdout)");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) {
      return cmd_simulate(params, attack, blocks, seed, out_path, tag_nu_path);
    }
    if (verify->parsed()) {
      return cmd_verify_lemmas(n_max, trials, verify_seed, support_tol, verify_out,
                               verify_format);
    }
    if (bounds->parsed()) {
      return cmd_bounds(bounds_n, bounds_e, eta_min, eta_max, points, f_det_flag, h_n_flag,
                        estimate_floor, bounds_restarts, bounds_seed, bounds_out,
                        summary_out);
    }
    if (estimate->parsed()) {
      return cmd_estimate_hn(est_n, est_nu, est_d, est_restarts, est_tol, est_seed,
                             est_force, est_out);
    }
    if (fit->parsed()) {
      return cmd_fit(fit_in, fit_x, fit_y, fit_out);
    }
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitGuard;
  } catch (const std::exception& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitGuard;
  }
}
