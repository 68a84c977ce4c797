// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/keyrate.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "dpsqkd/optics.hpp"
#include "dpsqkd/source.hpp"

namespace dpsqkd::keyrate {

void ProtocolParams::validate() const {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  if (f_det <= 0.0) throw std::invalid_argument("f_det must be positive");
  if (f_err < 0.0) throw std::invalid_argument("f_err must be >= 0");
  if (e < 0.0 || e > 0.5) throw std::invalid_argument("target QBER must lie in [0, 0.5]");
}

Decision abort_decision(double p_det, double p_err, const ProtocolParams& params) {
  if (p_det < 0.0 || p_det > 1.0 || p_err < 0.0 || p_err > 1.0) {
    throw std::invalid_argument("probabilities must lie in [0, 1]");
  }
  params.validate();
  const double r = optics::expected_detection_rate(params.n, params.mu, params.eta);
  const bool detection_ok = p_det >= params.f_det * r;
  const bool error_ok = p_err <= params.f_err * params.e * r;
  return (detection_ok && error_ok) ? Decision::kContinue : Decision::kAbort;
}

std::optional<double> select_f_det(std::span<const double> ascending_grid,
                                   double observed_p_det, const ProtocolParams& params) {
  if (ascending_grid.empty()) throw std::invalid_argument("empty f_det grid");
  params.validate();
  const double r = optics::expected_detection_rate(params.n, params.mu, params.eta);
  std::optional<double> chosen;
  for (double f : ascending_grid) {
    if (observed_p_det >= f * r) chosen = f;
  }
  return chosen;
}

double f_det_threshold(int n) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  double fact = 1.0;
  for (int k = 2; k <= n - 1; ++k) fact *= k;
  return static_cast<double>(n) / ((n - 1) * fact);
}

double default_f_det(int n) { return 2.0 * f_det_threshold(n); }

double lower_bound_rate(const ProtocolParams& params, double entropy_floor) {
  params.validate();
  if (params.e != 0.0) {
    throw std::invalid_argument("the closed-form lower bound applies at zero QBER only");
  }
  if (entropy_floor <= 0.0) throw std::invalid_argument("entropy floor must be positive");
  const double r = optics::expected_detection_rate(params.n, params.mu, params.eta);
  const double bound =
      (params.f_det * r - source::tail_bound(params.mu, params.n)) * entropy_floor;
  return std::max(0.0, bound);
}

std::vector<RatePoint> lower_bound_rate_curve(int n, std::span<const double> eta_grid,
                                              double f_det, double entropy_floor) {
  if (eta_grid.empty()) throw std::invalid_argument("empty eta grid");
  if (f_det <= f_det_threshold(n)) {
    throw std::invalid_argument("f_det must exceed the hypothesis threshold n/((n-1)(n-1)!)");
  }
  std::vector<RatePoint> points;
  points.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    const double mu = std::pow(eta, 1.0 / (n - 2));
    ProtocolParams params{n, mu, eta, f_det, 0.0, 0.0};
    RatePoint point;
    point.eta = eta;
    point.mu_used = mu;
    point.g_lower = lower_bound_rate(params, entropy_floor);
    points.push_back(point);
  }
  return points;
}

double devetak_winter_gap(double h_ae, double h_ab) {
  if (h_ae < 0.0 || h_ae > 1.0 || h_ab < 0.0 || h_ab > 1.0) {
    throw std::invalid_argument("binary conditional entropies must lie in [0, 1]");
  }
  return std::max(0.0, h_ae - h_ab);
}

FitResult fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("need at least 3 points to fit");
  std::set<double> etas;
  double eta_lo = points.front().first;
  double eta_hi = points.front().first;
  for (const auto& [eta, value] : points) {
    if (eta <= 0.0) throw std::domain_error("abscissas must be positive");
    if (value <= 0.0) throw std::domain_error("values must be positive for a log-log fit");
    etas.insert(eta);
    eta_lo = std::min(eta_lo, eta);
    eta_hi = std::max(eta_hi, eta);
  }
  if (etas.size() != points.size()) throw std::invalid_argument("abscissas must be distinct");

  const double m = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [eta, value] : points) {
    sx += std::log10(eta);
    sy += std::log10(value);
  }
  const double x_bar = sx / m;
  const double y_bar = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [eta, value] : points) {
    const double dx = std::log10(eta) - x_bar;
    sxx += dx * dx;
    sxy += dx * (std::log10(value) - y_bar);
  }
  const double slope = sxy / sxx;
  const double intercept = y_bar - slope * x_bar;
  double rss = 0.0;
  for (const auto& [eta, value] : points) {
    const double predicted = intercept + slope * std::log10(eta);
    const double residual = std::log10(value) - predicted;
    rss += residual * residual;
  }
  const double variance = rss / (m - 2.0);
  return FitResult{slope, intercept, std::sqrt(variance / sxx), {eta_lo, eta_hi}};
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("need 0 < lo < hi");
  if (points < 2) throw std::invalid_argument("need at least 2 grid points");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  const double step = (std::log10(hi) - std::log10(lo)) / (points - 1);
  for (int i = 0; i < points; ++i) {
    grid.push_back(std::pow(10.0, std::log10(lo) + step * i));
  }
  return grid;
}

}  // namespace dpsqkd::keyrate
