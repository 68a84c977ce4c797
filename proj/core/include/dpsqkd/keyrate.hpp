// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dpsqkd::keyrate {

/// Experiment configuration for bound evaluation and simulation.
struct ProtocolParams {
  int n;                // block size >= 3
  double mu;            // mean photons per block
  double eta;           // channel transmission
  double f_det = 0.5;   // tolerated detection-rate deficit factor
  double f_err = 2.0;   // tolerated error-rate excess factor
  double e = 0.0;       // target QBER (0 in the tight regime)

  void validate() const;
};

enum class Decision { kContinue, kAbort };

/// Continue iff P_det >= f_det * r and P_err <= f_err * e * r, with r the
/// expected detection rate for the params.
Decision abort_decision(double p_det, double p_err, const ProtocolParams& params);

/// Variable-length threshold selection: the largest grid entry whose
/// detection-rate test passes, or nothing (abort) if none does.
std::optional<double> select_f_det(std::span<const double> ascending_grid,
                                   double observed_p_det, const ProtocolParams& params);

/// Hypothesis threshold n / ((n-1) (n-1)!) on f_det for the closed-form
/// lower bound, and the shipped default of twice that value.
double f_det_threshold(int n);
double default_f_det(int n);

/// Closed-form lower bound on the key rate at zero QBER:
/// max(0, (f_det r - mu^{n-1}/(n-1)!) * entropy_floor). Valid (positive
/// for small eta) when f_det exceeds f_det_threshold.
double lower_bound_rate(const ProtocolParams& params, double entropy_floor);

struct RatePoint {
  double eta;
  double g_lower = 0.0;
  std::optional<double> g_upper_cap;  // filled when the envelope is evaluated too
  double mu_used = 0.0;
};

/// Lower-bound curve at the scaling-optimal intensity mu = eta^{1/(n-2)}.
/// Requires f_det above the hypothesis threshold.
std::vector<RatePoint> lower_bound_rate_curve(int n, std::span<const double> eta_grid,
                                              double f_det, double entropy_floor);

/// The asymptotic-rate integrand max(0, H(A|E) - H(A|B)) for externally
/// supplied conditional entropies.
double devetak_winter_gap(double h_ae, double h_ab);

struct FitResult {
  double exponent;
  double intercept;                    // of log10(value) against log10(eta)
  double stderr_exponent;
  std::pair<double, double> eta_range;
};

/// Least-squares slope on log-log axes. Requires >= 3 points with distinct
/// abscissas and strictly positive values.
FitResult fit_scaling_exponent(std::span<const std::pair<double, double>> points);

/// 20-point log-spaced default fit window.
std::vector<double> log_spaced_grid(double lo, double hi, int points);
inline std::vector<double> default_eta_grid() { return log_spaced_grid(1e-5, 1e-2, 20); }

}  // namespace dpsqkd::keyrate
