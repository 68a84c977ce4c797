// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dpsqkd/adversary.hpp"
#include "dpsqkd/keyrate.hpp"
#include "dpsqkd/optics.hpp"

using dpsqkd::keyrate::Decision;
using dpsqkd::keyrate::ProtocolParams;

TEST_CASE("abort decision on the detection-rate side") {
  ProtocolParams params{3, 1.0, 0.1, 0.5, 2.0, 0.0};
  const double r = dpsqkd::optics::expected_detection_rate(3, 1.0, 0.1);
  CHECK(dpsqkd::keyrate::abort_decision(r, 0.0, params) == Decision::kContinue);
  CHECK(dpsqkd::keyrate::abort_decision(0.0, 0.0, params) == Decision::kAbort);
}

TEST_CASE("at zero target QBER any error mass aborts") {
  ProtocolParams params{3, 1.0, 0.1, 0.5, 0.0, 0.0};
  const double r = dpsqkd::optics::expected_detection_rate(3, 1.0, 0.1);
  CHECK(dpsqkd::keyrate::abort_decision(r, 0.0, params) == Decision::kContinue);
  CHECK(dpsqkd::keyrate::abort_decision(r, 1e-12, params) == Decision::kAbort);
}

TEST_CASE("variable-length threshold selection") {
  ProtocolParams params{3, 1.0, 0.1, 0.5, 2.0, 0.0};
  const double r = dpsqkd::optics::expected_detection_rate(3, 1.0, 0.1);
  const std::vector<double> grid = {0.25, 0.5, 0.9};
  CHECK(dpsqkd::keyrate::select_f_det(grid, r, params).value() == doctest::Approx(0.9));
  CHECK(dpsqkd::keyrate::select_f_det(grid, 0.3 * r, params).value() == doctest::Approx(0.25));
  CHECK_FALSE(dpsqkd::keyrate::select_f_det(grid, 0.1 * r, params).has_value());
  CHECK_THROWS_AS(dpsqkd::keyrate::select_f_det(std::vector<double>{}, r, params),
                  std::invalid_argument);
}

TEST_CASE("threshold selection is consistent with the abort test") {
  ProtocolParams params{4, 0.8, 0.05, 0.0, 2.0, 0.0};
  const std::vector<double> grid = {0.2, 0.4, 0.8};
  const double r = dpsqkd::optics::expected_detection_rate(4, 0.8, 0.05);
  for (double observed : {0.0, 0.1 * r, 0.3 * r, 0.7 * r, 1.2 * r}) {
    params.f_det = grid.front();
    const bool continues =
        dpsqkd::keyrate::abort_decision(observed, 0.0, params) == Decision::kContinue;
    CHECK(dpsqkd::keyrate::select_f_det(grid, observed, params).has_value() == continues);
  }
}

TEST_CASE("closed-form lower bound values") {
  ProtocolParams params{3, 0.0, 1e-3, 2.0, 0.0, 0.0};
  CHECK(dpsqkd::keyrate::lower_bound_rate(params, 1.0) == doctest::Approx(0.0));

  params.mu = 1e-3;
  const double r = dpsqkd::optics::expected_detection_rate(3, 1e-3, 1e-3);
  const double expected = 2.0 * r - 0.5 * 1e-6;
  CHECK(dpsqkd::keyrate::lower_bound_rate(params, 1.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(8.33e-7).epsilon(1e-3));
}

TEST_CASE("lower bound is monotone in f_det and the entropy floor") {
  ProtocolParams params{4, 0.05, 1e-3, dpsqkd::keyrate::default_f_det(4), 0.0, 0.0};
  const double base = dpsqkd::keyrate::lower_bound_rate(params, 0.5);
  CHECK(dpsqkd::keyrate::lower_bound_rate(params, 1.0) == doctest::Approx(2.0 * base));
  ProtocolParams larger = params;
  larger.f_det *= 1.5;
  CHECK(dpsqkd::keyrate::lower_bound_rate(larger, 0.5) >= base);
}

TEST_CASE("rate curve at the scaling-optimal intensity") {
  for (int n : {3, 5}) {
    const auto grid = dpsqkd::keyrate::default_eta_grid();
    const auto curve = dpsqkd::keyrate::lower_bound_rate_curve(
        n, grid, dpsqkd::keyrate::default_f_det(n), 1.0);
    std::vector<std::pair<double, double>> points;
    for (const auto& point : curve) {
      CHECK(point.g_lower > 0.0);
      CHECK(point.mu_used == doctest::Approx(std::pow(point.eta, 1.0 / (n - 2))));
      points.emplace_back(point.eta, point.g_lower);
    }
    const auto fit = dpsqkd::keyrate::fit_scaling_exponent(points);
    CHECK(fit.exponent == doctest::Approx((n - 1.0) / (n - 2.0)).epsilon(0.02));
  }
  CHECK_THROWS_AS(dpsqkd::keyrate::lower_bound_rate_curve(
                      3, dpsqkd::keyrate::default_eta_grid(),
                      0.5 * dpsqkd::keyrate::f_det_threshold(3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("doubling the entropy floor doubles the whole curve") {
  const auto grid = dpsqkd::keyrate::log_spaced_grid(1e-5, 1e-3, 5);
  const auto once = dpsqkd::keyrate::lower_bound_rate_curve(
      4, grid, dpsqkd::keyrate::default_f_det(4), 0.7);
  const auto twice = dpsqkd::keyrate::lower_bound_rate_curve(
      4, grid, dpsqkd::keyrate::default_f_det(4), 1.4);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice[i].g_lower == doctest::Approx(2.0 * once[i].g_lower).epsilon(1e-12));
  }
}

TEST_CASE("devetak-winter gap") {
  CHECK(dpsqkd::keyrate::devetak_winter_gap(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(dpsqkd::keyrate::devetak_winter_gap(0.3, 0.3) == doctest::Approx(0.0));
  CHECK(dpsqkd::keyrate::devetak_winter_gap(0.2, 0.6) == doctest::Approx(0.0));
  CHECK_THROWS_AS(dpsqkd::keyrate::devetak_winter_gap(1.2, 0.0), std::invalid_argument);

  // Zero-error pipeline: the adversary objective feeds through unchanged.
  dpsqkd::Rng rng(31);
  const auto set = dpsqkd::adversary::AdversaryStateSet::rescaled(
      3, dpsqkd::entropy::random_complex_matrix(3, 8, rng));
  const double h_ae = dpsqkd::adversary::conditional_entropy_objective(set);
  CHECK(dpsqkd::keyrate::devetak_winter_gap(h_ae, 0.0) == doctest::Approx(h_ae));
}

TEST_CASE("merged rate points keep the lower bound under the cap") {
  const auto grid = dpsqkd::keyrate::log_spaced_grid(1e-5, 1e-2, 10);
  for (int n : {3, 4}) {
    const auto envelope = dpsqkd::adversary::upper_bound_envelope(n, grid);
    auto curve = dpsqkd::keyrate::lower_bound_rate_curve(
        n, grid, dpsqkd::keyrate::default_f_det(n), 1.0);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      curve[i].g_upper_cap = envelope[i].rate_cap;
      CHECK(curve[i].g_lower <= *curve[i].g_upper_cap);
    }
  }
}

TEST_CASE("scaling fits recover synthetic exponents") {
  std::vector<std::pair<double, double>> quadratic;
  std::vector<std::pair<double, double>> linear;
  for (double eta : dpsqkd::keyrate::log_spaced_grid(1e-5, 1e-2, 12)) {
    quadratic.emplace_back(eta, 7.0 * eta * eta);
    linear.emplace_back(eta, 0.3 * eta);
  }
  CHECK(dpsqkd::keyrate::fit_scaling_exponent(quadratic).exponent ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(dpsqkd::keyrate::fit_scaling_exponent(quadratic).stderr_exponent <= 1e-9);
  CHECK(dpsqkd::keyrate::fit_scaling_exponent(linear).exponent ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("scaling fit input validation") {
  std::vector<std::pair<double, double>> short_list = {{1e-3, 1.0}, {1e-2, 2.0}};
  CHECK_THROWS_AS(dpsqkd::keyrate::fit_scaling_exponent(short_list), std::invalid_argument);
  std::vector<std::pair<double, double>> negative = {{1e-3, 1.0}, {1e-2, -2.0}, {1e-1, 1.0}};
  CHECK_THROWS_AS(dpsqkd::keyrate::fit_scaling_exponent(negative), std::domain_error);
  std::vector<std::pair<double, double>> duplicated = {{1e-3, 1.0}, {1e-3, 2.0}, {1e-1, 1.0}};
  CHECK_THROWS_AS(dpsqkd::keyrate::fit_scaling_exponent(duplicated), std::invalid_argument);
}

TEST_CASE("params validation") {
  ProtocolParams bad{2, 1.0, 0.1, 0.5, 2.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  ProtocolParams negative_mu{3, -1.0, 0.1, 0.5, 2.0, 0.0};
  CHECK_THROWS_AS(negative_mu.validate(), std::invalid_argument);
  ProtocolParams bad_eta{3, 1.0, 1.5, 0.5, 2.0, 0.0};
  CHECK_THROWS_AS(bad_eta.validate(), std::invalid_argument);
}
