// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <map>

#include "dpsqkd/optics.hpp"
#include "dpsqkd/source.hpp"

using dpsqkd::Rng;
using dpsqkd::optics::DetectorMode;
using dpsqkd::optics::Port;
using dpsqkd::source::BitString;

namespace {

BitString bits_from_mask(std::uint64_t mask, int n) {
  BitString s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = static_cast<int>((mask >> i) & 1U);
  return s;
}

}  // namespace

TEST_CASE("single-photon output is an isometry for every bit string") {
  for (int n = 3; n <= 12; ++n) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      const auto amps = dpsqkd::optics::single_photon_amplitudes(bits_from_mask(mask, n));
      CHECK(amps.size() == 2 * static_cast<std::size_t>(n + 1));
      double total = 0.0;
      for (const auto& [mode, amp] : amps) total += std::norm(amp);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("internal timings carry 1/n on the port selected by the phase bit") {
  const int n = 5;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto s = bits_from_mask(mask, n);
    const auto amps = dpsqkd::optics::single_photon_amplitudes(s);
    for (int i = 1; i <= n - 1; ++i) {
      const double p_plus = std::norm(amps.at({i, Port::plus}));
      const double p_minus = std::norm(amps.at({i, Port::minus}));
      CHECK(p_plus + p_minus == doctest::Approx(1.0 / n).epsilon(1e-12));
      const int bit = s[static_cast<std::size_t>(i - 1)] ^ s[static_cast<std::size_t>(i)];
      // The contradicting port carries exactly zero amplitude.
      CHECK((bit == 0 ? p_minus : p_plus) == doctest::Approx(0.0));
      CHECK((bit == 0 ? p_plus : p_minus) == doctest::Approx(1.0 / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("edge timings split the leftover 1/n mass evenly") {
  const int n = 4;
  const auto amps = dpsqkd::optics::single_photon_amplitudes(bits_from_mask(9, n));
  for (int timing : {0, n}) {
    const double p = std::norm(amps.at({timing, Port::plus})) +
                     std::norm(amps.at({timing, Port::minus}));
    CHECK(p == doctest::Approx(1.0 / (2.0 * n)).epsilon(1e-12));
  }
  // Accounting: internal + both edges = 1.
  CHECK((n - 1.0) / n + 2.0 * (1.0 / (2.0 * n)) == doctest::Approx(1.0));
}

TEST_CASE("thinning endpoints and moments") {
  Rng rng(7);
  CHECK(dpsqkd::optics::thin_photons(5, 1.0, rng) == 5);
  CHECK(dpsqkd::optics::thin_photons(5, 0.0, rng) == 0);

  double sum = 0.0;
  const int trials = 1'000'000;
  for (int t = 0; t < trials; ++t) sum += dpsqkd::optics::thin_photons(4, 0.3, rng);
  const double mean = sum / trials;
  const double sigma = std::sqrt(4 * 0.3 * 0.7 / trials);
  CHECK(std::abs(mean - 1.2) < 3.0 * sigma);
}

TEST_CASE("detection distribution for k = 0, 1, 2") {
  const BitString s = {0, 1, 1};
  const auto none = dpsqkd::optics::detection_distribution(s, 0);
  CHECK(none.no_detection == doctest::Approx(1.0));
  CHECK(none.total() == doctest::Approx(1.0));

  const auto one = dpsqkd::optics::detection_distribution(s, 1);
  CHECK(one.total() == doctest::Approx(1.0).epsilon(1e-12));
  double detected = 0.0;
  for (const auto& timing : one.detection) detected += timing[0] + timing[1];
  CHECK(detected == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // Wrong-port mass is identically zero.
  CHECK(one.detection[0][0] == doctest::Approx(0.0));  // s_1 xor s_2 = 1
  CHECK(one.detection[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(one.detection[1][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));  // s_2 xor s_3 = 0
  CHECK(one.detection[1][1] == doctest::Approx(0.0));

  const auto two = dpsqkd::optics::detection_distribution(s, 2);
  CHECK(two.no_detection == doctest::Approx(1.0));
}

TEST_CASE("expected detection rate closed form") {
  CHECK(dpsqkd::optics::expected_detection_rate(4, 1.0, 0.0) == doctest::Approx(0.0));
  CHECK(dpsqkd::optics::expected_detection_rate(3, 1.0, 0.1) ==
        doctest::Approx((2.0 / 3.0) * std::exp(-0.1) * 0.1).epsilon(1e-15));
}

TEST_CASE("detection rate equals the poisson-thinning finite sum") {
  // Independent oracle: sum_nu p_{mu,nu} * Binom(nu, 1; eta) * (n-1)/n.
  for (int n : {3, 4, 6}) {
    for (double mu : {0.2, 1.0, 2.0}) {
      for (double eta : {0.02, 0.3, 0.9}) {
        double oracle = 0.0;
        for (int nu = 0; nu <= 60; ++nu) {
          const double binom_one =
              nu * eta * std::pow(1.0 - eta, nu - 1);  // exactly one survivor
          oracle += dpsqkd::source::poisson_block_weight(mu, nu) * binom_one;
        }
        oracle *= (n - 1.0) / n;
        CHECK(dpsqkd::optics::expected_detection_rate(n, mu, eta) ==
              doctest::Approx(oracle).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sampled detections agree with the distribution") {
  const BitString s = {1, 0, 1, 1};
  Rng rng(1234);
  const int trials = 400'000;
  std::map<int, int> timing_counts;
  int detections = 0;
  for (int t = 0; t < trials; ++t) {
    const auto outcome = dpsqkd::optics::sample_detection(s, 1, rng);
    if (outcome.detected) {
      ++detections;
      ++timing_counts[outcome.timing];
      CHECK(outcome.bob_bit == (s[static_cast<std::size_t>(outcome.timing - 1)] ^
                                s[static_cast<std::size_t>(outcome.timing)]));
    }
  }
  const double p_det = static_cast<double>(detections) / trials;
  const double expected = 3.0 / 4.0;
  CHECK(std::abs(p_det - expected) <
        3.0 * std::sqrt(expected * (1 - expected) / trials));
}
