// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/optics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace dpsqkd::optics {

double OutcomeDistribution::total() const {
  double t = no_detection;
  for (const auto& timing : detection) t += timing[0] + timing[1];
  return t;
}

std::map<DetectorMode, std::complex<double>> single_photon_amplitudes(
    const source::BitString& s) {
  const int n = static_cast<int>(s.size());
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  const double norm = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  auto sign = [&](int pulse) -> double {
    // Pulses are 1-based; out-of-range indices contribute nothing.
    if (pulse < 1 || pulse > n) return 0.0;
    return s[pulse - 1] == 0 ? 1.0 : -1.0;
  };
  std::map<DetectorMode, std::complex<double>> amps;
  for (int i = 0; i <= n; ++i) {
    const double late = sign(i + 1);
    const double early = sign(i);
    amps[{i, Port::plus}] = norm * (late + early);
    amps[{i, Port::minus}] = norm * (late - early);
  }
  return amps;
}

int thin_photons(int nu, double eta, Rng& rng) {
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
  int survivors = 0;
  for (int i = 0; i < nu; ++i) {
    if (rng.next_double() < eta) ++survivors;
  }
  return survivors;
}

OutcomeDistribution detection_distribution(const source::BitString& s, int k) {
  const int n = static_cast<int>(s.size());
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (k < 0) throw std::invalid_argument("photon count must be >= 0");

  OutcomeDistribution dist;
  dist.detection.assign(static_cast<std::size_t>(n - 1), {0.0, 0.0});
  if (k != 1) {
    // Zero photons, or more than one anywhere: never "one photon in total".
    dist.no_detection = 1.0;
    return dist;
  }
  const double per_timing = 1.0 / n;
  for (int i = 1; i <= n - 1; ++i) {
    const int bit = s[i - 1] ^ s[i];
    dist.detection[static_cast<std::size_t>(i - 1)][bit] = per_timing;
  }
  dist.no_detection = 1.0 / n;  // both edge timings
  return dist;
}

DetectionOutcome sample_detection(const source::BitString& s, int k, Rng& rng) {
  const int n = static_cast<int>(s.size());
  if (k != 1) return DetectionOutcome::no_detection();
  const double u = rng.next_double() * n;
  if (u >= n - 1) return DetectionOutcome::no_detection();
  const int i = 1 + static_cast<int>(u);
  return DetectionOutcome::detection(i, s[i - 1] ^ s[i]);
}

double expected_detection_rate(int n, double mu, double eta) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in [0, 1]");
  const double lambda = eta * mu;
  return (n - 1.0) / n * std::exp(-lambda) * lambda;
}

}  // namespace dpsqkd::optics
