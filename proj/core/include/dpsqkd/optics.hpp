// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "dpsqkd/rng.hpp"
#include "dpsqkd/source.hpp"

namespace dpsqkd::optics {

enum class Port { plus, minus };

/// One of the 2(n+1) output modes of the delay interferometer: a timing
/// slot 0..n and a detector port.
struct DetectorMode {
  int timing;
  Port port;

  friend bool operator<(const DetectorMode& a, const DetectorMode& b) {
    return a.timing != b.timing ? a.timing < b.timing : a.port < b.port;
  }
  friend bool operator==(const DetectorMode& a, const DetectorMode& b) {
    return a.timing == b.timing && a.port == b.port;
  }
};

/// Bob's per-block result: one photon at an internal timing (with the key
/// bit read off the clicking port), or no detection.
struct DetectionOutcome {
  bool detected = false;
  int timing = -1;   // 1..n-1 when detected
  int bob_bit = -1;  // 0/1 when detected

  static DetectionOutcome no_detection() { return {}; }
  static DetectionOutcome detection(int timing, int bit) { return {true, timing, bit}; }

  friend bool operator==(const DetectionOutcome& a, const DetectionOutcome& b) {
    return a.detected == b.detected && a.timing == b.timing && a.bob_bit == b.bob_bit;
  }
};

/// Probabilities over detection outcomes for one block; detection events
/// per (timing, bit) plus the pooled no-detection mass.
struct OutcomeDistribution {
  // p[i][b] for internal timings i = 1..n-1 (index i-1) and bit b.
  std::vector<std::array<double, 2>> detection;
  double no_detection = 1.0;

  double total() const;
};

/// Port convention: `plus` carries the interference amplitude when
/// s_i = s_{i+1} and reports bit 0; `minus` reports bit 1. Any
/// relabeling-consistent choice is equivalent; this one is fixed so tests
/// are deterministic.
inline int port_bit(Port p) { return p == Port::plus ? 0 : 1; }

/// Single-photon output amplitudes of the one-bit-delay interferometer for
/// input pulse train signs (-1)^{s_i}: at timing i the ports carry
/// ((-1)^{s_{i+1}} +- (-1)^{s_i}) / (2 sqrt n), out-of-range pulse indices
/// contributing 0. Squared magnitudes sum to 1.
std::map<DetectorMode, std::complex<double>> single_photon_amplitudes(
    const source::BitString& s);

/// Binomial per-photon survival through a transmission-eta channel.
/// All block photons occupy one mode, so the survivors are again a block
/// state with the same signs.
int thin_photons(int nu, double eta, Rng& rng);

/// Outcome distribution when k photons (all in the block mode of s) hit
/// Bob's device. A detection needs exactly one photon in total, so k != 1
/// contributes only to no_detection; for k = 1, timing i carries 1/n at
/// the port matching s_i xor s_{i+1}.
OutcomeDistribution detection_distribution(const source::BitString& s, int k);

/// Samples one outcome from detection_distribution without materializing it.
DetectionOutcome sample_detection(const source::BitString& s, int k, Rng& rng);

/// Expected detection rate (n-1)/n * e^{-eta mu} * eta mu for a Poisson
/// block source of intensity mu through a transmission-eta channel.
double expected_detection_rate(int n, double mu, double eta);

}  // namespace dpsqkd::optics
