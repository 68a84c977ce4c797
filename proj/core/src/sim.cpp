// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dpsqkd::sim {

namespace {

/// Poisson sample by CDF inversion, with all mass beyond nu_max assigned
/// to nu_max (the source truncation policy).
int sample_truncated_poisson(double mu, int nu_max, Rng& rng) {
  if (mu == 0.0) return 0;
  const double u = rng.next_double();
  double p = std::exp(-mu);
  double cumulative = p;
  int k = 0;
  while (u > cumulative && k < nu_max) {
    ++k;
    p *= mu / k;
    cumulative += p;
  }
  return k;
}

struct Tally {
  std::uint64_t detections = 0;
  std::uint64_t errors = 0;
  std::vector<std::uint64_t> per_timing;
};

void run_range(const keyrate::ProtocolParams& params,
               const adversary::AttackConfig& attack, std::uint64_t begin,
               std::uint64_t end, std::uint64_t seed, int nu_max, Tally& tally,
               std::vector<BlockRecord>* block_log) {
  const int n = params.n;
  tally.per_timing.assign(static_cast<std::size_t>(n - 1), 0);
  source::BitString s(static_cast<std::size_t>(n), 0);

  for (std::uint64_t j = begin; j < end; ++j) {
    Rng rng = derived_rng(seed, j);
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = rng.next_bit() ? 1 : 0;
    const int nu = sample_truncated_poisson(params.mu, nu_max, rng);

    optics::DetectionOutcome outcome;
    if (attack.mode == adversary::AttackConfig::Mode::none) {
      const int k = optics::thin_photons(nu, params.eta, rng);
      outcome = optics::sample_detection(s, k, rng);
    } else {
      // Eve measures at the source and resends over a lossless line.
      const auto attacked = adversary::simulate_block_attack(s, nu, rng);
      outcome = attacked.resent_photons == 1
                    ? optics::sample_detection(attacked.resent_bits, 1, rng)
                    : optics::DetectionOutcome::no_detection();
    }

    int alice_bit = -1;
    if (outcome.detected) {
      alice_bit = s[static_cast<std::size_t>(outcome.timing - 1)] ^
                  s[static_cast<std::size_t>(outcome.timing)];
      ++tally.detections;
      ++tally.per_timing[static_cast<std::size_t>(outcome.timing - 1)];
      if (alice_bit != outcome.bob_bit) ++tally.errors;
    }
    if (block_log != nullptr) {
      (*block_log)[j] = BlockRecord{j,       s,
                                    nu,      outcome,
                                    alice_bit, outcome.detected ? outcome.bob_bit : -1};
    }
  }
}

}  // namespace

SimReport run_protocol(const keyrate::ProtocolParams& params,
                       const adversary::AttackConfig& attack, std::uint64_t blocks,
                       std::uint64_t seed, int workers,
                       std::vector<BlockRecord>* block_log) {
  params.validate();
  if (blocks < 1) throw std::invalid_argument("need at least one block");
  const int nu_max = source::SourceConfig(params.n, params.mu).nu_max;

  if (block_log != nullptr) block_log->resize(blocks);

  const int used_workers = static_cast<int>(
      std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), 1, blocks));
  std::vector<Tally> tallies(static_cast<std::size_t>(used_workers));

  if (used_workers == 1) {
    run_range(params, attack, 0, blocks, seed, nu_max, tallies[0], block_log);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(used_workers));
    const std::uint64_t chunk = (blocks + used_workers - 1) / used_workers;
    for (int w = 0; w < used_workers; ++w) {
      const std::uint64_t begin = chunk * static_cast<std::uint64_t>(w);
      const std::uint64_t end = std::min(blocks, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        run_range(params, attack, begin, end, seed, nu_max,
                  tallies[static_cast<std::size_t>(w)], block_log);
      });
    }
    for (auto& t : pool) t.join();
  }

  SimReport report;
  report.blocks = blocks;
  report.seed = seed;
  report.per_timing_counts.assign(static_cast<std::size_t>(params.n - 1), 0);
  for (const auto& tally : tallies) {
    report.detections += tally.detections;
    report.errors += tally.errors;
    for (std::size_t i = 0; i < report.per_timing_counts.size(); ++i) {
      report.per_timing_counts[i] += tally.per_timing[i];
    }
  }
  report.p_det_hat = static_cast<double>(report.detections) / static_cast<double>(blocks);
  report.qber_defined = report.detections > 0;
  report.qber_hat = report.qber_defined ? static_cast<double>(report.errors) /
                                              static_cast<double>(report.detections)
                                        : 0.0;
  report.z_scores = compare_to_expectation(report, params);
  return report;
}

std::map<std::string, double> compare_to_expectation(const SimReport& report,
                                                     const keyrate::ProtocolParams& params) {
  params.validate();
  if (report.blocks == 0) throw std::invalid_argument("report covers zero blocks");

  std::map<std::string, double> z;
  const double r = optics::expected_detection_rate(params.n, params.mu, params.eta);
  const double sigma_det =
      std::sqrt(std::max(r * (1.0 - r) / static_cast<double>(report.blocks), 1e-300));
  z["p_det"] = (report.p_det_hat - r) / sigma_det;

  if (report.qber_defined && params.e > 0.0) {
    const double sigma_qber = std::sqrt(params.e * (1.0 - params.e) /
                                        static_cast<double>(report.detections));
    z["qber"] = (report.qber_hat - params.e) / sigma_qber;
  } else if (report.qber_defined) {
    // At target QBER zero the binomial spread collapses; any error at all
    // is an exact contradiction rather than a finite z.
    if (report.errors == 0) z["qber"] = 0.0;
  }
  return z;
}

}  // namespace dpsqkd::sim
