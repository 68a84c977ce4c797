// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dpsqkd/adversary.hpp"
#include "dpsqkd/keyrate.hpp"
#include "dpsqkd/optics.hpp"

namespace dpsqkd::sim {

/// One protocol round. Bits are -1 when the round produced no detection.
struct BlockRecord {
  std::uint64_t index;
  source::BitString s;
  int nu;
  optics::DetectionOutcome outcome;
  int alice_bit = -1;
  int bob_bit = -1;
};

struct SimReport {
  std::uint64_t blocks = 0;
  std::uint64_t detections = 0;
  std::uint64_t errors = 0;
  double p_det_hat = 0.0;
  double qber_hat = 0.0;
  bool qber_defined = false;  // false when detections == 0
  std::vector<std::uint64_t> per_timing_counts;  // timings 1..n-1
  std::map<std::string, double> z_scores;
  std::uint64_t seed = 0;
};

/// Runs `blocks` independent rounds of the protocol: sample the bit string
/// and the block photon number (Poisson, truncated at the source nu_max),
/// pass the block through the lossy channel or the configured attack, and
/// apply Bob's measurement and the sifting rule.
///
/// Block j draws from an RNG stream derived from (seed, j), so the report
/// is bit-identical for any worker count. `block_log`, when non-null, is
/// filled with one record per block (in index order).
SimReport run_protocol(const keyrate::ProtocolParams& params,
                       const adversary::AttackConfig& attack, std::uint64_t blocks,
                       std::uint64_t seed, int workers = 1,
                       std::vector<BlockRecord>* block_log = nullptr);

/// z-scores of the report against the closed-form expectations: the
/// detection rate against (n-1)/n e^{-eta mu} eta mu, and the QBER against
/// the target e when that comparison is well defined.
std::map<std::string, double> compare_to_expectation(const SimReport& report,
                                                     const keyrate::ProtocolParams& params);

}  // namespace dpsqkd::sim
