// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dpsqkd/entropy.hpp"
#include "dpsqkd/rng.hpp"
#include "dpsqkd/source.hpp"

namespace dpsqkd::adversary {

/// Channel adversary selector. The intercept-resend policy is fixed: on a
/// successful measurement Eve resends the matching single-photon block,
/// otherwise the vacuum.
struct AttackConfig {
  enum class Mode { none, intercept_resend };
  Mode mode = Mode::none;
};

struct EveSuccess {
  double value;       // finite partial sum of the success probability
  double tail_bound;  // certified remainder: true value in [value, value + tail_bound]
};

struct EveEnvelopePoint {
  double eta;
  double mu_star;    // intensity cap at this transmission
  double rate_cap;   // eta * mu_star
};

/// Probability that a replica of Bob's device, fed the nu-photon block
/// state, reports exactly one photon at every internal timing (extra
/// photons at the edge timings allowed; ports are then unambiguous since
/// one port per timing carries zero amplitude). Exact, by enumeration of
/// the contributing detector-mode occupation patterns with their
/// multinomial weights. Zero for nu < n-1.
double eve_success_prob(int n, int nu);

/// Success probability against the Poisson source of intensity mu:
/// sum_nu p_{mu,nu} q_nu accumulated until the certified tail bound is
/// negligible (or the photon-number guard is reached).
EveSuccess eve_total_success(int n, double mu);

/// Largest intensity compatible with the high-loss necessary condition
/// "Eve's success stays below Bob's detection rate": the root of the
/// asymptotic balance  (mu^{n-1}/(n-1)!) q_{n-1} = (n-1)/n eta mu,
/// located by bisection to relative tolerance rel_tol. Scales as
/// eta^{1/(n-2)}.
double max_intensity(int n, double eta, double rel_tol = 1e-10);

/// Exact finite-intensity crossing of eve_total_success against the
/// expected detection rate, when one exists below the bracket cap. At
/// small eta this approaches max_intensity; at larger eta (or larger n)
/// the attack never reaches the detection rate and there is no crossing.
std::optional<double> intensity_crossing_exact(int n, double eta, double rel_tol = 1e-9);

/// max_intensity swept over a transmission grid; rate_cap = eta * mu_star
/// has log-log slope 1 + 1/(n-2).
std::vector<EveEnvelopePoint> upper_bound_envelope(int n,
                                                   const std::vector<double>& eta_grid);

struct BlockAttackResult {
  /// The n-1 relative phases s_i xor s_{i+1}, present exactly when the
  /// measurement succeeded.
  std::optional<std::vector<int>> relative_phases;
  /// Bit string of the resent single-photon block (first bit fixed to 0);
  /// meaningful only on success.
  source::BitString resent_bits;
  int resent_photons = 0;  // 1 on success, 0 (vacuum) on failure
};

/// One Monte Carlo round of Eve's measurement on the nu-photon block for
/// bit string s, using a replica of Bob's device.
BlockAttackResult simulate_block_attack(const source::BitString& s, int nu, Rng& rng);

/// Family of adversary states phi_s in C^d, one column per bit string,
/// normalized so that the average squared norm is n/(n-1) (which fixes the
/// total detection-conditioned trace to 1).
class AdversaryStateSet {
 public:
  /// Validates the normalization to 1e-9.
  AdversaryStateSet(int n, Eigen::MatrixXcd vectors);

  /// Rescales arbitrary nonzero columns onto the normalization surface.
  static AdversaryStateSet rescaled(int n, Eigen::MatrixXcd vectors);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(vectors_.rows()); }
  const Eigen::MatrixXcd& vectors() const { return vectors_; }
  double normalization_target() const { return n_ / (n_ - 1.0); }
  double average_squared_norm() const;

 private:
  int n_;
  Eigen::MatrixXcd vectors_;  // d x 2^n
};

/// Eve's detection-conditioned cq states, one per internal timing i: the
/// label-b block collects |phi_s><phi_s| / (n 2^n) over strings with
/// s_i xor s_{i+1} = b. Each timing carries trace 1/(n-1).
std::vector<entropy::CqState> detection_conditioned_states(const AdversaryStateSet& phi);

/// The quantity the floor estimator minimizes: the average over internal
/// timings of the conditional entropy of the (normalized) detection-
/// conditioned cq states.
double conditional_entropy_objective(const AdversaryStateSet& phi);

struct EntropyFloorEstimate {
  double value = 0.0;  // smallest objective found: an upper estimate of the minimum
  bool converged = false;
  int restarts = 0;
  int n = 0;
  int nu = 0;  // photon-number label; the relaxed feasible set does not depend on it
  int dim = 0;
  Eigen::MatrixXcd best_vectors;
};

/// Derivative-free (Nelder-Mead) minimization of the conditional-entropy
/// objective over state families with dimension budget `dim`, with random
/// restarts plus one structured start per run. Deterministic given seed
/// and independent of the worker count.
///
/// The search runs over families with uniform per-string norms (a subset
/// of the average normalization above). Under the average-only constraint
/// the minimum degenerates: emptying a whole relative-phase class makes
/// the per-timing supports disjoint at any dimension budget, so the
/// infimum is 0 and the dimension budget stops binding. Uniform norms keep
/// every class populated, which is what the dimension-counting argument
/// behind the floor needs.
EntropyFloorEstimate estimate_entropy_floor(int n, int nu, int dim, int restarts,
                                            double tol, std::uint64_t seed,
                                            int workers = 1);

}  // namespace dpsqkd::adversary
