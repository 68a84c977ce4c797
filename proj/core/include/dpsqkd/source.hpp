// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "dpsqkd/fock.hpp"

namespace dpsqkd::source {

/// Alice's per-block bit string s_1..s_n (one bit per pulse).
using BitString = std::vector<int>;

/// Gram-rank span computations are O(4^n) in memory; anything larger is a
/// configuration error rather than a long wait.
inline constexpr int kMaxSpanModes = 10;

struct SourceConfig {
  int n;            // block size, >= 3
  double mu;        // mean photons per block, >= 0
  int nu_max;       // photon-number truncation for simulation, >= n - 1

  SourceConfig(int n_, double mu_);
  SourceConfig(int n_, double mu_, int nu_max_);
};

/// Default truncation: Poisson mass beyond n + 8 is far below desk-scale
/// statistical resolution for the intensities of interest.
int default_nu_max(int n);

/// The nu-photon block state for bit string s: the normalized nu-fold
/// application of (1/sqrt(n)) sum_i (-1)^{s_i} a_i^dagger to the vacuum.
/// Amplitudes are written in closed form; tests cross-check against
/// repeated apply_creation_superposition.
fock::FockState block_state(const BitString& s, int nu);

/// e^{-mu} mu^nu / nu!
double poisson_block_weight(double mu, int nu);

/// Photon-number weight of the truncated source: the plain Poisson weight
/// for nu <= n-2, and the whole tail sum_{k >= n-1} p_{mu,k} at nu = n-1.
double truncated_weight(double mu, int nu, int n);

/// mu^{n-1} / (n-1)!, an upper bound on the truncated tail weight.
double tail_bound(double mu, int n);

/// dim Span of the 2^n block states at fixed photon number nu, computed
/// from the Gram rank of the explicit amplitude vectors.
int span_dimension(int n, int nu);

/// The same dimension by counting: sum of binomial(n, w) over weights
/// w <= nu with w = nu (mod 2).
long long span_dimension_closed_form(int n, int nu);

/// Hadamard-transformed block state for label t; identically zero unless
/// wt(t) <= nu with matching parity.
fock::FockState fourier_state(const BitString& t, int nu);

}  // namespace dpsqkd::source
