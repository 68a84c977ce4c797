// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/source.hpp"

#include <cmath>
#include <stdexcept>

namespace dpsqkd::source {

namespace {

void check_bits(const BitString& s) {
  if (s.size() < 3) throw std::invalid_argument("block size must be >= 3");
  for (int b : s) {
    if (b != 0 && b != 1) throw std::invalid_argument("bit string entries must be 0 or 1");
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

SourceConfig::SourceConfig(int n_, double mu_) : SourceConfig(n_, mu_, default_nu_max(n_)) {}

SourceConfig::SourceConfig(int n_, double mu_, int nu_max_) : n(n_), mu(mu_), nu_max(nu_max_) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  if (nu_max < n - 1) throw std::invalid_argument("nu_max must be >= n - 1");
}

int default_nu_max(int n) { return n + 8; }

fock::FockState block_state(const BitString& s, int nu) {
  check_bits(s);
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
  const int n = static_cast<int>(s.size());
  fock::FockState state(n);
  if (nu == 0) return fock::FockState::vacuum(n);

  // Expanding the nu-th power of the mode superposition gives, on
  // occupation m, the amplitude sqrt(nu! / (n^nu * prod_i m_i!)) with sign
  // (-1)^{s.m}.
  const double base = factorial(nu) / std::pow(static_cast<double>(n), nu);
  for (const auto& occ : fock::enumerate_occupations(n, nu)) {
    double denom = 1.0;
    int sign_exponent = 0;
    for (int i = 0; i < n; ++i) {
      denom *= factorial(occ[i]);
      sign_exponent += s[i] * occ[i];
    }
    const double magnitude = std::sqrt(base / denom);
    state.add_amplitude(occ, (sign_exponent % 2 == 0) ? magnitude : -magnitude);
  }
  return state;
}

double poisson_block_weight(double mu, int nu) {
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
  if (mu == 0.0) return nu == 0 ? 1.0 : 0.0;
  // Product form avoids overflowing mu^nu / nu! for larger nu.
  double w = std::exp(-mu);
  for (int k = 1; k <= nu; ++k) w *= mu / k;
  return w;
}

double truncated_weight(double mu, int nu, int n) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0 || nu > n - 1) throw std::invalid_argument("nu out of range [0, n-1]");
  if (nu <= n - 2) return poisson_block_weight(mu, nu);
  double prefix = 0.0;
  for (int k = 0; k <= n - 2; ++k) prefix += poisson_block_weight(mu, k);
  return std::max(0.0, 1.0 - prefix);
}

double tail_bound(double mu, int n) {
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  double b = 1.0;
  for (int k = 1; k <= n - 1; ++k) b *= mu / k;
  return b;
}

int span_dimension(int n, int nu) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0 || nu > n - 1) throw std::invalid_argument("nu out of range [0, n-1]");
  if (n > kMaxSpanModes) {
    throw std::length_error("span_dimension size guard: n > 10");
  }
  std::vector<fock::FockState> states;
  states.reserve(std::size_t{1} << n);
  BitString s(static_cast<std::size_t>(n), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int i = 0; i < n; ++i) s[i] = static_cast<int>((mask >> i) & 1U);
    states.push_back(block_state(s, nu));
  }
  return fock::gram_rank(states);
}

long long span_dimension_closed_form(int n, int nu) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
  // binomial(n, w) summed over w <= nu with the parity of nu.
  long long total = 0;
  for (int w = nu % 2; w <= std::min(nu, n); w += 2) {
    long long binom = 1;
    for (int i = 1; i <= w; ++i) binom = binom * (n - w + i) / i;
    total += binom;
  }
  return total;
}

fock::FockState fourier_state(const BitString& t, int nu) {
  check_bits(t);
  const int n = static_cast<int>(t.size());
  fock::FockState sum(n);
  const double scale = 1.0 / std::sqrt(std::pow(2.0, n));
  BitString s(static_cast<std::size_t>(n), 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int dot = 0;
    for (int i = 0; i < n; ++i) {
      s[i] = static_cast<int>((mask >> i) & 1U);
      dot += t[i] * s[i];
    }
    const double sign = (dot % 2 == 0) ? 1.0 : -1.0;
    sum.accumulate(block_state(s, nu), sign * scale);
  }
  sum.prune();
  return sum;
}

}  // namespace dpsqkd::source
