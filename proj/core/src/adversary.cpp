// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "dpsqkd/optics.hpp"

namespace dpsqkd::adversary {

namespace {

constexpr int kPhotonGuard = 120;  // factorials stay finite and accurate

/// Relative-phase class of the bit string encoded in `mask` (bit i of the
/// class is s_{i+1} xor s_{i+2}).
std::uint64_t phase_class(std::uint64_t mask, int n) {
  return (mask ^ (mask >> 1)) & ((std::uint64_t{1} << (n - 1)) - 1);
}

}  // namespace

double eve_success_prob(int n, int nu) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");
  if (nu < n - 1) return 0.0;
  if (nu > kPhotonGuard) {
    throw std::length_error("eve_success_prob enumeration size guard");
  }

  std::vector<double> fact(static_cast<std::size_t>(nu) + 1, 1.0);
  for (int k = 1; k <= nu; ++k) fact[k] = fact[k - 1] * k;

  double internal_weight = 1.0;  // each internal timing holds exactly one photon
  for (int k = 0; k < n - 1; ++k) internal_weight /= n;

  const int extra = nu - (n - 1);
  double edge_weight = 1.0;  // per surplus photon, one of four edge modes
  for (int k = 0; k < extra; ++k) edge_weight /= 4.0 * n;

  // Enumerate the occupation patterns of the surplus photons over the four
  // edge detector modes; all other contributing patterns are fixed by the
  // success condition.
  double total = 0.0;
  for (int a = 0; a <= extra; ++a) {
    for (int b = 0; b <= extra - a; ++b) {
      for (int c = 0; c <= extra - a - b; ++c) {
        const int d = extra - a - b - c;
        const double multinomial = fact[nu] / (fact[a] * fact[b] * fact[c] * fact[d]);
        total += multinomial * internal_weight * edge_weight;
      }
    }
  }
  return total;
}

EveSuccess eve_total_success(int n, double mu) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (mu < 0.0) throw std::invalid_argument("mean photon number must be >= 0");

  // q_nu peaks at nu in {n-1, n} and decays afterwards, so the tail mass
  // times q_{n-1} certifies the remainder.
  const double q_peak = eve_success_prob(n, n - 1);
  double value = 0.0;
  double prefix_mass = 0.0;
  double tail = q_peak;
  for (int nu = 0; nu <= kPhotonGuard - 1; ++nu) {
    const double p = source::poisson_block_weight(mu, nu);
    prefix_mass += p;
    if (nu >= n - 1) value += p * eve_success_prob(n, nu);
    tail = std::max(0.0, 1.0 - prefix_mass) * q_peak;
    if (nu >= n - 1 && tail <= std::max(1e-15, 1e-9 * value)) break;
  }
  return {value, tail};
}

double max_intensity(int n, double eta, double rel_tol) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (rel_tol <= 0.0) throw std::invalid_argument("tolerance must be positive");

  const double q = eve_success_prob(n, n - 1);
  // Dividing the balance by mu leaves a strictly increasing function of mu
  // with the same root, so the bisection bracket is clean.
  auto balance_over_mu = [&](double mu) {
    return source::tail_bound(mu, n) / mu * q - (n - 1.0) / n * eta;
  };

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (balance_over_mu(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 100) {
      throw std::runtime_error("max_intensity: no crossing in bracket");
    }
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (balance_over_mu(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<double> intensity_crossing_exact(int n, double eta, double rel_tol) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");

  auto excess = [&](double mu) {
    return eve_total_success(n, mu).value - optics::expected_detection_rate(n, mu, eta);
  };

  // The attack deficit is negative at small intensity; scan upward for the
  // first sign change. Beyond mu ~ 64 the success probability has decayed
  // and no crossing will appear.
  double lo = 1e-9;
  double hi = lo;
  bool bracketed = false;
  while (hi < 64.0) {
    hi *= 2.0;
    if (excess(hi) >= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) return std::nullopt;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<EveEnvelopePoint> upper_bound_envelope(int n,
                                                   const std::vector<double>& eta_grid) {
  std::vector<EveEnvelopePoint> points;
  points.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    const double mu_star = max_intensity(n, eta);
    points.push_back({eta, mu_star, eta * mu_star});
  }
  return points;
}

BlockAttackResult simulate_block_attack(const source::BitString& s, int nu, Rng& rng) {
  const int n = static_cast<int>(s.size());
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0) throw std::invalid_argument("photon number must be >= 0");

  std::vector<int> internal_counts(static_cast<std::size_t>(n - 1), 0);
  for (int photon = 0; photon < nu; ++photon) {
    const double u = rng.next_double() * n;
    if (u < n - 1) ++internal_counts[static_cast<std::size_t>(u)];
  }
  const bool success =
      std::all_of(internal_counts.begin(), internal_counts.end(),
                  [](int c) { return c == 1; });

  BlockAttackResult result;
  if (!success) return result;  // vacuum resent

  std::vector<int> phases(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) phases[static_cast<std::size_t>(i)] = s[i] ^ s[i + 1];
  result.relative_phases = phases;
  result.resent_bits.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n - 1; ++i) {
    result.resent_bits[static_cast<std::size_t>(i + 1)] =
        result.resent_bits[static_cast<std::size_t>(i)] ^ phases[static_cast<std::size_t>(i)];
  }
  result.resent_photons = 1;
  return result;
}

AdversaryStateSet::AdversaryStateSet(int n, Eigen::MatrixXcd vectors)
    : n_(n), vectors_(std::move(vectors)) {
  if (n_ < 3) throw std::invalid_argument("block size must be >= 3");
  if (vectors_.cols() != (Eigen::Index{1} << n_)) {
    throw std::invalid_argument("state set needs one column per bit string");
  }
  if (vectors_.rows() < 1) throw std::invalid_argument("dimension budget must be >= 1");
  if (std::abs(average_squared_norm() - normalization_target()) > 1e-9) {
    throw std::invalid_argument("state set violates the trace normalization");
  }
}

AdversaryStateSet AdversaryStateSet::rescaled(int n, Eigen::MatrixXcd vectors) {
  const double avg = vectors.squaredNorm() / static_cast<double>(Eigen::Index{1} << n);
  if (avg <= 0.0) throw std::invalid_argument("cannot normalize an all-zero state set");
  vectors *= std::sqrt(n / (n - 1.0) / avg);
  return AdversaryStateSet(n, std::move(vectors));
}

double AdversaryStateSet::average_squared_norm() const {
  return vectors_.squaredNorm() / static_cast<double>(vectors_.cols());
}

namespace {

/// Unnormalized per-timing blocks: sums of |phi_s><phi_s| split by the
/// relative-phase bit at `timing` (1-based). Common prefactors are left to
/// the caller; the conditional entropy is invariant to them.
void timing_blocks(const Eigen::MatrixXcd& vectors, int n, int timing,
                   Eigen::MatrixXcd& sigma0, Eigen::MatrixXcd& sigma1) {
  const Eigen::Index d = vectors.rows();
  sigma0.setZero(d, d);
  sigma1.setZero(d, d);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const int bit = static_cast<int>((phase_class(mask, n) >> (timing - 1)) & 1U);
    auto& target = bit ? sigma1 : sigma0;
    target.noalias() += vectors.col(static_cast<Eigen::Index>(mask)) *
                        vectors.col(static_cast<Eigen::Index>(mask)).adjoint();
  }
}

double objective_from_vectors(const Eigen::MatrixXcd& vectors, int n,
                              Eigen::MatrixXcd& work0, Eigen::MatrixXcd& work1) {
  double sum = 0.0;
  for (int i = 1; i <= n - 1; ++i) {
    timing_blocks(vectors, n, i, work0, work1);
    sum += entropy::conditional_entropy_blocks(work0, work1);
  }
  return sum / (n - 1);
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  bool converged = false;
};

template <typename F>
NelderMeadResult nelder_mead(F&& f, const Eigen::VectorXd& x0, double step,
                             double tol, int max_evals) {
  const Eigen::Index m = x0.size();
  std::vector<std::pair<double, Eigen::VectorXd>> simplex;
  simplex.reserve(static_cast<std::size_t>(m) + 1);
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  simplex.emplace_back(eval(x0), x0);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::VectorXd v = x0;
    v(i) += step;
    simplex.emplace_back(eval(v), v);
  }
  auto by_value = [](const auto& a, const auto& b) { return a.first < b.first; };

  NelderMeadResult result;
  while (true) {
    std::sort(simplex.begin(), simplex.end(), by_value);
    const double spread = simplex.back().first - simplex.front().first;
    if (spread <= tol) {
      result.converged = true;
      break;
    }
    if (evals >= max_evals) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(m);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i) centroid += simplex[i].second;
    centroid /= static_cast<double>(m);
    auto& worst = simplex.back();

    const Eigen::VectorXd reflected = centroid + (centroid - worst.second);
    const double f_reflected = eval(reflected);
    if (f_reflected < simplex.front().first) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (reflected - centroid);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        worst = {f_expanded, expanded};
      } else {
        worst = {f_reflected, reflected};
      }
      continue;
    }
    if (f_reflected < simplex[simplex.size() - 2].first) {
      worst = {f_reflected, reflected};
      continue;
    }
    const bool outside = f_reflected < worst.first;
    const Eigen::VectorXd contracted =
        outside ? (centroid + 0.5 * (reflected - centroid)).eval()
                : (centroid - 0.5 * (centroid - worst.second)).eval();
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, worst.first)) {
      worst = {f_contracted, contracted};
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i].second = simplex.front().second +
                          0.5 * (simplex[i].second - simplex.front().second);
      simplex[i].first = eval(simplex[i].second);
      if (evals >= max_evals) break;
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_value);
  result.x = simplex.front().second;
  result.value = simplex.front().first;
  return result;
}

Eigen::MatrixXcd vectors_from_raw(const Eigen::VectorXd& x, int dim, Eigen::Index cols) {
  Eigen::MatrixXcd c(dim, cols);
  Eigen::Index k = 0;
  for (Eigen::Index col = 0; col < cols; ++col) {
    for (Eigen::Index row = 0; row < dim; ++row) {
      c(row, col) = {x(k), x(k + 1)};
      k += 2;
    }
  }
  return c;
}

}  // namespace

std::vector<entropy::CqState> detection_conditioned_states(const AdversaryStateSet& phi) {
  const int n = phi.n();
  const double prefactor = 1.0 / (n * std::pow(2.0, n));
  std::vector<entropy::CqState> states;
  states.reserve(static_cast<std::size_t>(n - 1));
  Eigen::MatrixXcd sigma0, sigma1;
  for (int i = 1; i <= n - 1; ++i) {
    timing_blocks(phi.vectors(), n, i, sigma0, sigma1);
    states.emplace_back(fock::HermitianMatrix(prefactor * sigma0),
                        fock::HermitianMatrix(prefactor * sigma1));
  }
  return states;
}

double conditional_entropy_objective(const AdversaryStateSet& phi) {
  Eigen::MatrixXcd work0, work1;
  return objective_from_vectors(phi.vectors(), phi.n(), work0, work1);
}

EntropyFloorEstimate estimate_entropy_floor(int n, int nu, int dim, int restarts,
                                            double tol, std::uint64_t seed,
                                            int workers) {
  if (n < 3) throw std::invalid_argument("block size must be >= 3");
  if (nu < 0 || nu > n - 1) throw std::invalid_argument("nu out of range [0, n-1]");
  if (dim < 1) throw std::invalid_argument("dimension budget must be >= 1");
  if (restarts < 1) throw std::invalid_argument("need at least one restart");
  if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");

  const Eigen::Index cols = Eigen::Index{1} << n;
  const Eigen::Index m = 2 * dim * cols;
  const int max_evals = 400 * static_cast<int>(m) + 2000;

  struct RestartOutcome {
    double value = 0.0;
    bool converged = false;
    Eigen::VectorXd x;
  };
  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(restarts));

  auto run_restart = [&](int r) {
    Eigen::MatrixXcd work0, work1;
    auto objective = [&](const Eigen::VectorXd& x) -> double {
      Eigen::MatrixXcd c = vectors_from_raw(x, dim, cols);
      // Project onto uniform per-string norms. The average-only
      // normalization admits exact zero-entropy families in which whole
      // relative-phase classes are emptied; pinning every column keeps the
      // search on the symmetric, compact subset where the dimension budget
      // is the binding constraint.
      for (Eigen::Index col = 0; col < cols; ++col) {
        const double norm = c.col(col).norm();
        if (norm < 1e-12) return 2.0;  // off the feasible surface
        c.col(col) *= std::sqrt(n / (n - 1.0)) / norm;
      }
      return objective_from_vectors(c, n, work0, work1);
    };

    Eigen::VectorXd x0(m);
    if (r == 0) {
      // Structured start: one direction per relative-phase class, folded
      // modulo the dimension budget. At dim >= 2^{n-1} this is already the
      // zero-entropy configuration.
      Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim, cols);
      const double amplitude = std::sqrt(n / (n - 1.0));
      for (std::uint64_t mask = 0; mask < static_cast<std::uint64_t>(cols); ++mask) {
        const auto row = static_cast<Eigen::Index>(phase_class(mask, n) % dim);
        c(row, static_cast<Eigen::Index>(mask)) = amplitude;
      }
      Eigen::Index k = 0;
      for (Eigen::Index col = 0; col < cols; ++col) {
        for (Eigen::Index row = 0; row < dim; ++row) {
          x0(k) = c(row, col).real();
          x0(k + 1) = c(row, col).imag();
          k += 2;
        }
      }
    } else {
      Rng rng = derived_rng(seed, static_cast<std::uint64_t>(r));
      for (Eigen::Index k = 0; k < m; k += 2) {
        // Box-Muller; the standard library's normal_distribution is not
        // reproducible across implementations.
        const double u1 = std::max(rng.next_double(), 1e-300);
        const double u2 = rng.next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        x0(k) = radius * std::cos(2.0 * M_PI * u2);
        if (k + 1 < m) x0(k + 1) = radius * std::sin(2.0 * M_PI * u2);
      }
    }

    const auto res = nelder_mead(objective, x0, 0.25, tol, max_evals);
    outcomes[static_cast<std::size_t>(r)] = {res.value, res.converged, res.x};
  };

  const int used_workers = std::clamp(workers, 1, restarts);
  if (used_workers == 1) {
    for (int r = 0; r < restarts; ++r) run_restart(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(used_workers));
    for (int w = 0; w < used_workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < restarts; r += used_workers) run_restart(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  int best = 0;
  for (int r = 1; r < restarts; ++r) {
    if (outcomes[static_cast<std::size_t>(r)].value <
        outcomes[static_cast<std::size_t>(best)].value) {
      best = r;
    }
  }

  EntropyFloorEstimate estimate;
  estimate.value = outcomes[static_cast<std::size_t>(best)].value;
  estimate.converged = std::any_of(outcomes.begin(), outcomes.end(),
                                   [](const RestartOutcome& o) { return o.converged; });
  estimate.restarts = restarts;
  estimate.n = n;
  estimate.nu = nu;
  estimate.dim = dim;
  Eigen::MatrixXcd best_c =
      vectors_from_raw(outcomes[static_cast<std::size_t>(best)].x, dim, cols);
  for (Eigen::Index col = 0; col < cols; ++col) {
    const double norm = best_c.col(col).norm();
    if (norm > 1e-12) best_c.col(col) *= std::sqrt(n / (n - 1.0)) / norm;
  }
  estimate.best_vectors = AdversaryStateSet::rescaled(n, std::move(best_c)).vectors();
  return estimate;
}

}  // namespace dpsqkd::adversary
