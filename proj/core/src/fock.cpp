// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/fock.hpp"

#include <cmath>
#include <numeric>

namespace dpsqkd::fock {

namespace {

int occupation_total(const Occupation& occ) {
  int total = 0;
  for (int m : occ) {
    if (m < 0) throw std::invalid_argument("occupation entries must be >= 0");
    total += m;
  }
  return total;
}

}  // namespace

FockState::FockState(int num_modes) : num_modes_(num_modes) {
  if (num_modes < 1) throw std::invalid_argument("num_modes must be >= 1");
}

FockState FockState::vacuum(int num_modes) {
  FockState s(num_modes);
  s.add_amplitude(Occupation(static_cast<std::size_t>(num_modes), 0), 1.0);
  return s;
}

Complex FockState::amplitude(const Occupation& occ) const {
  auto it = amplitudes_.find(occ);
  return it == amplitudes_.end() ? Complex(0.0) : it->second;
}

void FockState::add_amplitude(const Occupation& occ, Complex value) {
  if (static_cast<int>(occ.size()) != num_modes_) {
    throw std::invalid_argument("occupation length does not match mode count");
  }
  const int total = occupation_total(occ);
  if (amplitudes_.empty()) {
    photon_number_ = total;
  } else if (total != photon_number_) {
    throw std::invalid_argument("occupation leaves the state's photon sector");
  }
  amplitudes_[occ] += value;
}

void FockState::accumulate(const FockState& other, Complex weight) {
  if (other.num_modes_ != num_modes_) {
    throw std::invalid_argument("mode-count mismatch");
  }
  for (const auto& [occ, amp] : other.amplitudes_) {
    add_amplitude(occ, weight * amp);
  }
}

void FockState::scale(Complex factor) {
  for (auto& [occ, amp] : amplitudes_) amp *= factor;
}

void FockState::prune(double threshold) {
  for (auto it = amplitudes_.begin(); it != amplitudes_.end();) {
    if (std::abs(it->second) < threshold) {
      it = amplitudes_.erase(it);
    } else {
      ++it;
    }
  }
  if (amplitudes_.empty()) photon_number_ = 0;
}

double FockState::norm_squared() const {
  double total = 0.0;
  for (const auto& [occ, amp] : amplitudes_) total += std::norm(amp);
  return total;
}

Complex inner_product(const FockState& x, const FockState& y) {
  if (x.num_modes() != y.num_modes()) {
    throw std::invalid_argument("mode-count mismatch");
  }
  // Distinct sectors share no occupations, so the loop returns 0 for them.
  const auto& a = x.amplitudes();
  const auto& b = y.amplitudes();
  const bool a_smaller = a.size() <= b.size();
  const auto& small = a_smaller ? a : b;
  const auto& large = a_smaller ? b : a;
  Complex sum = 0.0;
  for (const auto& [occ, amp] : small) {
    auto it = large.find(occ);
    if (it == large.end()) continue;
    const Complex xa = a_smaller ? amp : it->second;
    const Complex ya = a_smaller ? it->second : amp;
    sum += std::conj(xa) * ya;
  }
  return sum;
}

FockState apply_creation_superposition(const FockState& state,
                                       std::span<const Complex> coeffs) {
  if (static_cast<int>(coeffs.size()) != state.num_modes()) {
    throw std::invalid_argument("coefficient vector length must equal mode count");
  }
  FockState out(state.num_modes());
  Occupation raised;
  for (const auto& [occ, amp] : state.amplitudes()) {
    for (int i = 0; i < state.num_modes(); ++i) {
      if (coeffs[i] == Complex(0.0)) continue;
      raised = occ;
      raised[i] += 1;
      out.add_amplitude(raised, amp * coeffs[i] * std::sqrt(static_cast<double>(raised[i])));
    }
  }
  out.prune();
  return out;
}

Eigen::MatrixXcd gram_matrix(std::span<const FockState> states) {
  if (states.empty()) throw std::invalid_argument("empty state list");
  const int modes = states[0].num_modes();
  for (const auto& s : states) {
    if (s.num_modes() != modes) throw std::invalid_argument("mode-count mismatch");
  }

  // Materialize dense rows over the union of occupations, then one matrix
  // product; much faster than pairwise sparse dot products for 2^n states.
  std::map<Occupation, Eigen::Index> index;
  for (const auto& s : states) {
    for (const auto& [occ, amp] : s.amplitudes()) {
      index.emplace(occ, static_cast<Eigen::Index>(index.size()));
    }
  }
  const auto k = static_cast<Eigen::Index>(states.size());
  const auto dim = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(k, std::max<Eigen::Index>(dim, 1));
  for (Eigen::Index j = 0; j < k; ++j) {
    for (const auto& [occ, amp] : states[j].amplitudes()) {
      a(j, index.at(occ)) = amp;
    }
  }
  return a.conjugate() * a.transpose();
}

int gram_rank(std::span<const FockState> states, double rel_tol) {
  const Eigen::MatrixXcd g = gram_matrix(states);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = solver.eigenvalues();
  const double largest = ev.maxCoeff();
  if (largest <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > rel_tol * largest) ++rank;
  }
  return rank;
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("matrix must be square");
  const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol) throw std::invalid_argument("matrix is not Hermitian within tolerance");
  // Exact symmetrization keeps downstream eigensolves clean.
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

std::vector<Occupation> enumerate_occupations(int modes, int total) {
  std::vector<Occupation> out;
  Occupation current(static_cast<std::size_t>(modes), 0);
  auto recurse = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == modes - 1) {
      current[mode] = remaining;
      out.push_back(current);
      return;
    }
    for (int m = remaining; m >= 0; --m) {
      current[mode] = m;
      self(self, mode + 1, remaining - m);
    }
  };
  recurse(recurse, 0, total);
  return out;
}

}  // namespace dpsqkd::fock
