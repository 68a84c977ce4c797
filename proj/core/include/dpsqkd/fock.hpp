// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dpsqkd::fock {

using Complex = std::complex<double>;

/// Photon counts per mode. All occupations stored in one state share the
/// same total, i.e. a state lives in a fixed-photon-number sector.
using Occupation = std::vector<int>;

/// Amplitudes below this magnitude are dropped after each operator
/// application; float dust at this level cannot move a rank decision.
inline constexpr double kPruneThreshold = 1e-14;

/// Relative eigenvalue cutoff for Gram-rank decisions.
inline constexpr double kDefaultRankTol = 1e-10;

/// Sparse state vector over a multimode photon-number basis.
///
/// The map representation is keyed by occupation tuples; dense vectors are
/// only materialized for Gram/eigenvalue work.
class FockState {
 public:
  explicit FockState(int num_modes);

  static FockState vacuum(int num_modes);

  int num_modes() const { return num_modes_; }

  /// Total photon number of the sector, 0 for the vacuum and for the
  /// zero state (empty amplitude map).
  int photon_number() const { return photon_number_; }

  bool is_zero() const { return amplitudes_.empty(); }

  const std::map<Occupation, Complex>& amplitudes() const { return amplitudes_; }

  Complex amplitude(const Occupation& occ) const;

  /// Adds `weight * value` at `occ`. Throws if the occupation does not
  /// match the state's mode count or photon sector.
  void add_amplitude(const Occupation& occ, Complex value);

  /// In-place `*this += weight * other` (same mode count and sector).
  void accumulate(const FockState& other, Complex weight);

  void scale(Complex factor);

  void prune(double threshold = kPruneThreshold);

  double norm_squared() const;

 private:
  int num_modes_;
  int photon_number_ = 0;
  std::map<Occupation, Complex> amplitudes_;
};

/// <x|y>, conjugate-linear in x. States in different photon sectors are
/// orthogonal by construction.
Complex inner_product(const FockState& x, const FockState& y);

/// Applies sum_i coeffs[i] * a_i^dagger with the bosonic sqrt(m+1)
/// enhancement. The result is unnormalized and has one photon more.
FockState apply_creation_superposition(const FockState& state,
                                       std::span<const Complex> coeffs);

/// Dense Gram matrix G_jk = <x_j|x_k> of a family of states.
Eigen::MatrixXcd gram_matrix(std::span<const FockState> states);

/// dim Span of the inputs: the number of Gram eigenvalues above
/// rel_tol times the largest eigenvalue.
int gram_rank(std::span<const FockState> states, double rel_tol = kDefaultRankTol);

/// Dense complex square matrix validated to be Hermitian on construction
/// (entrywise tolerance 1e-12 against its adjoint).
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Eigen::MatrixXcd m, double tol = 1e-12);

  const Eigen::MatrixXcd& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double trace() const { return m_.trace().real(); }

 private:
  Eigen::MatrixXcd m_;
};

/// All occupations of `total` photons in `modes` modes, in a fixed
/// deterministic order.
std::vector<Occupation> enumerate_occupations(int modes, int total);

}  // namespace dpsqkd::fock
