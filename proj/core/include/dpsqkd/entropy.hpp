// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpsqkd/fock.hpp"
#include "dpsqkd/rng.hpp"

namespace dpsqkd::entropy {

using fock::HermitianMatrix;

/// Eigenvalues are allowed to dip this far below zero before a block is
/// rejected as non-positive (Hermitian eigensolver noise).
inline constexpr double kPsdTolerance = 1e-10;

/// Eigenvalues below this clamp contribute nothing to an entropy.
inline constexpr double kEigenvalueClamp = 1e-14;

/// Classical-quantum state with a binary classical register: two labeled,
/// unnormalized positive blocks. Total trace lies in (0, 1].
class CqState {
 public:
  CqState(HermitianMatrix sigma0, HermitianMatrix sigma1);

  const HermitianMatrix& block(int label) const;
  Eigen::Index dim() const { return sigma0_.dim(); }
  double total_trace() const { return sigma0_.trace() + sigma1_.trace(); }

 private:
  HermitianMatrix sigma0_;
  HermitianMatrix sigma1_;
};

/// Von Neumann entropy in bits, -sum lambda log2 lambda. The input must be
/// positive within tolerance; a trace away from 1 is normalized away.
double von_neumann_entropy(const HermitianMatrix& rho);

/// Conditional entropy H(A|E) in bits of a binary cq state, via
/// h2(p0) + sum_b p_b H(sigma_b / p_b) - H((sigma_0 + sigma_1) / trace).
/// Nonnegative and at most 1 for valid inputs.
double conditional_entropy_cq(const CqState& sigma);

/// Same quantity over raw blocks without the construction-time positivity
/// checks; optimizer hot path. Blocks are assumed Hermitian positive.
double conditional_entropy_blocks(const Eigen::MatrixXcd& sigma0,
                                  const Eigen::MatrixXcd& sigma1);

/// True iff every eigenvector of sigma_0 with eigenvalue > tol is
/// orthogonal (within tol) to the range of sigma_1, i.e. the supports are
/// disjoint. Projector-overlap comparison, robust under near-degeneracy.
bool disjoint_support_check(const CqState& sigma, double tol);

/// Binary entropy h2(p) in bits.
double binary_entropy(double p);

// Samplers for the randomized support-disjointness suite.

Eigen::MatrixXcd random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
Eigen::MatrixXcd random_psd_matrix(Eigen::Index dim, Rng& rng);
Eigen::MatrixXcd random_unitary_matrix(Eigen::Index dim, Rng& rng);

/// Two independent random positive blocks with total trace in (0.2, 1];
/// the supports overlap almost surely.
CqState sample_cq_state(Eigen::Index dim, Rng& rng);

/// Blocks supported on complementary coordinate subspaces, conjugated by a
/// common random unitary; conditional entropy is exactly zero.
CqState sample_disjoint_cq_state(Eigen::Index dim, Rng& rng);

}  // namespace dpsqkd::entropy
