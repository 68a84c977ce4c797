// SPDX-License-Identifier: Apache-2.0
#include "dpsqkd/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpsqkd::entropy {

namespace {

Eigen::VectorXd eigenvalues_of(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

void require_psd(const Eigen::MatrixXcd& m, const char* what) {
  if (eigenvalues_of(m).minCoeff() < -kPsdTolerance) {
    throw std::invalid_argument(std::string(what) + " is not positive within tolerance");
  }
}

/// Shannon-style contribution of a raw (possibly unnormalized) spectrum.
double spectrum_entropy(const Eigen::VectorXd& ev) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double lambda = ev(i);
    if (lambda > kEigenvalueClamp) h -= lambda * std::log2(lambda);
  }
  return h;
}

}  // namespace

CqState::CqState(HermitianMatrix sigma0, HermitianMatrix sigma1)
    : sigma0_(std::move(sigma0)), sigma1_(std::move(sigma1)) {
  if (sigma0_.dim() != sigma1_.dim()) {
    throw std::invalid_argument("cq blocks must share a dimension");
  }
  require_psd(sigma0_.matrix(), "sigma_0");
  require_psd(sigma1_.matrix(), "sigma_1");
  const double t = total_trace();
  if (t <= 0.0) throw std::invalid_argument("cq state has zero total trace");
  if (t > 1.0 + 1e-9) throw std::invalid_argument("cq state trace exceeds 1");
}

const HermitianMatrix& CqState::block(int label) const {
  if (label == 0) return sigma0_;
  if (label == 1) return sigma1_;
  throw std::invalid_argument("cq label must be 0 or 1");
}

double von_neumann_entropy(const HermitianMatrix& rho) {
  require_psd(rho.matrix(), "density operator");
  const double trace = rho.trace();
  if (trace <= 0.0) throw std::invalid_argument("density operator has nonpositive trace");
  Eigen::VectorXd ev = eigenvalues_of(rho.matrix());
  if (std::abs(trace - 1.0) > 1e-9) ev /= trace;  // normalize internally
  return spectrum_entropy(ev);
}

double conditional_entropy_cq(const CqState& sigma) {
  return conditional_entropy_blocks(sigma.block(0).matrix(), sigma.block(1).matrix());
}

double conditional_entropy_blocks(const Eigen::MatrixXcd& sigma0,
                                  const Eigen::MatrixXcd& sigma1) {
  const double t = sigma0.trace().real() + sigma1.trace().real();
  if (t <= 0.0) throw std::invalid_argument("cq state has zero total trace");
  const double p0 = sigma0.trace().real() / t;
  const double p1 = 1.0 - p0;

  // H(AE) of a cq state splits into the label entropy plus the average
  // block entropy; evaluating the normalized block spectra directly keeps
  // the three eigensolves small.
  double h_ae = binary_entropy(std::clamp(p0, 0.0, 1.0));
  for (int b = 0; b < 2; ++b) {
    const double pb = (b == 0) ? p0 : p1;
    if (pb <= 0.0) continue;
    const Eigen::MatrixXcd normalized = (b == 0 ? sigma0 : sigma1) / (t * pb);
    h_ae += pb * spectrum_entropy(eigenvalues_of(normalized));
  }
  const Eigen::MatrixXcd mixture = (sigma0 + sigma1) / t;
  return h_ae - spectrum_entropy(eigenvalues_of(mixture));
}

bool disjoint_support_check(const CqState& sigma, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s0(sigma.block(0).matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s1(sigma.block(1).matrix());

  // Projector onto the range of sigma_1.
  const Eigen::Index dim = sigma.dim();
  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (s1.eigenvalues()(i) > tol) {
      const Eigen::VectorXcd v = s1.eigenvectors().col(i);
      projector += v * v.adjoint();
    }
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (s0.eigenvalues()(i) <= tol) continue;
    const Eigen::VectorXcd v = s0.eigenvectors().col(i);
    if ((projector * v).norm() > tol) return false;
  }
  return true;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability outside [0, 1]");
  double h = 0.0;
  if (p > kEigenvalueClamp) h -= p * std::log2(p);
  if (1.0 - p > kEigenvalueClamp) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

Eigen::MatrixXcd random_complex_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = {rng.next_double() - 0.5, rng.next_double() - 0.5};
    }
  }
  return m;
}

Eigen::MatrixXcd random_psd_matrix(Eigen::Index dim, Rng& rng) {
  const Eigen::MatrixXcd m = random_complex_matrix(dim, dim, rng);
  return m * m.adjoint();
}

Eigen::MatrixXcd random_unitary_matrix(Eigen::Index dim, Rng& rng) {
  const Eigen::MatrixXcd g = random_complex_matrix(dim, dim, rng);
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
}

CqState sample_cq_state(Eigen::Index dim, Rng& rng) {
  Eigen::MatrixXcd s0 = random_psd_matrix(dim, rng);
  Eigen::MatrixXcd s1 = random_psd_matrix(dim, rng);
  const double target = 0.2 + 0.8 * rng.next_double();
  const double split = 0.1 + 0.8 * rng.next_double();
  s0 *= target * split / s0.trace().real();
  s1 *= target * (1.0 - split) / s1.trace().real();
  return {HermitianMatrix(s0), HermitianMatrix(s1)};
}

CqState sample_disjoint_cq_state(Eigen::Index dim, Rng& rng) {
  if (dim < 2) throw std::invalid_argument("need dimension >= 2 for disjoint supports");
  const auto d0 = static_cast<Eigen::Index>(1 + rng.next_u64() % (dim - 1));
  Eigen::MatrixXcd s0 = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(dim, dim);
  s0.topLeftCorner(d0, d0) = random_psd_matrix(d0, rng);
  s1.bottomRightCorner(dim - d0, dim - d0) = random_psd_matrix(dim - d0, rng);
  const double target = 0.2 + 0.8 * rng.next_double();
  const double split = 0.1 + 0.8 * rng.next_double();
  s0 *= target * split / s0.trace().real();
  s1 *= target * (1.0 - split) / s1.trace().real();
  const Eigen::MatrixXcd u = random_unitary_matrix(dim, rng);
  return {HermitianMatrix(u * s0 * u.adjoint()), HermitianMatrix(u * s1 * u.adjoint())};
}

}  // namespace dpsqkd::entropy
