// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "dpsqkd/entropy.hpp"
#include "dpsqkd/rng.hpp"

namespace dpsqkd::testsupport {

inline Eigen::MatrixXcd random_psd(Eigen::Index dim, Rng& rng) {
  return entropy::random_psd_matrix(dim, rng);
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index dim, Rng& rng) {
  return entropy::random_unitary_matrix(dim, rng);
}

inline entropy::CqState random_cq_state(Eigen::Index dim, Rng& rng) {
  return entropy::sample_cq_state(dim, rng);
}

inline entropy::CqState random_disjoint_cq_state(Eigen::Index dim, Rng& rng) {
  return entropy::sample_disjoint_cq_state(dim, rng);
}

}  // namespace dpsqkd::testsupport
