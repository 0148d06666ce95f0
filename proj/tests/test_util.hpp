#pragma once

#include <vector>

#include "qpurity/channel.hpp"
#include "qpurity/rng.hpp"

namespace qpurity::testing {

// Haar-style random channel from the QR factor of a Gaussian
// (dim * kraus_rank) x dim matrix; the row blocks of the isometry are the
// Kraus operators.
inline Channel random_channel(RandomStream& rng, int dim, int kraus_rank) {
  const Eigen::MatrixXcd g = rng.gaussian_matrix(dim * kraus_rank, dim);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  const Eigen::MatrixXcd q =
      qr.householderQ() * Eigen::MatrixXcd::Identity(dim * kraus_rank, dim);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < kraus_rank; ++k)
    kraus.push_back(q.middleRows(k * dim, dim));
  return Channel(std::move(kraus), "random");
}

inline ComplexMatrix random_density_matrix(RandomStream& rng, int dim) {
  const ComplexMatrix g = rng.gaussian_matrix(dim, dim);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace qpurity::testing
