// phonon_modes.hpp — collective boson modes of the one-body Hamiltonian

#pragma once

#include "cjt/coupling_matrix.hpp"

#include <Eigen/Core>

namespace cjt {

struct PhononSpectrum {
  Eigen::VectorXd energies;       // Delta_n, ascending
  Eigen::MatrixXd wavefunctions;  // b(n, j): row n is mode n over sites j

  int size() const { return static_cast<int>(energies.size()); }

  // sum_n b_{n,j} Delta_n b_{n,l}
  Eigen::MatrixXd reconstruct() const { return wavefunctions.transpose() * energies.asDiagonal() * wavefunctions; }
};

// Symmetric eigendecomposition of diag(Delta_j) + t. Degenerate clusters are
// rebuilt by pivoted Gram-Schmidt on the cluster projector and every mode is
// signed so its largest component is positive, which makes the result
// independent of the eigensolver's internal choices. Throws UnstableBath if any
// Delta_n <= 0.
PhononSpectrum diagonalize_bath(const CouplingMatrix& c);

}  // namespace cjt
