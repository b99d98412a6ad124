// coupling_matrix.hpp — one-body boson data (Delta_j, t_{j,l})

#pragma once

#include <Eigen/Core>

namespace cjt {

// H_b = sum_{beta,j} Delta_j n_{beta,j} + sum_{beta, j != l} t_{j,l} a^dag_{beta,j} a_{beta,l}
struct CouplingMatrix {
  Eigen::VectorXd delta_local;
  Eigen::MatrixXd hop;  // symmetric, zero diagonal

  int size() const { return static_cast<int>(delta_local.size()); }

  // diag(Delta_j) + t
  Eigen::MatrixXd one_body() const;
};

// t_{j,l} -> (-1)^{j-l} t_{j,l}; Delta_j unchanged. An involution.
CouplingMatrix apply_staggered_transform(const CouplingMatrix& c);

// Throws UnstableBath naming the first site with Delta_j <= 0.
void require_positive_local_energies(const CouplingMatrix& c);

}  // namespace cjt
