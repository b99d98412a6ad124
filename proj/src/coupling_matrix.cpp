#include "cjt/coupling_matrix.hpp"

#include "cjt/errors.hpp"

namespace cjt {

Eigen::MatrixXd CouplingMatrix::one_body() const {
  Eigen::MatrixXd m = hop;
  m.diagonal() += delta_local;
  return m;
}

CouplingMatrix apply_staggered_transform(const CouplingMatrix& c) {
  CouplingMatrix out = c;
  const Eigen::Index n = c.hop.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      if ((j - l) % 2 != 0) out.hop(j, l) = -c.hop(j, l);
    }
  }
  return out;
}

void require_positive_local_energies(const CouplingMatrix& c) {
  for (Eigen::Index j = 0; j < c.delta_local.size(); ++j) {
    if (!(c.delta_local(j) > 0.0)) {
      throw UnstableBath("local boson", static_cast<int>(j), c.delta_local(j));
    }
  }
}

}  // namespace cjt
