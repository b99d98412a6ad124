#include "cjt/basis.hpp"

#include "cjt/errors.hpp"

#include <limits>

namespace cjt {

namespace {

bool allowed(int n_a, int n_b, int cutoff, Truncation truncation) {
  if (truncation == Truncation::total) return n_a + n_b <= cutoff;
  return n_a <= cutoff && n_b <= cutoff;
}

std::size_t local_count(int cutoff, Truncation truncation) {
  const auto c = static_cast<std::size_t>(cutoff);
  const std::size_t bosons = truncation == Truncation::total ? (c + 1) * (c + 2) / 2 : (c + 1) * (c + 1);
  return 2 * bosons;
}

}  // namespace

std::size_t ProductBasis::dimension_for(int n_sites, int cutoff, Truncation truncation) {
  const std::size_t d = local_count(cutoff, truncation);
  std::size_t dim = 1;
  for (int j = 0; j < n_sites; ++j) {
    if (dim > std::numeric_limits<std::size_t>::max() / d) return std::numeric_limits<std::size_t>::max();
    dim *= d;
  }
  return dim;
}

ProductBasis::ProductBasis(int n_sites, int cutoff, Truncation truncation, std::size_t max_dimension)
    : n_sites_(n_sites), cutoff_(cutoff), truncation_(truncation) {
  if (n_sites < 1) throw ConfigError("n_sites", "must be >= 1");
  if (cutoff < 0) throw ConfigError("boson_cutoff", "must be >= 0");
  size_ = dimension_for(n_sites, cutoff, truncation);
  if (size_ > max_dimension) throw DimensionError(size_, max_dimension);

  const int side = cutoff + 1;
  lookup_.assign(static_cast<std::size_t>(2 * side * side), -1);
  for (int spin = 0; spin < 2; ++spin) {
    for (int a = 0; a <= cutoff; ++a) {
      for (int b = 0; b <= cutoff; ++b) {
        if (!allowed(a, b, cutoff, truncation)) continue;
        lookup_[static_cast<std::size_t>((spin * side + a) * side + b)] = static_cast<int>(local_.size());
        local_.push_back({spin, a, b});
      }
    }
  }

  strides_.assign(static_cast<std::size_t>(n_sites), 1);
  for (int j = n_sites - 2; j >= 0; --j) {
    strides_[static_cast<std::size_t>(j)] = strides_[static_cast<std::size_t>(j + 1)] * local_.size();
  }
}

int ProductBasis::local_index(int spin, int n_a, int n_b) const {
  if (spin < 0 || spin > 1 || n_a < 0 || n_b < 0 || n_a > cutoff_ || n_b > cutoff_) return -1;
  const int side = cutoff_ + 1;
  return lookup_[static_cast<std::size_t>((spin * side + n_a) * side + n_b)];
}

bool ProductBasis::on_cutoff_shell(std::size_t index) const {
  for (int j = 0; j < n_sites_; ++j) {
    const auto& s = local_[static_cast<std::size_t>(local_at(index, j))];
    if (truncation_ == Truncation::total) {
      if (s.n_a + s.n_b == cutoff_) return true;
    } else if (s.n_a == cutoff_ || s.n_b == cutoff_) {
      return true;
    }
  }
  return false;
}

Eigen::VectorXd u1_charge_diagonal(const ProductBasis& basis) {
  const auto& local = basis.local_states();
  Eigen::VectorXd local_charge(basis.local_dim());
  for (int k = 0; k < basis.local_dim(); ++k) {
    const auto& s = local[static_cast<std::size_t>(k)];
    local_charge(k) = s.n_a - s.n_b + (s.spin == 1 ? 0.5 : -0.5);
  }
  Eigen::VectorXd diag(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double c = 0.0;
    for (int j = 0; j < basis.n_sites(); ++j) c += local_charge(basis.local_at(i, j));
    diag(static_cast<Eigen::Index>(i)) = c;
  }
  return diag;
}

Eigen::SparseMatrix<double, Eigen::RowMajor> u1_charge_operator(int n_sites, int n_b,
                                                                std::size_t max_dimension) {
  if (n_b < 1) throw ConfigError("boson_cutoff", "charge operator needs n_b >= 1");
  const ProductBasis basis(n_sites, n_b, Truncation::per_species, max_dimension);
  const Eigen::VectorXd diag = u1_charge_diagonal(basis);
  Eigen::SparseMatrix<double, Eigen::RowMajor> c(diag.size(), diag.size());
  c.reserve(Eigen::VectorXi::Constant(diag.size(), 1));
  for (Eigen::Index i = 0; i < diag.size(); ++i) c.insert(i, i) = diag(i);
  c.makeCompressed();
  return c;
}

}  // namespace cjt
