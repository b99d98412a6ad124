// basis.hpp — truncated spin ⊗ boson ⊗ boson product basis used by the
// exact-diagonalization oracle.
//
// Ordering is site-major: site 0 is the most significant digit of a basis
// index. Within a site the local state runs spin-major, then the first boson
// species, then the second (spin ⊗ Fock_r ⊗ Fock_l in the chiral basis).
// Spin 0 is |0> (sigma^z = -1), spin 1 is |1>.

#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace cjt {

enum class Truncation {
  per_species,  // n_a <= cutoff and n_b <= cutoff, local dim 2 (cutoff+1)^2
  total,        // n_a + n_b <= cutoff, invariant under rotations mixing the two species
};

struct LocalState {
  int spin;
  int n_a;
  int n_b;
};

class ProductBasis {
 public:
  static constexpr std::size_t default_max_dimension = 2'000'000;

  ProductBasis(int n_sites, int cutoff, Truncation truncation = Truncation::per_species,
               std::size_t max_dimension = default_max_dimension);

  // Dimension the basis would have, without building it. Saturates on overflow.
  static std::size_t dimension_for(int n_sites, int cutoff, Truncation truncation);

  int n_sites() const { return n_sites_; }
  int cutoff() const { return cutoff_; }
  Truncation truncation() const { return truncation_; }
  std::size_t size() const { return size_; }
  int local_dim() const { return static_cast<int>(local_.size()); }
  const std::vector<LocalState>& local_states() const { return local_; }

  // -1 when (spin, n_a, n_b) lies outside the truncation.
  int local_index(int spin, int n_a, int n_b) const;

  std::size_t stride(int site) const { return strides_[static_cast<std::size_t>(site)]; }
  int local_at(std::size_t index, int site) const {
    return static_cast<int>((index / strides_[static_cast<std::size_t>(site)]) %
                            local_.size());
  }

  // True if any site sits on the outermost shell of the truncation.
  bool on_cutoff_shell(std::size_t index) const;

 private:
  int n_sites_;
  int cutoff_;
  Truncation truncation_;
  std::vector<LocalState> local_;
  std::vector<int> lookup_;  // (spin, n_a, n_b) -> local index or -1
  std::vector<std::size_t> strides_;
  std::size_t size_;
};

// Diagonal of C = sum_j (n_a,j - n_b,j + sigma^z_j / 2) in `basis`
// (chiral ordering: a = r, b = l).
Eigen::VectorXd u1_charge_diagonal(const ProductBasis& basis);

// C as a sparse (diagonal) matrix for n_sites sites with per-species cutoff n_b.
Eigen::SparseMatrix<double, Eigen::RowMajor> u1_charge_operator(
    int n_sites, int n_b, std::size_t max_dimension = ProductBasis::default_max_dimension);

}  // namespace cjt
