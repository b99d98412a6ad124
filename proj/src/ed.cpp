#include "cjt/ed.hpp"

#include "cjt/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <utility>

namespace cjt {

namespace {

// Assembles a compressed row-major operator. `act(i, emit)` reports every
// <k|H|i> as emit(k, amplitude); Hermiticity gives H(i, k) = conj(amplitude).
template <class Scalar, class Act>
Eigen::SparseMatrix<Scalar, Eigen::RowMajor> assemble(std::size_t dim, Act&& act) {
  using Entry = std::pair<std::int64_t, Scalar>;
  std::vector<Eigen::Index> outer(dim + 1, 0);
  std::vector<int> inner;
  std::vector<Scalar> values;
  std::vector<Entry> row;
  for (std::size_t i = 0; i < dim; ++i) {
    row.clear();
    act(i, [&](std::int64_t k, Scalar amp) {
      if constexpr (std::is_same_v<Scalar, double>) {
        row.emplace_back(k, amp);
      } else {
        row.emplace_back(k, std::conj(amp));
      }
    });
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (!inner.empty() && static_cast<Eigen::Index>(inner.size()) > outer[i] &&
          inner.back() == static_cast<int>(row[e].first)) {
        values.back() += row[e].second;
      } else {
        inner.push_back(static_cast<int>(row[e].first));
        values.push_back(row[e].second);
      }
    }
    outer[i + 1] = static_cast<Eigen::Index>(inner.size());
  }
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
  std::copy(outer.begin(), outer.end(), h.outerIndexPtr());
  std::copy(inner.begin(), inner.end(), h.innerIndexPtr());
  std::copy(values.begin(), values.end(), h.valuePtr());
  return h;
}

void check_sizes(const ModelParams& params, const CouplingMatrix& coupling) {
  if (coupling.size() != params.n_sites) {
    throw ConfigError("n_sites", "coupling matrix size does not match n_sites");
  }
}

// Diagonal part and boson hopping, identical for any pair of species.
template <class Scalar, class Emit>
void one_body_terms(const ProductBasis& basis, const Eigen::MatrixXd& m, double omega_z,
                    std::size_t i, std::vector<int>& local, Emit&& emit) {
  const int n = basis.n_sites();
  const auto& states = basis.local_states();
  for (int j = 0; j < n; ++j) local[static_cast<std::size_t>(j)] = basis.local_at(i, j);
  double diag = 0.0;
  for (int j = 0; j < n; ++j) {
    const LocalState& s = states[static_cast<std::size_t>(local[static_cast<std::size_t>(j)])];
    diag += 0.5 * omega_z * (2 * s.spin - 1) + m(j, j) * (s.n_a + s.n_b);
  }
  emit(static_cast<std::int64_t>(i), Scalar(diag));
  for (int l = 0; l < n; ++l) {
    const int ll = local[static_cast<std::size_t>(l)];
    const LocalState& sl = states[static_cast<std::size_t>(ll)];
    for (int j = 0; j < n; ++j) {
      if (j == l || m(j, l) == 0.0) continue;
      const int lj = local[static_cast<std::size_t>(j)];
      const LocalState& sj = states[static_cast<std::size_t>(lj)];
      for (int species = 0; species < 2; ++species) {
        const int from_l = species == 0 ? sl.n_a : sl.n_b;
        const int from_j = species == 0 ? sj.n_a : sj.n_b;
        if (from_l == 0) continue;
        const int new_l = species == 0 ? basis.local_index(sl.spin, sl.n_a - 1, sl.n_b)
                                       : basis.local_index(sl.spin, sl.n_a, sl.n_b - 1);
        const int new_j = species == 0 ? basis.local_index(sj.spin, sj.n_a + 1, sj.n_b)
                                       : basis.local_index(sj.spin, sj.n_a, sj.n_b + 1);
        if (new_l < 0 || new_j < 0) continue;
        const std::int64_t k = static_cast<std::int64_t>(i) +
                               (new_l - ll) * static_cast<std::int64_t>(basis.stride(l)) +
                               (new_j - lj) * static_cast<std::int64_t>(basis.stride(j));
        emit(k, Scalar(m(j, l) * std::sqrt(double(from_l) * double(from_j + 1))));
      }
    }
  }
}

// Emits the local transition site j: local -> (spin, n_a, n_b) with the given amplitude.
template <class Scalar, class Emit>
void local_move(const ProductBasis& basis, std::size_t i, int j, int from, int spin, int n_a,
                int n_b, Scalar amp, Emit&& emit) {
  const int to = basis.local_index(spin, n_a, n_b);
  if (to < 0) return;
  emit(static_cast<std::int64_t>(i) + (to - from) * static_cast<std::int64_t>(basis.stride(j)), amp);
}

}  // namespace

EdProblem build_hamiltonian(const ModelParams& params, const CouplingMatrix& coupling,
                            const EdConfig& config) {
  check_sizes(params, coupling);
  ProductBasis basis(params.n_sites, config.boson_cutoff, config.truncation, config.max_dimension);
  const Eigen::MatrixXd m = coupling.one_body();
  const double g = params.g;
  const auto& states = basis.local_states();
  std::vector<int> local(static_cast<std::size_t>(params.n_sites));
  SparseMatrix h = assemble<double>(basis.size(), [&](std::size_t i, auto&& emit) {
    one_body_terms<double>(basis, m, params.omega_z, i, local, emit);
    if (g == 0.0) return;
    for (int j = 0; j < params.n_sites; ++j) {
      const int from = local[static_cast<std::size_t>(j)];
      const LocalState& s = states[static_cast<std::size_t>(from)];
      // a = r, b = l; sigma^+ (a_r + a_l^dag) + sigma^- (a_r^dag + a_l)
      if (s.spin == 0) {
        if (s.n_a > 0) local_move(basis, i, j, from, 1, s.n_a - 1, s.n_b, g * std::sqrt(double(s.n_a)), emit);
        local_move(basis, i, j, from, 1, s.n_a, s.n_b + 1, g * std::sqrt(double(s.n_b + 1)), emit);
      } else {
        local_move(basis, i, j, from, 0, s.n_a + 1, s.n_b, g * std::sqrt(double(s.n_a + 1)), emit);
        if (s.n_b > 0) local_move(basis, i, j, from, 0, s.n_a, s.n_b - 1, g * std::sqrt(double(s.n_b)), emit);
      }
    }
  });
  return EdProblem{std::move(basis), std::move(h), params.omega_z};
}

Eigen::SparseMatrix<std::complex<double>, Eigen::RowMajor> build_cartesian_hamiltonian(
    const ModelParams& params, const CouplingMatrix& coupling, const ProductBasis& basis) {
  using cd = std::complex<double>;
  check_sizes(params, coupling);
  if (basis.n_sites() != params.n_sites) throw ConfigError("n_sites", "basis size does not match n_sites");
  const Eigen::MatrixXd m = coupling.one_body();
  const double c = params.g / std::sqrt(2.0);
  const auto& states = basis.local_states();
  std::vector<int> local(static_cast<std::size_t>(params.n_sites));
  return assemble<cd>(basis.size(), [&](std::size_t i, auto&& emit) {
    one_body_terms<cd>(basis, m, params.omega_z, i, local, emit);
    if (c == 0.0) return;
    for (int j = 0; j < params.n_sites; ++j) {
      const int from = local[static_cast<std::size_t>(j)];
      const LocalState& s = states[static_cast<std::size_t>(from)];
      const int flipped = 1 - s.spin;
      // sigma^x |s> = |1-s>; sigma^y |0> = -i|1>, sigma^y |1> = i|0>; a = x, b = y.
      const cd fx = c;
      const cd fy = s.spin == 0 ? cd(0.0, -c) : cd(0.0, c);
      local_move(basis, i, j, from, flipped, s.n_a + 1, s.n_b, fx * std::sqrt(double(s.n_a + 1)), emit);
      if (s.n_a > 0) local_move(basis, i, j, from, flipped, s.n_a - 1, s.n_b, fx * std::sqrt(double(s.n_a)), emit);
      local_move(basis, i, j, from, flipped, s.n_a, s.n_b + 1, fy * std::sqrt(double(s.n_b + 1)), emit);
      if (s.n_b > 0) local_move(basis, i, j, from, flipped, s.n_a, s.n_b - 1, fy * std::sqrt(double(s.n_b)), emit);
    }
  });
}

double charge_commutator_norm(const SparseMatrix& h, const ProductBasis& basis) {
  if (static_cast<std::size_t>(h.rows()) != basis.size()) {
    throw ConfigError("", "operator dimension does not match basis");
  }
  const Eigen::VectorXd c = u1_charge_diagonal(basis);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < h.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(h, i); it; ++it) {
      const double v = it.value() * (c(it.col()) - c(i));
      sum += v * v;
    }
  }
  return std::sqrt(sum);
}

double two_point_order_parameter(const Eigen::VectorXd& state, const ProductBasis& basis) {
  const auto& states = basis.local_states();
  const int n = basis.n_sites();
  double total = 0.0;
  for (int species = 0; species < 2; ++species) {
    // phi = sum_k a_{eps,k} |psi>; the O.P. is ||phi||^2 / N^2.
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(state.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double amp = state(static_cast<Eigen::Index>(i));
      if (amp == 0.0) continue;
      for (int k = 0; k < n; ++k) {
        const int from = basis.local_at(i, k);
        const LocalState& s = states[static_cast<std::size_t>(from)];
        const int count = species == 0 ? s.n_a : s.n_b;
        if (count == 0) continue;
        const int to = species == 0 ? basis.local_index(s.spin, s.n_a - 1, s.n_b)
                                    : basis.local_index(s.spin, s.n_a, s.n_b - 1);
        const auto target = static_cast<std::int64_t>(i) + (to - from) * static_cast<std::int64_t>(basis.stride(k));
        phi(static_cast<Eigen::Index>(target)) += std::sqrt(double(count)) * amp;
      }
    }
    total += phi.squaredNorm();
  }
  return total / (double(n) * double(n));
}

EdResult ground_state(const EdProblem& problem, const EdConfig& config) {
  const ProductBasis& basis = problem.basis;
  const auto dim = static_cast<Eigen::Index>(basis.size());
  LanczosOptions lopts;
  lopts.n_eigen = static_cast<int>(std::min<Eigen::Index>(dim, std::max(2, 1 + config.excited_states)));
  lopts.tolerance = config.tolerance;
  const LanczosResult lr = lowest_eigenpairs(problem.hamiltonian, lopts);

  EdResult r;
  r.dimension = basis.size();
  r.boson_cutoff = basis.cutoff();
  r.ground_energy = lr.eigenvalues(0);
  for (int k = 1; k <= config.excited_states && k < lr.eigenvalues.size(); ++k) {
    r.excited_energies.push_back(lr.eigenvalues(k));
  }
  r.degenerate_ground =
      lr.eigenvalues.size() > 1 &&
      lr.eigenvalues(1) - lr.eigenvalues(0) < 1e-8 * std::max(1.0, std::abs(lr.eigenvalues(0)));
  r.residual = lr.residuals(0);
  r.matvecs = lr.matvecs;
  r.ground_state = lr.eigenvectors.col(0);

  const auto& states = basis.local_states();
  const int n = basis.n_sites();
  const Eigen::VectorXd charge = u1_charge_diagonal(basis);
  r.spin_z = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double p = r.ground_state(static_cast<Eigen::Index>(i)) * r.ground_state(static_cast<Eigen::Index>(i));
    if (p == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      const LocalState& s = states[static_cast<std::size_t>(basis.local_at(i, j))];
      r.mean_phonons += p * (s.n_a + s.n_b);
      r.spin_z(j) += p * (2 * s.spin - 1);
    }
    r.charge += p * charge(static_cast<Eigen::Index>(i));
    if (basis.on_cutoff_shell(i)) r.truncation_weight += p;
  }
  r.order_parameter = two_point_order_parameter(r.ground_state, basis);
  r.commutator_norm = charge_commutator_norm(problem.hamiltonian, basis);
  r.cutoff_converged = r.truncation_weight < config.truncation_threshold;
  return r;
}

ConvergenceReport convergence_scan(const ModelParams& params, const CouplingMatrix& coupling,
                                   EdConfig config, const std::vector<int>& cutoffs,
                                   double tolerance) {
  for (std::size_t i = 1; i < cutoffs.size(); ++i) {
    if (!(cutoffs[i] > cutoffs[i - 1])) throw ConfigError("cutoffs", "must be strictly ascending");
  }
  ConvergenceReport report;
  report.tolerance = tolerance;
  for (int c : cutoffs) {
    config.boson_cutoff = c;
    const EdResult r = ground_state(build_hamiltonian(params, coupling, config), config);
    report.points.push_back({c, r.ground_energy, r.order_parameter, r.truncation_weight});
    const std::size_t k = report.points.size();
    if (!report.converged_at && k >= 2) {
      const auto& a = report.points[k - 2];
      const auto& b = report.points[k - 1];
      if (std::abs(a.energy - b.energy) < tolerance &&
          std::abs(a.order_parameter - b.order_parameter) < tolerance) {
        report.converged_at = a.cutoff;
      }
    }
  }
  return report;
}

namespace {

template <class T>
void put(std::ostream& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw Error("eigenvector dump truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

constexpr char dump_magic[4] = {'C', 'J', 'T', 'V'};
constexpr std::uint32_t dump_version = 1;

}  // namespace

void write_eigenvector(const std::filesystem::path& path, const ProductBasis& basis,
                       const Eigen::VectorXcd& state) {
  if (static_cast<std::size_t>(state.size()) != basis.size()) {
    throw ConfigError("", "state dimension does not match basis");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(dump_magic, 4);
  put<std::uint32_t>(out, dump_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.n_sites()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.cutoff()));
  put<std::uint32_t>(out, basis.truncation() == Truncation::total ? 1u : 0u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(basis.local_dim()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(state.size()));
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    put<double>(out, state(i).real());
    put<double>(out, state(i).imag());
  }
  if (!out) throw Error("failed writing " + path.string());
}

EigenvectorDump read_eigenvector(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, dump_magic, 4) != 0) {
    throw Error(path.string() + " is not an eigenvector dump");
  }
  if (get<std::uint32_t>(in) != dump_version) throw Error("unsupported eigenvector dump version");
  EigenvectorDump d;
  d.n_sites = static_cast<int>(get<std::uint32_t>(in));
  d.cutoff = static_cast<int>(get<std::uint32_t>(in));
  const auto trunc = get<std::uint32_t>(in);
  if (trunc > 1) throw Error("invalid truncation tag in eigenvector dump");
  d.truncation = trunc == 1 ? Truncation::total : Truncation::per_species;
  d.local_dim = static_cast<int>(get<std::uint32_t>(in));
  const auto dim = get<std::uint64_t>(in);
  if (dim != ProductBasis::dimension_for(d.n_sites, d.cutoff, d.truncation)) {
    throw Error("eigenvector dump header is inconsistent");
  }
  d.state.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < d.state.size(); ++i) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    d.state(i) = {re, im};
  }
  return d;
}

}  // namespace cjt
