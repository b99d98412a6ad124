#include "cjt/tasks.hpp"

#include "cjt/csv.hpp"
#include "cjt/errors.hpp"
#include "cjt/geometry.hpp"
#include "cjt/parallel.hpp"
#include "cjt/phonon_modes.hpp"

#include <cmath>
#include <fstream>

namespace cjt {

using nlohmann::json;

namespace {

struct Context {
  const RunConfig& config;
  ModelParams params;
  std::filesystem::path directory;
  TaskReport report;

  void emit(const CsvTable& table, const std::string& stem) {
    if (config.output.has("csv")) {
      const auto path = directory / (stem + ".csv");
      table.write(path);
      report.files.push_back(path);
    }
    if (config.output.has("json")) {
      const auto path = directory / (stem + ".json");
      std::ofstream out(path, std::ios::binary);
      out << table.to_json().dump(2) << '\n';
      if (!out) throw Error("failed writing " + path.string());
      report.files.push_back(path);
    }
  }

  json& results() { return report.summary["results"]; }
};

json critical_json(const CriticalCoupling& c) {
  return {{"lowest_mode", c.lowest_mode}, {"homogeneous", c.homogeneous}, {"linearized", c.linearized}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int center_site(int n) { return n / 2; }

void run_geometry(Context& ctx) {
  const int n = ctx.params.n_sites;
  ChainGeometry geom;
  double residual = 0.0;
  if (std::holds_alternative<CoulombCoupling>(ctx.params.coupling)) {
    geom = equilibrium_positions(n);
    residual = force_balance_residual(geom.positions);
  } else {
    geom.positions = Eigen::VectorXd::LinSpaced(n, 0.0, n - 1.0);
    geom.spacings = Eigen::VectorXd::Ones(n);
    geom.spacings(0) = 0.0;
  }
  double mirror = 0.0;
  const double centre = 0.5 * (geom.positions(0) + geom.positions(n - 1));
  for (int j = 0; j < n; ++j) {
    mirror = std::max(mirror, std::abs((geom.positions(j) - centre) + (geom.positions(n - 1 - j) - centre)));
  }
  CsvTable table({"index", "position", "spacing"});
  for (int j = 0; j < n; ++j) table.add_row({(long long)j, geom.positions(j), geom.spacings(j)});
  ctx.emit(table, "geometry");
  ctx.results() = {{"n_sites", n}, {"force_residual", residual}, {"mirror_error", mirror}};
}

void run_modes(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  CsvTable table({"n", "energy"});
  for (int k = 0; k < spec.size(); ++k) table.add_row({(long long)k, spec.energies(k)});
  ctx.emit(table, "modes");
  CsvTable vectors({"n", "j", "amplitude"});
  for (int k = 0; k < spec.size(); ++k) {
    for (int j = 0; j < spec.size(); ++j) vectors.add_row({(long long)k, (long long)j, spec.wavefunctions(k, j)});
  }
  ctx.emit(vectors, "mode_vectors");
  ctx.results() = {{"critical_coupling", critical_json(critical_coupling_estimate(spec, ctx.params.omega_z))},
                   {"reconstruction_error", (spec.reconstruct() - build_couplings(ctx.params).one_body()).cwiseAbs().maxCoeff()}};
}

CsvTable profile_table(const MeanFieldSolution& sol, const SiteObservables& obs) {
  CsvTable table({"j", "n_j", "spin_x", "spin_z", "theta"});
  for (Eigen::Index j = 0; j < obs.phonons_per_site.size(); ++j) {
    table.add_row({(long long)j, obs.phonons_per_site(j), obs.spin_x(j), obs.spin_z(j), sol.theta(j)});
  }
  return table;
}

json solution_json(const MeanFieldSolution& sol, const SiteObservables& obs) {
  Eigen::Index peak = 0;
  obs.phonons_per_site.maxCoeff(&peak);
  return {{"energy", sol.energy},
          {"total_phonons", obs.total_phonons},
          {"order_parameter", obs.order_parameter},
          {"converged", sol.converged},
          {"residual", sol.residual},
          {"normal_phase", sol.is_normal()},
          {"peak_site", obs.total_phonons > 0.0 ? json(peak) : json(nullptr)}};
}

void run_meanfield(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  const MeanFieldSolution sol = solve_mean_field(ctx.params, spec, ctx.config.mean_field);
  const SiteObservables obs = mf_observables(sol, spec);
  ctx.emit(profile_table(sol, obs), "profile");
  ctx.results() = solution_json(sol, obs);
  ctx.results()["g"] = ctx.params.g;
  ctx.results()["critical_coupling"] = critical_json(critical_coupling_estimate(spec, ctx.params.omega_z));
}

void run_fluctuations(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  const MeanFieldSolution sol = solve_mean_field(ctx.params, spec, ctx.config.mean_field);
  const GaussianSpectrum gs = bogoliubov_diagonalize(
      build_gaussian_hamiltonian(ctx.params, spec, sol, ctx.config.fluctuation_basis), ctx.config.gaussian);
  CsvTable table({"m", "energy"});
  for (Eigen::Index m = 0; m < gs.energies.size(); ++m) table.add_row({(long long)m, gs.energies(m)});
  ctx.emit(table, "fluctuation_modes");
  ctx.results() = {{"g", ctx.params.g},
                   {"f_spin", gs.f_spin},
                   {"f_left", gs.f_left},
                   {"f_right", gs.f_right},
                   {"gap", gs.gap},
                   {"zero_mode_count", gs.zero_mode_count},
                   {"zero_point_shift", gs.zero_point_shift},
                   {"mean_field_energy", sol.energy},
                   {"symplectic_error", symplectic_normalization_error(gs)}};
}

void run_ed(Context& ctx) {
  const CouplingMatrix coupling = build_couplings(ctx.params);
  const EdConfig& cfg = ctx.config.ed.config;
  json& res = ctx.results();
  if (!ctx.config.ed.cutoffs.empty()) {
    const ConvergenceReport scan = convergence_scan(ctx.params, coupling, cfg, ctx.config.ed.cutoffs);
    CsvTable table({"cutoff", "energy", "order_parameter", "truncation_weight"});
    for (const auto& p : scan.points) {
      table.add_row({(long long)p.cutoff, p.energy, p.order_parameter, p.truncation_weight});
    }
    ctx.emit(table, "convergence");
    res["convergence"] = {{"converged_at", scan.converged_at ? json(*scan.converged_at) : json(nullptr)},
                          {"tolerance", scan.tolerance}};
  }
  const EdProblem problem = build_hamiltonian(ctx.params, coupling, cfg);
  const EdResult r = ground_state(problem, cfg);
  CsvTable sites({"j", "spin_z"});
  for (Eigen::Index j = 0; j < r.spin_z.size(); ++j) sites.add_row({(long long)j, r.spin_z(j)});
  ctx.emit(sites, "ed_sites");
  res["g"] = ctx.params.g;
  res["dimension"] = r.dimension;
  res["boson_cutoff"] = r.boson_cutoff;
  res["ground_energy"] = r.ground_energy;
  res["excited_energies"] = r.excited_energies;
  res["order_parameter"] = r.order_parameter;
  res["mean_phonons"] = r.mean_phonons;
  res["charge"] = r.charge;
  res["commutator_norm"] = r.commutator_norm;
  res["truncation_weight"] = r.truncation_weight;
  res["cutoff_converged"] = r.cutoff_converged;
  res["degenerate_ground"] = r.degenerate_ground;
  res["residual"] = r.residual;
  res["matvecs"] = r.matvecs;
  if (ctx.config.ed.dump_eigenvector) {
    const auto path = ctx.directory / "ground_state.bin";
    write_eigenvector(path, problem.basis, r.ground_state.cast<std::complex<double>>());
    ctx.report.files.push_back(path);
  }
}

MeanFieldSweep mean_field_sweep(Context& ctx, const PhononSpectrum& spec) {
  MeanFieldSweep sweep = sweep_mean_field(ctx.params, spec, ctx.config.sweep->grid(), ctx.config.mean_field);
  CsvTable table({"g", "N_ph", "OP", "theta_center", "energy", "converged"});
  const int c = center_site(ctx.params.n_sites);
  bool all_converged = true;
  for (const auto& p : sweep.points) {
    table.add_row({p.g, p.observables.total_phonons, p.observables.order_parameter, p.solution.theta(c),
                   p.solution.energy, (long long)p.solution.converged});
    all_converged = all_converged && p.solution.converged;
  }
  ctx.emit(table, "meanfield_sweep");
  json& res = ctx.results();
  res["transition"] = optional_json(sweep.transition);
  res["critical_coupling"] = critical_json(critical_coupling_estimate(spec, ctx.params.omega_z));
  res["mean_field_converged"] = all_converged;
  return sweep;
}

void run_sweep(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  mean_field_sweep(ctx, spec);
}

void run_figure2(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  const MeanFieldSweep sweep = mean_field_sweep(ctx, spec);
  // Condensate profile at the first grid point past the threshold.
  for (const auto& p : sweep.points) {
    if (p.observables.total_phonons > transition_phonon_threshold) {
      ctx.emit(profile_table(p.solution, p.observables), "profile");
      ctx.results()["profile"] = solution_json(p.solution, p.observables);
      ctx.results()["profile"]["g"] = p.g;
      break;
    }
  }
}

void run_figure3(Context& ctx) {
  const PhononSpectrum spec = diagonalize_bath(build_couplings(ctx.params));
  const GaussianSweep sweep = sweep_fluctuations(ctx.params, spec, ctx.config.sweep->grid(),
                                                 ctx.config.mean_field, ctx.config.gaussian,
                                                 ctx.config.workers);
  CsvTable table({"g", "F_s", "F_l", "F_r", "gap", "zero_mode_count"});
  std::vector<double> g, n_ph;
  double peak[3] = {-1.0, -1.0, -1.0};
  double peak_at[3] = {0.0, 0.0, 0.0};
  for (const auto& p : sweep.points) {
    const auto& s = p.spectrum;
    table.add_row({p.g, s.f_spin, s.f_left, s.f_right, s.gap, (long long)s.zero_mode_count});
    const double f[3] = {s.f_spin, s.f_left, s.f_right};
    for (int k = 0; k < 3; ++k) {
      if (f[k] > peak[k]) {
        peak[k] = f[k];
        peak_at[k] = p.g;
      }
    }
    g.push_back(p.g);
    n_ph.push_back(mf_observables(p.mean_field, spec).total_phonons);
  }
  ctx.emit(table, "fluctuation_sweep");

  const auto& sizes = ctx.config.size_scan.sizes;
  std::vector<GaussianSpectrum> scans(sizes.size());
  parallel_for(sizes.size(), ctx.config.workers, [&](std::size_t i) {
    ModelParams p = ctx.params;
    p.n_sites = sizes[i];
    p.g = ctx.config.size_scan.probe_g;
    const PhononSpectrum sp = diagonalize_bath(build_couplings(p));
    const MeanFieldSolution mf = solve_mean_field(p, sp, ctx.config.mean_field);
    scans[i] = bogoliubov_diagonalize(build_gaussian_hamiltonian(p, sp, mf, ctx.config.fluctuation_basis),
                                      ctx.config.gaussian);
  });
  CsvTable size_table({"n_sites", "F_s", "F_l", "F_r"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    size_table.add_row({(long long)sizes[i], scans[i].f_spin, scans[i].f_left, scans[i].f_right});
  }
  ctx.emit(size_table, "size_scan");

  json& res = ctx.results();
  res["transition"] = optional_json(detect_transition(g, n_ph));
  res["critical_coupling"] = critical_json(critical_coupling_estimate(spec, ctx.params.omega_z));
  res["min_gap"] = sweep.min_gap;
  res["min_gap_at"] = sweep.min_gap_at;
  res["peaks"] = {{"spin", peak_at[0]}, {"left", peak_at[1]}, {"right", peak_at[2]}};
}

void run_figure4(Context& ctx) {
  const CouplingMatrix coupling = build_couplings(ctx.params);
  const PhononSpectrum spec = diagonalize_bath(coupling);
  const std::vector<double> grid = ctx.config.sweep->grid();
  const MeanFieldSweep mf = sweep_mean_field(ctx.params, spec, grid, ctx.config.mean_field);
  std::vector<EdResult> ed(grid.size());
  parallel_for(grid.size(), ctx.config.workers, [&](std::size_t i) {
    ModelParams p = ctx.params;
    p.g = grid[i];
    EdResult r = ground_state(build_hamiltonian(p, coupling, ctx.config.ed.config), ctx.config.ed.config);
    r.ground_state.resize(0);
    ed[i] = std::move(r);
  });
  CsvTable table({"g", "OP_meanfield", "OP_exact", "energy_meanfield", "energy_exact", "truncation_weight"});
  bool converged = true;
  double worst_weight = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.add_row({grid[i], mf.points[i].observables.order_parameter, ed[i].order_parameter,
                   mf.points[i].solution.energy, ed[i].ground_energy, ed[i].truncation_weight});
    converged = converged && ed[i].cutoff_converged;
    worst_weight = std::max(worst_weight, ed[i].truncation_weight);
  }
  ctx.emit(table, "figure4");
  json& res = ctx.results();
  res["transition"] = optional_json(mf.transition);
  res["critical_coupling"] = critical_json(critical_coupling_estimate(spec, ctx.params.omega_z));
  res["ed_cutoff_converged"] = converged;
  res["ed_max_truncation_weight"] = worst_weight;
}

}  // namespace

TaskReport run_task(const RunConfig& config) {
  config.validate();
  const ResolvedModel resolved = resolve_model(config);
  Context ctx{config, resolved.params, config.output.directory, {}};
  std::filesystem::create_directories(ctx.directory);
  ctx.report.summary = {{"version", version_string},
                        {"task", to_string(config.task)},
                        {"config", to_json(config)},
                        {"results", json::object()}};
  if (resolved.lab) {
    const LabConversion& lab = *resolved.lab;
    const double two_pi = 2.0 * phys::pi;
    ctx.report.summary["lab"] = {{"omega_z_hz", lab.omega_z_phys / two_pi},
                                 {"delta_hz", lab.delta_phys / two_pi},
                                 {"g_hz", lab.g_phys / two_pi},
                                 {"hop_hz", lab.hop_phys / two_pi},
                                 {"delta_over_omega_z", lab.delta_phys / lab.omega_z_phys},
                                 {"g_over_omega_z", lab.g_phys / lab.omega_z_phys},
                                 {"hop_over_omega_z", lab.hop_phys / lab.omega_z_phys},
                                 {"rwa_ratio_g", lab.rwa_ratio_g},
                                 {"rwa_ratio_hop", lab.rwa_ratio_hop},
                                 {"warnings", lab.warnings}};
  }
  try {
    switch (config.task) {
      case Task::geometry: run_geometry(ctx); break;
      case Task::modes: run_modes(ctx); break;
      case Task::meanfield: run_meanfield(ctx); break;
      case Task::fluctuations: run_fluctuations(ctx); break;
      case Task::ed: run_ed(ctx); break;
      case Task::sweep: run_sweep(ctx); break;
      case Task::figure2: run_figure2(ctx); break;
      case Task::figure3: run_figure3(ctx); break;
      case Task::figure4: run_figure4(ctx); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const SolverError& e) {
    throw SolverError(to_string(config.task) + ": " + e.what());
  }
  const auto path = ctx.directory / "summary.json";
  std::ofstream out(path, std::ios::binary);
  out << ctx.report.summary.dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
  ctx.report.files.push_back(path);
  return ctx.report;
}

}  // namespace cjt
