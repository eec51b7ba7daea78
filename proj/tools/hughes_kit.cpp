// hughes-kit: dataset generation, solving, scoring and export for the 1D
// Hughes pedestrian model.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 scheme failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hughes/binary_format.hpp"
#include "hughes/core.hpp"
#include "hughes/datagen.hpp"
#include "hughes/dataset.hpp"
#include "hughes/metrics.hpp"

namespace fs = std::filesystem;
using namespace hughes;
using dataset::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitScheme = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int mesh_levels_from_drho(double drho) {
  if (!(drho > 0.0) || drho > 1.0) throw UsageError("--drho must lie in (0, 1]");
  const double levels = 1.0 / drho;
  const long rounded = std::lround(levels);
  if (std::abs(levels - static_cast<double>(rounded)) > 1e-6) {
    throw UsageError("--drho must be the reciprocal of an integer");
  }
  return static_cast<int>(rounded);
}

void parse_downsample(const std::string& text, std::size_t& t, std::size_t& x) {
  const auto sep = text.find_first_of("xX");
  if (sep == std::string::npos) throw UsageError("--downsample expects TxX, e.g. 50x200");
  try {
    t = std::stoul(text.substr(0, sep));
    x = std::stoul(text.substr(sep + 1));
  } catch (const std::exception&) {
    throw UsageError("--downsample expects TxX, e.g. 50x200");
  }
  if (t < 2 || x < 2) throw UsageError("--downsample needs at least 2 rows and 2 columns");
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string scheme = "godunov";
  std::string problem = "I";
  std::string difficulty = "easy";
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string out;
  double dx = 0.0;
  double dt = 0.0;
  double drho = 0.0;
  double horizon = 0.0;
  std::string mode = "ivp";
  std::string downsample;
  std::vector<double> mu_range;
  bool keep_full = false;
  std::string ic_from;
  unsigned threads = 0;
};

int run_generate(const GenerateArgs& a) {
  datagen::GenerationConfig c;
  c.scheme = scheme_from_string(a.scheme);
  c.problem = datagen::problem_from_string(a.problem);
  c.difficulty = datagen::difficulty_from_string(a.difficulty);
  c.mode = datagen::pair_mode_from_string(a.mode);
  c.samples = a.samples;
  c.master_seed = a.seed;
  c.dx = a.dx;
  c.dt = a.dt;
  c.horizon = a.horizon;
  if (a.drho > 0.0) c.mesh_levels = mesh_levels_from_drho(a.drho);
  if (!a.downsample.empty()) parse_downsample(a.downsample, c.out_t, c.out_x);
  if (!a.mu_range.empty()) {
    c.mu_lo = a.mu_range.at(0);
    c.mu_hi = a.mu_range.at(1);
  }
  c.validate();

  dataset::GenerateOptions opts;
  opts.keep_full = a.keep_full;
  opts.threads = a.threads;
  if (!a.ic_from.empty()) opts.ic_from = a.ic_from;
  const auto summary = dataset::generate(c, a.out, opts);
  std::printf("wrote %zu samples to %s (mean attempts %.2f, mean solve %.1f ms)\n",
              summary.manifest.samples.size(), a.out.c_str(), summary.mean_attempts,
              summary.mean_solve_ms);
  return 0;
}

// ---------------------------------------------------------------------------

struct SolveArgs {
  std::string scheme = "godunov";
  std::string ic;
  std::string ic_from;
  std::size_t id = 0;
  std::string problem;
  std::optional<double> phi_left;
  std::optional<double> phi_right;
  std::uint64_t seed = 0;
  double dx = 0.0;
  double dt = 0.0;
  double drho = 0.0;
  double t_end = 0.0;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  ScenarioConfig sc;
  sc.scheme = scheme_from_string(a.scheme);
  sc.seed = a.seed;
  double horizon = a.t_end;

  if (!a.ic_from.empty()) {
    const auto m = dataset::read_manifest(a.ic_from);
    if (a.id >= m.samples.size()) {
      throw FormatError("sample " + std::to_string(a.id) + " not in " + a.ic_from);
    }
    sc.ic = m.samples[a.id].ic;
    sc.bc = m.samples[a.id].bc;
    sc.seed = m.samples[a.id].solver_seed;
    if (horizon == 0.0) horizon = m.config.horizon > 0.0 ? m.config.horizon
                                                          : datagen::default_horizon(m.config.problem);
  } else if (!a.ic.empty()) {
    try {
      sc.ic = dataset::ic_from_json(json::parse(a.ic));
    } catch (const json::exception& e) {
      throw UsageError(std::string("--ic: ") + e.what());
    }
  } else {
    throw UsageError("solve needs --ic or --ic-from");
  }

  if (!a.problem.empty()) {
    const auto p = datagen::problem_from_string(a.problem);
    if (p == datagen::Problem::III_switching) {
      throw UsageError("solve: the switching schedule is random; generate it with `generate`");
    }
    Rng unused(0);
    sc.bc = datagen::gen_bc_schedule(p, unused);
    if (horizon == 0.0) horizon = datagen::default_horizon(p);
  }
  if (a.phi_left || a.phi_right) {
    sc.bc = BoundarySchedule::constant(a.phi_left.value_or(0.0), a.phi_right.value_or(0.0));
  }
  if (horizon == 0.0) horizon = 3.0;

  if (sc.scheme == Scheme::godunov) {
    const auto base = default_godunov_grid(horizon);
    const double dx = a.dx > 0.0 ? a.dx : base.dx();
    const double dt = a.dt > 0.0 ? a.dt : base.dt();
    sc.grid = SpaceTimeGrid::from_spacing(-1.0, 1.0, dx, horizon, dt);
  } else {
    const auto base = default_wft_grid(horizon);
    const double dx = a.dx > 0.0 ? a.dx : base.dx();
    const double dt = a.dt > 0.0 ? a.dt : base.dt();
    sc.grid = SpaceTimeGrid::from_spacing(-1.0, 1.0, dx, horizon, dt);
    if (a.drho > 0.0) sc.mesh_levels = mesh_levels_from_drho(a.drho);
  }
  sc.validate();

  const Trajectory traj = datagen::solve(sc);
  io::write_grid(a.out, traj.rho, io::PayloadKind::trajectory);

  json side;
  side["scheme"] = to_string(sc.scheme);
  side["ic"] = dataset::to_json(sc.ic);
  side["bc"] = dataset::to_json(sc.bc);
  side["seed"] = sc.seed;
  side["grid"] = {{"x_min", sc.grid.x_min()}, {"x_max", sc.grid.x_max()}, {"nx", sc.grid.nx()},
                  {"dx", sc.grid.dx()},       {"dt", sc.grid.dt()},       {"t_end", sc.grid.t_end()}};
  if (sc.scheme == Scheme::wft) side["mesh_levels"] = sc.mesh_levels;
  side["rows"] = traj.rho.rows();
  side["cols"] = traj.rho.cols();
  side["e_cost"] = metrics::e_cost(traj);
  side["delta_xi"] = metrics::delta_xi(traj.xi);
  side["cost_clamped"] = traj.cost_clamped;
  side["times"] = traj.times;
  side["xi"] = traj.xi;
  std::vector<double> masses;
  for (std::size_t r = 0; r < traj.rho.rows(); ++r) masses.push_back(mass(traj.rho.row(r), sc.grid.dx()));
  side["mass"] = masses;
  std::ofstream(a.out + ".json", std::ios::trunc) << side.dump(2) << '\n';

  std::printf("wrote %zux%zu trajectory to %s (e_cost %.3g, delta_xi %.3g)\n", traj.rho.rows(),
              traj.rho.cols(), a.out.c_str(), side["e_cost"].get<double>(),
              side["delta_xi"].get<double>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hughes pedestrian-flow toolkit"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a seeded dataset");
  g->add_option("--scheme", gen.scheme)->check(CLI::IsMember({"godunov", "wft"}));
  g->add_option("--problem", gen.problem)
      ->check(CLI::IsMember({"I", "II", "III-open", "III-switching"}));
  g->add_option("--difficulty", gen.difficulty)->check(CLI::IsMember({"easy", "complex", "all"}));
  g->add_option("--samples", gen.samples)->required();
  g->add_option("--seed", gen.seed)->required();
  g->add_option("--out", gen.out)->required();
  g->add_option("--dx", gen.dx, "Godunov cell width / WFT sample spacing");
  g->add_option("--dt", gen.dt, "Time step (Godunov) or sampling step (WFT)");
  g->add_option("--drho", gen.drho, "WFT density mesh spacing");
  g->add_option("--horizon", gen.horizon);
  g->add_option("--mode", gen.mode)->check(CLI::IsMember({"ivp", "mibvp"}));
  g->add_option("--downsample", gen.downsample, "Target grid TxX");
  g->add_option("--mu-range", gen.mu_range, "Gaussian centre range lo hi")->expected(2);
  g->add_flag("--keep-full", gen.keep_full, "Also store full-resolution trajectories");
  g->add_option("--ic-from", gen.ic_from, "Reuse the IC/BC of an existing dataset");
  g->add_option("--threads", gen.threads);

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve one scenario");
  s->add_option("--scheme", sol.scheme)->check(CLI::IsMember({"godunov", "wft"}));
  auto* ic_opt = s->add_option("--ic", sol.ic, "IC descriptor as JSON");
  auto* ic_from_opt = s->add_option("--ic-from", sol.ic_from, "Dataset to take the IC/BC from");
  ic_opt->excludes(ic_from_opt);
  s->add_option("--id", sol.id);
  s->add_option("--problem", sol.problem)->check(CLI::IsMember({"I", "II", "III-open"}));
  s->add_option("--phi-left", sol.phi_left);
  s->add_option("--phi-right", sol.phi_right);
  s->add_option("--seed", sol.seed);
  s->add_option("--dx", sol.dx);
  s->add_option("--dt", sol.dt);
  s->add_option("--drho", sol.drho);
  s->add_option("--t-end", sol.t_end);
  s->add_option("--out", sol.out)->required();

  std::string pred_dir, truth_dir, metrics_out, split;
  auto* m = app.add_subcommand("metrics", "Score predictions against a dataset");
  m->add_option("--pred", pred_dir)->required();
  m->add_option("--truth", truth_dir)->required();
  m->add_option("--out", metrics_out);
  m->add_option("--split", split)->check(CLI::IsMember({"train", "val", "test"}));

  std::string cmp_a, cmp_b, cmp_out;
  dataset::CompareOptions cmp_opts;
  auto* c = app.add_subcommand("compare", "Cross-scheme comparison of two datasets");
  c->add_option("a", cmp_a)->required();
  c->add_option("b", cmp_b)->required();
  c->add_option("--out", cmp_out)->required();
  c->add_option("--timing-solves", cmp_opts.timing_solves, "Solves per scheme for timing (0 skips)");

  std::string exp_dir, exp_out, exp_split = "all";
  auto* e = app.add_subcommand("export", "Export a dataset as NumPy stacks");
  e->add_option("dir", exp_dir)->required();
  e->add_option("--out", exp_out)->required();
  e->add_option("--split", exp_split)->check(CLI::IsMember({"all", "train", "val", "test"}));

  std::string ver_dir;
  auto* v = app.add_subcommand("verify", "Recheck shapes and checksums of a dataset");
  v->add_option("dir", ver_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_solve(sol);
    if (*m) {
      dataset::ScoreOptions opts;
      if (!split.empty()) opts.split = split;
      const fs::path out = metrics_out.empty() ? fs::path(pred_dir) / "report" : fs::path(metrics_out);
      const auto report = dataset::score_directories(pred_dir, truth_dir, out, opts);
      std::printf("scored %zu samples: mean relative L2 %.6g, median %.6g, clipped TV %.6g\n",
                  report["n_samples"].get<std::size_t>(), report["mean_relative_l2"].get<double>(),
                  report["median_relative_l2"].get<double>(), report["clipped_tv"].get<double>());
      return 0;
    }
    if (*c) {
      const auto report = dataset::compare_directories(cmp_a, cmp_b, cmp_out, cmp_opts);
      std::printf("%s vs %s over %zu samples: median relative L2 %.6g\n",
                  report["scheme_a"].get<std::string>().c_str(),
                  report["scheme_b"].get<std::string>().c_str(),
                  report["n_samples"].get<std::size_t>(), report["median_relative_l2"].get<double>());
      if (report.contains("timing")) {
        const auto& t = report["timing"];
        std::printf("%-8s %10s\n", "scheme", "mean ms");
        std::printf("%-8s %10.2f\n", report["scheme_a"].get<std::string>().c_str(),
                    t["mean_ms_a"].get<double>());
        std::printf("%-8s %10.2f\n", report["scheme_b"].get<std::string>().c_str(),
                    t["mean_ms_b"].get<double>());
      }
      return 0;
    }
    if (*e) {
      (void)dataset::export_numpy(exp_dir, exp_out, exp_split);
      std::printf("exported %s to %s\n", exp_dir.c_str(), exp_out.c_str());
      return 0;
    }
    if (*v) {
      const auto problems = dataset::verify(ver_dir);
      for (const auto& p : problems) std::fprintf(stderr, "%s\n", p.c_str());
      if (!problems.empty()) return kExitData;
      std::printf("ok\n");
      return 0;
    }
  } catch (const UsageError& err) {
    std::fprintf(stderr, "usage error: %s\n", err.what());
    return kExitUsage;
  } catch (const ValidationError& err) {
    std::fprintf(stderr, "usage error: %s\n", err.what());
    return kExitUsage;
  } catch (const SchemeFailure& err) {
    std::fprintf(stderr, "scheme failure: %s\n", err.what());
    return kExitScheme;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "data error: %s\n", err.what());
    return kExitData;
  }
  return kExitUsage;
}
