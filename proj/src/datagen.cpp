#include "hughes/datagen.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hughes/godunov.hpp"
#include "hughes/metrics.hpp"
#include "hughes/wft.hpp"

namespace hughes::datagen {

std::string to_string(Problem p) {
  switch (p) {
    case Problem::I: return "I";
    case Problem::II: return "II";
    case Problem::III_open: return "III-open";
    case Problem::III_switching: return "III-switching";
  }
  return "?";
}

std::string to_string(Difficulty d) {
  switch (d) {
    case Difficulty::easy: return "easy";
    case Difficulty::complex: return "complex";
    case Difficulty::all: return "all";
  }
  return "?";
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::easy: return "easy";
    case Classification::complex: return "complex";
    case Classification::rejected: return "unclassified";
  }
  return "?";
}

std::string to_string(PairMode m) { return m == PairMode::ivp ? "ivp" : "mibvp"; }

Problem problem_from_string(const std::string& s) {
  if (s == "I") return Problem::I;
  if (s == "II") return Problem::II;
  if (s == "III-open") return Problem::III_open;
  if (s == "III-switching") return Problem::III_switching;
  throw ValidationError("unknown problem '" + s + "'");
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "easy") return Difficulty::easy;
  if (s == "complex") return Difficulty::complex;
  if (s == "all") return Difficulty::all;
  throw ValidationError("unknown difficulty '" + s + "'");
}

Classification classification_from_string(const std::string& s) {
  if (s == "easy") return Classification::easy;
  if (s == "complex") return Classification::complex;
  if (s == "unclassified") return Classification::rejected;
  throw ValidationError("unknown classification '" + s + "'");
}

PairMode pair_mode_from_string(const std::string& s) {
  if (s == "ivp") return PairMode::ivp;
  if (s == "mibvp") return PairMode::mibvp;
  throw ValidationError("unknown pair mode '" + s + "'");
}

// ---------------------------------------------------------------------------
// Generators

ICDescriptor gen_piecewise_ic(std::size_t n_jumps, Rng& rng, double x_min, double x_max) {
  std::vector<double> plateaus;
  plateaus.reserve(n_jumps + 1);
  plateaus.push_back(rng.uniform(0.05, 0.95));
  for (std::size_t j = 0; j < n_jumps; ++j) {
    const double prev = plateaus.back();
    double k;
    do {
      k = prev + rng.normal(0.0, 0.5);
    } while (!(k > 0.0 && k < 1.0) || k == prev);
    plateaus.push_back(k);
  }

  std::vector<double> jumps;
  jumps.reserve(n_jumps);
  while (jumps.size() < n_jumps) {
    const double x = rng.uniform(x_min, x_max);
    if (x <= x_min) continue;
    if (std::find(jumps.begin(), jumps.end(), x) != jumps.end()) continue;
    jumps.push_back(x);
  }
  std::sort(jumps.begin(), jumps.end());
  return ICDescriptor::piecewise_constant(std::move(plateaus), std::move(jumps));
}

ICDescriptor gen_gaussian_ic(Rng& rng, double mu_lo, double mu_hi, double sigma_floor,
                             double x_max) {
  const double mu = rng.uniform(mu_lo, mu_hi);
  const double sigma = rng.uniform(sigma_floor, x_max / 2.0);
  return ICDescriptor::gaussian(mu, sigma);
}

BoundarySchedule gen_bc_schedule(Problem problem, Rng& rng) {
  constexpr double high = BoundarySchedule::kHighPotential;
  switch (problem) {
    case Problem::I:
    case Problem::III_open:
      return BoundarySchedule::constant(0.0, 0.0);
    case Problem::II:
      return BoundarySchedule::constant(high, high);
    case Problem::III_switching: {
      static constexpr double windows[5][2] = {
          {0.08, 0.5}, {0.8, 1.0}, {1.4, 2.2}, {2.5, 2.75}, {2.8, 3.33}};
      std::vector<BoundarySchedule::Segment> left{{0.0, high}};
      double level = high;
      for (const auto& w : windows) {
        level = level == high ? 0.0 : high;
        const double t = rng.uniform(w[0], w[1]);
        if (!(t > left.back().start)) throw Error("switch times are not increasing");
        left.push_back({t, level});
      }
      return BoundarySchedule(std::move(left), {{0.0, 0.0}});
    }
  }
  throw ValidationError("unknown problem");
}

double default_horizon(Problem problem) {
  return problem == Problem::III_switching ? 5.0 : 3.0;
}

Classification classify(double delta_xi, std::size_t n_discontinuities) {
  if (delta_xi < 0.3 && n_discontinuities <= 3) return Classification::easy;
  if (delta_xi > 0.3 && n_discontinuities <= 10) return Classification::complex;
  return Classification::rejected;
}

// ---------------------------------------------------------------------------
// Training pairs

std::vector<std::size_t> downsample_indices(std::size_t src, std::size_t dst) {
  if (dst == 0 || src == 0) throw ValidationError("downsample: empty axis");
  if (dst > src) {
    throw ValidationError("downsample: target " + std::to_string(dst) + " exceeds source " +
                          std::to_string(src));
  }
  std::vector<std::size_t> idx(dst, 0);
  if (dst == 1) return idx;
  for (std::size_t i = 0; i < dst; ++i) {
    const double pos = static_cast<double>(i) * static_cast<double>(src - 1) /
                       static_cast<double>(dst - 1);
    idx[i] = static_cast<std::size_t>(std::llround(pos));
  }
  return idx;
}

Field downsample(const Field& grid, std::size_t rows, std::size_t cols) {
  const auto ri = downsample_indices(grid.rows(), rows);
  const auto ci = downsample_indices(grid.cols(), cols);
  Field out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = grid(ri[r], ci[c]);
  }
  return out;
}

SamplePair build_training_pair(const Field& Y, const BoundarySchedule& bc,
                               const std::vector<double>& row_times, PairMode mode) {
  if (row_times.size() != Y.rows()) throw ValidationError("training pair: row times mismatch");
  SamplePair pair;
  pair.mode = mode;
  pair.Y = Y;
  pair.X = Field(Y.rows(), Y.cols());
  if (Y.rows() == 0 || Y.cols() == 0) return pair;
  std::copy(Y.row(0).begin(), Y.row(0).end(), pair.X.row(0).begin());
  if (mode == PairMode::mibvp) {
    const std::size_t last = Y.cols() - 1;
    for (std::size_t r = 0; r < Y.rows(); ++r) {
      pair.X(r, 0) = bc.potential(Side::left, row_times[r]) / BoundarySchedule::kHighPotential;
      pair.X(r, last) =
          bc.potential(Side::right, row_times[r]) / BoundarySchedule::kHighPotential;
    }
  }
  return pair;
}

Trajectory solve(const ScenarioConfig& config, const FundamentalDiagram& fd) {
  if (config.scheme == Scheme::wft) return wft::solve(config, nullptr, fd);
  return godunov::solve(config, fd);
}

// ---------------------------------------------------------------------------
// Generation

void GenerationConfig::validate() const {
  if (scheme == Scheme::wft && problem != Problem::I) {
    throw ValidationError("wavefront tracking is only available for problem I");
  }
  if (dx < 0.0 || dt < 0.0 || horizon < 0.0) {
    throw ValidationError("dx, dt and horizon must be positive");
  }
  if (mesh_levels < 1) throw ValidationError("density mesh needs at least one level");
  if (out_t < 1) throw ValidationError("downsample target must be positive");
  if (!(mu_hi > mu_lo)) throw ValidationError("empty mu range");
  if (!(sigma_floor > 0.0 && sigma_floor < 0.5)) {
    throw ValidationError("sigma floor must lie in (0, 0.5)");
  }
  if (max_attempts == 0) throw ValidationError("max_attempts must be positive");
  const auto grid = source_grid();
  if (scheme == Scheme::godunov && grid.cfl() > 1.0 + 1e-12) {
    throw ValidationError("CFL number " + std::to_string(grid.cfl()) + " exceeds 1");
  }
  if (out_t > grid.n_time() || target_cols() > grid.nx()) {
    throw ValidationError("downsample target exceeds the source grid");
  }
}

SpaceTimeGrid GenerationConfig::source_grid() const {
  const double t_end = horizon > 0.0 ? horizon : default_horizon(problem);
  const SpaceTimeGrid def =
      scheme == Scheme::wft ? default_wft_grid(t_end) : default_godunov_grid(t_end);
  if (dx == 0.0 && dt == 0.0) return def;
  return SpaceTimeGrid::from_spacing(-1.0, 1.0, dx > 0.0 ? dx : def.dx(), t_end,
                                     dt > 0.0 ? dt : def.dt());
}

std::size_t GenerationConfig::target_cols() const {
  if (out_x > 0) return out_x;
  return scheme == Scheme::wft ? 201 : 200;
}

namespace {

std::size_t draw_jump_count(const GenerationConfig& c, Rng& rng) {
  std::int64_t hi = 10;
  if (c.difficulty == Difficulty::easy || c.problem == Problem::II) hi = 3;
  if (c.difficulty == Difficulty::complex) hi = 10;
  return static_cast<std::size_t>(rng.uniform_int(1, hi));
}

ScenarioConfig scenario(const GenerationConfig& c, const ICDescriptor& ic,
                        const BoundarySchedule& bc, std::uint64_t solver_seed) {
  ScenarioConfig s;
  s.scheme = c.scheme;
  s.grid = c.source_grid();
  s.mesh_levels = c.mesh_levels;
  s.ic = ic;
  s.bc = bc;
  s.seed = solver_seed;
  return s;
}

}  // namespace

SampleRecord solve_sample(const GenerationConfig& config, std::size_t index, const ICDescriptor& ic,
                          const BoundarySchedule& bc, std::uint64_t solver_seed) {
  SampleRecord rec;
  rec.index = index;
  rec.seed = derive_seed(config.master_seed, index);
  rec.solver_seed = solver_seed;
  rec.attempts = 1;
  rec.ic = ic;
  rec.bc = bc;
  const auto t0 = std::chrono::steady_clock::now();
  rec.trajectory = solve(scenario(config, ic, bc, solver_seed));
  rec.solve_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rec.n_discontinuities = ic.n_discontinuities();
  rec.delta_xi = metrics::delta_xi(rec.trajectory.xi);
  rec.e_cost = metrics::e_cost(rec.trajectory);
  rec.classification = classify(rec.delta_xi, rec.n_discontinuities);
  return rec;
}

SampleRecord generate_sample(const GenerationConfig& config, std::size_t index) {
  const std::uint64_t seed = derive_seed(config.master_seed, index);
  Rng rng(seed);
  GenerationConfig screen = config;
  screen.scheme = Scheme::godunov;
  screen.dx = 0.0;
  screen.dt = 0.0;
  const bool godunov_screen = config.difficulty == Difficulty::complex;

  for (std::uint32_t attempt = 1; attempt <= config.max_attempts; ++attempt) {
    ICDescriptor ic;
    if (config.piecewise_ic()) {
      ic = gen_piecewise_ic(draw_jump_count(config, rng), rng);
    } else {
      ic = gen_gaussian_ic(rng, config.mu_lo, config.mu_hi, config.sigma_floor);
    }
    BoundarySchedule bc = gen_bc_schedule(config.problem, rng);
    const std::uint64_t solver_seed = rng.next_u64();

    if (godunov_screen) {
      const bool same = config.scheme == Scheme::godunov &&
                        config.source_grid().nx() == screen.source_grid().nx() &&
                        config.source_grid().dt() == screen.source_grid().dt();
      SampleRecord probe = solve_sample(screen, index, ic, bc, solver_seed);
      if (probe.classification != Classification::complex) continue;
      SampleRecord rec = same ? std::move(probe) : solve_sample(config, index, ic, bc, solver_seed);
      rec.classification = Classification::complex;
      rec.attempts = attempt;
      return rec;
    }

    SampleRecord rec = solve_sample(config, index, ic, bc, solver_seed);
    rec.attempts = attempt;
    if (config.difficulty == Difficulty::all) return rec;
    if (config.difficulty == Difficulty::easy && rec.classification == Classification::easy) {
      return rec;
    }
  }
  throw Error("sample " + std::to_string(index) + ": no " + to_string(config.difficulty) +
              " draw within " + std::to_string(config.max_attempts) + " attempts");
}

Field target_grid(const SampleRecord& record, const GenerationConfig& config,
                  std::vector<double>* row_times) {
  const auto& traj = record.trajectory;
  const auto ri = downsample_indices(traj.n_rows(), config.out_t);
  if (row_times) {
    row_times->clear();
    for (auto r : ri) row_times->push_back(traj.times.at(r));
  }
  return downsample(traj.rho, config.out_t, config.target_cols());
}

}  // namespace hughes::datagen
