#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hughes/core.hpp"
#include "hughes/random.hpp"

namespace hughes::datagen {

enum class Problem { I, II, III_open, III_switching };
enum class Difficulty { easy, complex, all };
enum class Classification { easy, complex, rejected };
enum class PairMode { ivp, mibvp };

std::string to_string(Problem p);
std::string to_string(Difficulty d);
std::string to_string(Classification c);
std::string to_string(PairMode m);
Problem problem_from_string(const std::string& s);
Difficulty difficulty_from_string(const std::string& s);
Classification classification_from_string(const std::string& s);
PairMode pair_mode_from_string(const std::string& s);

/// k_1 ~ U(0.05, 0.95), k_j = k_{j-1} + N(0, 0.5) redrawn until it lies in
/// (0, 1) and differs from k_{j-1}; jump positions uniform, unique, sorted.
ICDescriptor gen_piecewise_ic(std::size_t n_jumps, Rng& rng, double x_min = -1.0,
                              double x_max = 1.0);

/// mu ~ U(mu_lo, mu_hi), sigma ~ U(sigma_floor, x_max / 2).
ICDescriptor gen_gaussian_ic(Rng& rng, double mu_lo = 0.0, double mu_hi = 1.0,
                             double sigma_floor = 0.05, double x_max = 1.0);

BoundarySchedule gen_bc_schedule(Problem problem, Rng& rng);

/// 5 for the switching-exit problem, 3 otherwise.
double default_horizon(Problem problem);

/// Strict thresholds on both sides: delta_xi == 0.3 is rejected.
Classification classify(double delta_xi, std::size_t n_discontinuities);

/// Nearest-index map round(i (src - 1) / (dst - 1)); keeps both endpoints.
std::vector<std::size_t> downsample_indices(std::size_t src, std::size_t dst);
Field downsample(const Field& grid, std::size_t rows, std::size_t cols);

struct SamplePair {
  Field X;
  Field Y;
  PairMode mode = PairMode::ivp;
};

/// Y is the target grid; row_times are the physical times of its rows.
/// IVP: X keeps row 0 of Y and zeros elsewhere. MIBVP: additionally the two
/// edge columns carry potential / 10000 at every row (row 0 included).
SamplePair build_training_pair(const Field& Y, const BoundarySchedule& bc,
                               const std::vector<double>& row_times, PairMode mode);

/// Dispatches to the solver named by config.scheme.
Trajectory solve(const ScenarioConfig& config, const FundamentalDiagram& fd = {});

struct GenerationConfig {
  Scheme scheme = Scheme::godunov;
  Problem problem = Problem::I;
  Difficulty difficulty = Difficulty::easy;
  std::size_t samples = 0;
  std::uint64_t master_seed = 0;
  double dx = 0.0;       // 0 selects the scheme default
  double dt = 0.0;       // 0 selects the scheme default
  int mesh_levels = 250;
  double horizon = 0.0;  // 0 selects default_horizon(problem)
  PairMode mode = PairMode::ivp;
  std::size_t out_t = 50;
  std::size_t out_x = 0;  // 0 selects 200 (godunov) or 201 (wft)
  double mu_lo = 0.0;
  double mu_hi = 1.0;
  double sigma_floor = 0.05;
  std::uint32_t max_attempts = 1000;

  /// Throws ValidationError for unsupported combinations.
  void validate() const;
  SpaceTimeGrid source_grid() const;
  std::size_t target_cols() const;
  bool piecewise_ic() const { return problem == Problem::I || problem == Problem::II; }
};

struct SampleRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;         // stream seed of this sample
  std::uint64_t solver_seed = 0;  // seed handed to the solver
  std::uint32_t attempts = 0;
  ICDescriptor ic;
  BoundarySchedule bc;
  Trajectory trajectory;
  Classification classification = Classification::rejected;
  double delta_xi = 0.0;
  std::size_t n_discontinuities = 0;
  double e_cost = 0.0;
  double solve_ms = 0.0;
};

/// Draws, solves and classifies sample `index` until it meets the requested
/// difficulty. Complex samples are screened with a Godunov solve at the
/// default resolution, so complex sets of both schemes share their ICs.
SampleRecord generate_sample(const GenerationConfig& config, std::size_t index);

/// Solves a given IC/BC pair under the configuration (no rejection).
SampleRecord solve_sample(const GenerationConfig& config, std::size_t index, const ICDescriptor& ic,
                          const BoundarySchedule& bc, std::uint64_t solver_seed);

/// Downsampled target grid of a record and the times of its rows.
Field target_grid(const SampleRecord& record, const GenerationConfig& config,
                  std::vector<double>* row_times = nullptr);

}  // namespace hughes::datagen
