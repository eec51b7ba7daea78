#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Shared domain types for the 1D Hughes pedestrian model on [x_min, x_max]:
//
//     rho_t + ( sgn(x - xi(t)) f(rho) )_x = 0,     f(rho) = rho (1 - rho)
//
// where the turning point xi(t) balances the cumulative travel cost
// c(rho) = 1 / (1 - rho) (plus the exit potentials) towards both exits.

namespace hughes {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A density or parameter outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A solver produced an inadmissible state (CFL violation, flux bug, ...).
class SchemeFailure : public Error {
 public:
  SchemeFailure(const std::string& what, std::int64_t step_index = -1)
      : Error(what), step_index_(step_index) {}
  std::int64_t step_index() const noexcept { return step_index_; }

 private:
  std::int64_t step_index_;
};

/// Malformed or inconsistent on-disk data.
class FormatError : public Error {
 public:
  using Error::Error;
};

enum class Scheme { godunov, wft };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

enum class Side { left, right };

/// Greenshields fundamental diagram in normalized units.
struct FundamentalDiagram {
  double rho_max = 1.0;
  double v_max = 1.0;
  double rho_cr = 0.5;
  double q_max = 0.25;
  double cost_clamp = 1.0 - 1e-8;

  double velocity(double rho) const;
  /// f(rho) = rho (1 - rho); throws DomainError outside [0, 1].
  double flux(double rho) const;
  /// c(rho) = 1 / (1 - min(rho, cost_clamp)); finite on [0, 1].
  double cost(double rho) const;
  bool cost_clamped(double rho) const noexcept { return rho > cost_clamp; }
};

/// Uniform cell-centred grid on [x_min, x_max] with a fixed time step.
class SpaceTimeGrid {
 public:
  SpaceTimeGrid() = default;
  SpaceTimeGrid(double x_min, double x_max, std::size_t nx, double t_end, double dt);

  /// Grid with nx = round((x_max - x_min) / dx).
  static SpaceTimeGrid from_spacing(double x_min, double x_max, double dx, double t_end,
                                    double dt);

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t nx() const noexcept { return nx_; }
  double t_end() const noexcept { return t_end_; }
  double dt() const noexcept { return dt_; }
  double dx() const noexcept { return (x_max_ - x_min_) / static_cast<double>(nx_); }
  /// Number of time levels t_k = k dt with t_k < t_end.
  std::size_t n_time() const noexcept { return n_time_; }
  double cfl(double v_max = 1.0) const noexcept { return v_max * dt_ / dx(); }
  std::span<const double> cell_centers() const noexcept { return centers_; }
  double center(std::size_t i) const { return centers_.at(i); }
  /// Index of the cell containing x (clamped to the domain).
  std::size_t cell_of(double x) const noexcept;

 private:
  double x_min_ = -1.0;
  double x_max_ = 1.0;
  std::size_t nx_ = 0;
  double t_end_ = 0.0;
  double dt_ = 0.0;
  std::size_t n_time_ = 0;
  std::vector<double> centers_;
};

/// Dense row-major [rows x cols] array of doubles.
class Field {
 public:
  Field() = default;
  Field(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Field(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }

  bool operator==(const Field&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Exit potentials phi(t, x_min) and phi(t, x_max), piecewise constant in time.
class BoundarySchedule {
 public:
  static constexpr double kHighPotential = 10000.0;

  struct Segment {
    double start;  // segment is active on [start, next start)
    double level;
    bool operator==(const Segment&) const = default;
  };

  BoundarySchedule();
  BoundarySchedule(std::vector<Segment> left, std::vector<Segment> right,
                   double closed_threshold = 9999.0);

  static BoundarySchedule constant(double left_level, double right_level);

  double potential(Side side, double t) const;
  bool closed(Side side, double t) const { return potential(side, t) >= closed_threshold_; }
  double closed_threshold() const noexcept { return closed_threshold_; }
  const std::vector<Segment>& segments(Side side) const {
    return side == Side::left ? left_ : right_;
  }
  bool time_invariant() const noexcept { return left_.size() == 1 && right_.size() == 1; }
  /// Checks switch ordering against a horizon; throws ValidationError.
  void validate(double t_end) const;

  bool operator==(const BoundarySchedule&) const = default;

 private:
  std::vector<Segment> left_;
  std::vector<Segment> right_;
  double closed_threshold_ = 9999.0;
};

/// Initial density profile: plateaus separated by jumps, or a Gaussian pulse.
struct ICDescriptor {
  enum class Kind { piecewise, gaussian };

  Kind kind = Kind::piecewise;
  std::vector<double> plateaus;  // size jumps + 1
  std::vector<double> jumps;     // sorted jump positions
  double mu = 0.0;
  double sigma = 1.0;

  static ICDescriptor constant(double value);
  static ICDescriptor piecewise_constant(std::vector<double> plateaus, std::vector<double> jumps);
  static ICDescriptor gaussian(double mu, double sigma);

  double evaluate(double x) const;
  std::size_t n_discontinuities() const noexcept {
    return kind == Kind::piecewise ? jumps.size() : 0;
  }
  /// Structural checks; densities must lie in [0, 1]. Generators additionally
  /// enforce the open interval (see validate_generated).
  void validate(double x_min, double x_max) const;
  /// Generator invariants: plateaus in (0, 1), consecutive plateaus distinct,
  /// unique sorted jumps strictly inside the domain, sigma > 0.
  void validate_generated(double x_min, double x_max) const;

  bool operator==(const ICDescriptor&) const = default;
};

/// Samples the descriptor at the cell centres.
std::vector<double> project_ic(const ICDescriptor& ic, const SpaceTimeGrid& grid);

/// Sampled space-time density with the turning-point path and exit data.
struct Trajectory {
  SpaceTimeGrid grid;
  Field rho;                  // [stored time, cell]
  std::vector<double> times;  // time of each stored row
  std::vector<double> xi;     // turning point per stored row
  std::vector<double> phi_left;
  std::vector<double> phi_right;
  Scheme scheme_tag = Scheme::godunov;
  /// Godunov turning-cell assignment per step: 0 left, 1 right, 2 forced right,
  /// 3 forced left. Empty for wavefront tracking.
  std::vector<std::uint8_t> turning_draws;
  bool cost_clamped = false;

  std::size_t n_rows() const noexcept { return rho.rows(); }
};

/// Everything needed to reproduce one solve.
struct ScenarioConfig {
  Scheme scheme = Scheme::godunov;
  SpaceTimeGrid grid;
  int mesh_levels = 250;  // wavefront tracking density mesh: spacing 1 / mesh_levels
  ICDescriptor ic;
  BoundarySchedule bc;
  std::uint64_t seed = 0;
  std::size_t output_stride = 1;
  std::uint64_t event_cap = 10'000'000;

  void validate() const;
};

/// Default grids for each scheme (domain [-1, 1], horizon t_end).
SpaceTimeGrid default_godunov_grid(double t_end = 3.0);
SpaceTimeGrid default_wft_grid(double t_end = 3.0);

/// Total mass sum(rho) dx of one row.
double mass(std::span<const double> row, double dx);

}  // namespace hughes
