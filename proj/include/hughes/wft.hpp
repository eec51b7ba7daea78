#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hughes/core.hpp"

// Wavefront tracking for the Hughes model.
//
// The flux is replaced by its piecewise-linear interpolant on a uniform
// density mesh, so every Riemann problem resolves into finitely many straight
// fronts: a single shock, or a fan of mesh-sized steps for rarefactions.
// Fronts are tracked exactly until two of them meet, one reaches an exit or
// one reaches the turning point; each such event spawns a new local Riemann
// problem.
//
// The turning point is quasi-static. At every event it is relocated by the
// exact cost balance of the current piecewise-constant profile, and at the
// turning point both neighbouring regions walk away from each other, which
// opens a vacuum plateau there.

namespace hughes::wft {

/// Uniform density mesh {k / levels : k = 0..levels}.
class DensityMesh {
 public:
  explicit DensityMesh(int levels);

  int levels() const noexcept { return levels_; }
  double spacing() const noexcept { return 1.0 / levels_; }
  double density(int level) const noexcept { return static_cast<double>(level) / levels_; }
  /// Nearest level; throws DomainError outside [0, 1].
  int quantize(double rho) const;
  /// Level of a density that must already lie on the mesh.
  int level_of(double rho) const;
  std::vector<double> levels_as_densities() const;

 private:
  int levels_;
};

enum class FrontKind { shock, fan_step, turning };

struct Front {
  double position = 0.0;
  int left_level = 0;
  int right_level = 0;
  double speed = 0.0;
  FrontKind kind = FrontKind::shock;
  Side side = Side::right;  // which side of the turning point owns the front
};

/// Ordered fronts at time `time`. The plateau left of fronts[0] is
/// fronts[0].left_level; with no fronts the whole domain sits at
/// `background_level`.
struct FrontSet {
  double time = 0.0;
  double xi = 0.0;
  double x_min = -1.0;
  double x_max = 1.0;
  std::vector<Front> fronts;
  int background_level = 0;

  int left_edge_level() const {
    return fronts.empty() ? background_level : fronts.front().left_level;
  }
  int right_edge_level() const {
    return fronts.empty() ? background_level : fronts.back().right_level;
  }
  /// Throws SchemeFailure when positions or states do not chain.
  void check_invariants(const DensityMesh& mesh) const;
};

/// Quantized piecewise-constant initial data: levels[k] holds on
/// (jumps[k-1], jumps[k]).
struct QuantizedProfile {
  std::vector<int> levels;
  std::vector<double> jumps;
};

/// Snaps each plateau to its nearest mesh level and merges equal neighbours.
QuantizedProfile quantize_ic(const ICDescriptor& ic, const DensityMesh& mesh);

/// Front speed for a jump owned by `side`: 1 - l - r right of the turning
/// point, -(1 - l - r) left of it.
double front_speed(double left, double right, Side side);

/// Fronts solving the Riemann problem (left | right) at position 0, ordered
/// by increasing speed. Right of the turning point the flux is +f (concave):
/// increasing jumps are shocks, decreasing jumps fan out. Left of it the
/// flux is -f and the problem is solved by spatial reflection.
std::vector<Front> solve_riemann(int left_level, int right_level, Side side,
                                 const DensityMesh& mesh);

enum class EventKind { collision, turning_crossing, boundary_exit, horizon };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::horizon;
  std::size_t index = 0;  // left front of a colliding pair, or the exiting front
  double position = 0.0;
};

/// Earliest future interaction; a horizon event at t_end when nothing happens
/// before. Ties go to the leftmost position.
Event next_event(const FrontSet& set, double t_end);

/// Moves every front along its straight trajectory up to time t.
void advance_to(FrontSet& set, double t);

/// Exit potentials and cost model used to relocate the turning point.
struct TurningModel {
  FundamentalDiagram diagram;
  double phi_left = 0.0;
  double phi_right = 0.0;
  double closed_threshold = 9999.0;
  /// A refresh moves the turning point across a front only once the balance
  /// point lies at least this far beyond it.
  double crossing_margin = 0.0;
  bool exit_closed(Side side) const {
    return (side == Side::left ? phi_left : phi_right) >= closed_threshold;
  }
};

/// Exact cost balance of the piecewise-constant profile (clamped to the domain).
double balance_turning_point(const FrontSet& set, const DensityMesh& mesh,
                             const TurningModel& model);

/// Builds the initial front set: quantized jumps, turning point, vacuum
/// opening at the turning point and exit waves.
FrontSet initial_front_set(const QuantizedProfile& profile, double x_min, double x_max,
                           const DensityMesh& mesh, const TurningModel& model);

/// Applies an event produced by next_event (the set must already be advanced
/// to the event time), then relocates the turning point and re-solves the
/// Riemann problems whose orientation changed.
void handle_event(FrontSet& set, const Event& event, const DensityMesh& mesh,
                  const TurningModel& model);

/// Relocates the turning point to the exact balance of the current profile,
/// re-solving every front that changes side. handle_event only moves the
/// turning point inside its own plateau (or on a turning-curve crossing);
/// moves across fronts wait for the next refresh, which the solver issues at
/// every sampling instant. Without that throttle a turning point chasing a
/// dense plateau re-crosses the freshly opened vacuum front at ever shorter
/// intervals and the event sequence never reaches the horizon.
void refresh_turning_point(FrontSet& set, const DensityMesh& mesh, const TurningModel& model);

/// Density of the piecewise-constant solution at x.
double density_at(const FrontSet& set, const DensityMesh& mesh, double x);
double total_mass(const FrontSet& set, const DensityMesh& mesh);
double total_variation(const FrontSet& set, const DensityMesh& mesh);

/// Evaluation points for sampling: cell centres, rounded to two decimals
/// when the grid has 201 cells on [-1, 1].
std::vector<double> sample_positions(const SpaceTimeGrid& grid);

/// One recorded state; valid from its time until the next snapshot.
struct Snapshot {
  FrontSet set;
};

/// Samples a recorded front-set history at the grid's stored times.
Trajectory sample_trajectory(const std::vector<Snapshot>& history, const SpaceTimeGrid& grid,
                             const DensityMesh& mesh, std::size_t output_stride = 1);

struct RunStats {
  std::uint64_t events = 0;
  std::size_t max_fronts = 0;
};

Trajectory solve(const ScenarioConfig& config, RunStats* stats = nullptr,
                 const FundamentalDiagram& fd = {});

}  // namespace hughes::wft
