#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hughes/core.hpp"
#include "hughes/random.hpp"

namespace hughes::godunov {

/// Supply-demand Godunov flux for a rightward flow from `rho_left` into
/// `rho_right`. For the leftward flow left of the turning point the same
/// function is called with the arguments swapped.
double godunov_flux(double rho_left, double rho_right, const FundamentalDiagram& fd = {});

/// Flux magnitude through an exit. A potential at or above the closed
/// threshold shuts the exit; otherwise the adjacent cell drains into a vacuum
/// ghost state.
double decide_boundary_flux(Side side, double potential, double adjacent_density,
                            const FundamentalDiagram& fd = {}, double closed_threshold = 9999.0);

struct TurningPoint {
  std::size_t index = 0;
  double position = 0.0;
  /// Imbalance C_left - C_right at the chosen cell.
  double residual = 0.0;
  /// Imbalance evaluated at the outer faces of the domain. When the left face
  /// is already non-negative every pedestrian walks right (and vice versa).
  double left_face_imbalance = 0.0;
  double right_face_imbalance = 0.0;
};

/// Discrete cost balance
///   C_left(i)  = dx * sum_{j <= i} c(rho_j) + phi_left
///   C_right(i) = dx * sum_{j >= i} c(rho_j) + phi_right
/// returning argmin_i |C_left - C_right| (smallest index on ties).
TurningPoint find_turning_point(std::span<const double> rho, double phi_left, double phi_right,
                                const SpaceTimeGrid& grid, const FundamentalDiagram& fd = {});

/// How the turning cell was assigned in one step.
enum class Assignment : std::uint8_t { left = 0, right = 1, forced_right = 2, forced_left = 3 };

struct GodunovState {
  std::vector<double> rho;
  std::int64_t step_index = 0;
  double t = 0.0;
  std::size_t xi_index = 0;
  double xi = 0.0;
  Rng rng_stream;
  Assignment last_assignment = Assignment::left;
  bool cost_clamped = false;
};

GodunovState initial_state(const ScenarioConfig& config);

/// Advances one time step: recompute the turning point, assign the turning
/// cell to one side, update both subdomains conservatively.
GodunovState step(const GodunovState& state, const BoundarySchedule& schedule,
                  const SpaceTimeGrid& grid, const FundamentalDiagram& fd = {});

Trajectory solve(const ScenarioConfig& config, const FundamentalDiagram& fd = {});

}  // namespace hughes::godunov
