#include "hughes/godunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hughes::godunov {

namespace {

constexpr double kRangeTolerance = 1e-12;

void require_density(double rho, const char* where) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError(std::string(where) + ": density " + std::to_string(rho) +
                      " outside [0, 1]");
  }
}

}  // namespace

double godunov_flux(double rho_left, double rho_right, const FundamentalDiagram& fd) {
  require_density(rho_left, "godunov_flux");
  require_density(rho_right, "godunov_flux");
  const double cr = fd.rho_cr;
  if (rho_right <= cr && rho_left <= cr) return fd.flux(rho_left);
  if (rho_right <= cr && rho_left > cr) return fd.q_max;
  if (rho_right > cr && rho_left <= cr) return std::min(fd.flux(rho_right), fd.flux(rho_left));
  return fd.flux(rho_right);
}

double decide_boundary_flux(Side /*side*/, double potential, double adjacent_density,
                            const FundamentalDiagram& fd, double closed_threshold) {
  if (potential >= closed_threshold) return 0.0;
  // The outflow side is always downstream of the adjacent cell.
  return godunov_flux(adjacent_density, 0.0, fd);
}

TurningPoint find_turning_point(std::span<const double> rho, double phi_left, double phi_right,
                                const SpaceTimeGrid& grid, const FundamentalDiagram& fd) {
  const std::size_t n = rho.size();
  if (n == 0) throw ValidationError("find_turning_point: empty density row");
  if (n != grid.nx()) throw ValidationError("find_turning_point: row length differs from grid");
  const double dx = grid.dx();

  std::vector<double> cost(n);
  for (std::size_t j = 0; j < n; ++j) cost[j] = fd.cost(rho[j]);

  // Prefix sums run left to right and suffix sums right to left, so that a
  // mirrored row reproduces the same partial sums bit for bit.
  std::vector<double> prefix(n);
  std::vector<double> suffix(n);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) prefix[j] = (acc += cost[j]);
  acc = 0.0;
  for (std::size_t j = n; j-- > 0;) suffix[j] = (acc += cost[j]);

  TurningPoint tp;
  double best = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const double c_left = dx * prefix[i] + phi_left;
    const double c_right = dx * suffix[i] + phi_right;
    const double d = c_left - c_right;
    if (std::abs(d) < best) {
      best = std::abs(d);
      tp.index = i;
      tp.residual = d;
    }
  }
  tp.position = grid.center(tp.index);
  tp.left_face_imbalance = phi_left - (dx * suffix[0] + phi_right);
  tp.right_face_imbalance = (dx * prefix[n - 1] + phi_left) - phi_right;
  return tp;
}

GodunovState initial_state(const ScenarioConfig& config) {
  GodunovState s;
  s.rho = project_ic(config.ic, config.grid);
  s.rng_stream = Rng(config.seed);
  s.step_index = 0;
  s.t = 0.0;
  const auto tp =
      find_turning_point(s.rho, config.bc.potential(Side::left, 0.0),
                         config.bc.potential(Side::right, 0.0), config.grid);
  s.xi_index = tp.index;
  s.xi = tp.position;
  return s;
}

GodunovState step(const GodunovState& state, const BoundarySchedule& schedule,
                  const SpaceTimeGrid& grid, const FundamentalDiagram& fd) {
  const std::size_t n = grid.nx();
  const auto& rho = state.rho;
  if (rho.size() != n) throw ValidationError("step: state does not match grid");
  if (grid.cfl(fd.v_max) > 1.0 + 1e-12) throw ValidationError("step: CFL number exceeds 1");

  GodunovState next;
  next.rng_stream = state.rng_stream;
  next.cost_clamped = state.cost_clamped ||
                      std::any_of(rho.begin(), rho.end(), [&](double r) { return fd.cost_clamped(r); });

  const double phi_left = schedule.potential(Side::left, state.t);
  const double phi_right = schedule.potential(Side::right, state.t);
  const auto tp = find_turning_point(rho, phi_left, phi_right, grid, fd);

  // When the balance point lies beyond an exit the whole corridor walks the
  // other way, and the turning cell cannot belong to the empty side.
  Assignment assignment;
  if (tp.left_face_imbalance >= 0.0) {
    assignment = Assignment::forced_right;
  } else if (tp.right_face_imbalance <= 0.0) {
    assignment = Assignment::forced_left;
  } else {
    assignment = next.rng_stream.coin() ? Assignment::right : Assignment::left;
  }
  const bool turning_cell_left =
      assignment == Assignment::left || assignment == Assignment::forced_left;
  // Cells 0..last_left walk left, the rest walk right. last_left may be -1.
  const auto last_left =
      static_cast<std::int64_t>(tp.index) - (turning_cell_left ? 0 : 1);

  // flux[k] is the signed (rightward positive) flux through the face left of
  // cell k; flux[n] is the right exit.
  std::vector<double> flux(n + 1, 0.0);
  if (last_left >= 0) {
    flux[0] = -decide_boundary_flux(Side::left, phi_left, rho[0], fd,
                                    schedule.closed_threshold());
  }
  if (last_left < static_cast<std::int64_t>(n) - 1) {
    flux[n] = decide_boundary_flux(Side::right, phi_right, rho[n - 1], fd,
                                   schedule.closed_threshold());
  }
  for (std::size_t k = 1; k < n; ++k) {
    const auto left_cell = static_cast<std::int64_t>(k) - 1;
    if (left_cell > last_left) {
      flux[k] = godunov_flux(rho[k - 1], rho[k], fd);
    } else if (left_cell < last_left) {
      flux[k] = -godunov_flux(rho[k], rho[k - 1], fd);
    } else {
      flux[k] = 0.0;  // both neighbours walk away from the turning face
    }
  }

  const double ratio = grid.dt() / grid.dx();
  next.rho.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    double value = rho[k] - ratio * (flux[k + 1] - flux[k]);
    if (!(value >= -kRangeTolerance && value <= 1.0 + kRangeTolerance)) {
      throw SchemeFailure("godunov: density " + std::to_string(value) + " left [0, 1] in cell " +
                              std::to_string(k) + " at step " + std::to_string(state.step_index),
                          state.step_index);
    }
    next.rho[k] = std::clamp(value, 0.0, 1.0);
  }

  next.step_index = state.step_index + 1;
  next.t = static_cast<double>(next.step_index) * grid.dt();
  next.xi_index = tp.index;
  next.xi = tp.position;
  next.last_assignment = assignment;
  return next;
}

Trajectory solve(const ScenarioConfig& config, const FundamentalDiagram& fd) {
  if (config.scheme != Scheme::godunov) throw ValidationError("godunov::solve: wrong scheme tag");
  config.validate();
  const auto& grid = config.grid;
  const std::size_t n_time = grid.n_time();
  const std::size_t stride = config.output_stride;
  const std::size_t n_rows = (n_time + stride - 1) / stride;

  Trajectory traj;
  traj.grid = grid;
  traj.scheme_tag = Scheme::godunov;
  traj.rho = Field(n_rows, grid.nx());
  traj.times.reserve(n_rows);
  traj.xi.reserve(n_rows);
  traj.phi_left.reserve(n_rows);
  traj.phi_right.reserve(n_rows);
  traj.turning_draws.reserve(n_time);

  GodunovState state = initial_state(config);
  std::size_t row = 0;
  for (std::size_t k = 0; k < n_time; ++k) {
    const bool store = k % stride == 0;
    if (store) {
      std::copy(state.rho.begin(), state.rho.end(), traj.rho.row(row).begin());
      traj.times.push_back(state.t);
      traj.phi_left.push_back(config.bc.potential(Side::left, state.t));
      traj.phi_right.push_back(config.bc.potential(Side::right, state.t));
    }
    if (k + 1 < n_time) {
      state = step(state, config.bc, grid, fd);
      traj.turning_draws.push_back(static_cast<std::uint8_t>(state.last_assignment));
      if (store) traj.xi.push_back(state.xi);
    } else if (store) {
      const auto tp = find_turning_point(state.rho, traj.phi_left.back(), traj.phi_right.back(),
                                         grid, fd);
      traj.xi.push_back(tp.position);
    }
    if (store) ++row;
  }
  traj.cost_clamped = state.cost_clamped;
  return traj;
}

}  // namespace hughes::godunov
