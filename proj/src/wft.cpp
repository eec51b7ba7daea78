#include "hughes/wft.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

namespace hughes::wft {

// ---------------------------------------------------------------------------
// DensityMesh

DensityMesh::DensityMesh(int levels) : levels_(levels) {
  if (levels < 1) throw ValidationError("density mesh needs at least one level");
}

int DensityMesh::quantize(double rho) const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("quantize: density outside [0, 1]");
  return static_cast<int>(std::lround(rho * levels_));
}

int DensityMesh::level_of(double rho) const {
  const int k = quantize(rho);
  if (std::abs(density(k) - rho) > 1e-12) {
    throw ValidationError("density " + std::to_string(rho) + " is not on the mesh");
  }
  return k;
}

std::vector<double> DensityMesh::levels_as_densities() const {
  std::vector<double> out(static_cast<std::size_t>(levels_) + 1);
  for (int k = 0; k <= levels_; ++k) out[static_cast<std::size_t>(k)] = density(k);
  return out;
}

// ---------------------------------------------------------------------------

void FrontSet::check_invariants(const DensityMesh& mesh) const {
  constexpr double tol = 1e-9;
  std::size_t turning = 0;
  for (std::size_t i = 0; i < fronts.size(); ++i) {
    const Front& f = fronts[i];
    auto where = [&] { return " (front " + std::to_string(i) + ", t=" + std::to_string(time) + ")"; };
    if (f.left_level < 0 || f.left_level > mesh.levels() || f.right_level < 0 ||
        f.right_level > mesh.levels()) {
      throw SchemeFailure("wft: state off the density mesh" + where());
    }
    if (f.position < x_min - tol || f.position > x_max + tol) {
      throw SchemeFailure("wft: front outside the domain" + where());
    }
    if (f.kind == FrontKind::turning) {
      ++turning;
    } else if (f.left_level == f.right_level) {
      throw SchemeFailure("wft: front without a jump" + where());
    }
    if (f.kind == FrontKind::fan_step && std::abs(f.left_level - f.right_level) != 1) {
      throw SchemeFailure("wft: fan step larger than one mesh cell" + where());
    }
    if (i > 0) {
      if (fronts[i - 1].right_level != f.left_level) {
        throw SchemeFailure("wft: states do not chain" + where());
      }
      if (f.position < fronts[i - 1].position - tol) {
        throw SchemeFailure("wft: fronts out of order" + where());
      }
    }
  }
  if (turning != 1) throw SchemeFailure("wft: expected exactly one turning front");
}

QuantizedProfile quantize_ic(const ICDescriptor& ic, const DensityMesh& mesh) {
  if (ic.kind != ICDescriptor::Kind::piecewise) {
    throw ValidationError("wavefront tracking needs piecewise-constant initial data");
  }
  QuantizedProfile out;
  out.levels.push_back(mesh.quantize(ic.plateaus.front()));
  for (std::size_t k = 0; k < ic.jumps.size(); ++k) {
    const int level = mesh.quantize(ic.plateaus[k + 1]);
    if (level == out.levels.back()) continue;  // merged plateau
    out.levels.push_back(level);
    out.jumps.push_back(ic.jumps[k]);
  }
  return out;
}

double front_speed(double left, double right, Side side) {
  const double s = 1.0 - left - right;
  return side == Side::right ? s : -s;
}

std::vector<Front> solve_riemann(int left_level, int right_level, Side side,
                                 const DensityMesh& mesh) {
  if (left_level < 0 || left_level > mesh.levels() || right_level < 0 ||
      right_level > mesh.levels()) {
    throw ValidationError("solve_riemann: state off the density mesh");
  }
  std::vector<Front> out;
  if (left_level == right_level) return out;

  if (side == Side::left) {
    // x -> -x turns rho_t - f(rho)_x = 0 into rho_t + f(rho)_x = 0.
    auto mirrored = solve_riemann(right_level, left_level, Side::right, mesh);
    out.reserve(mirrored.size());
    for (auto it = mirrored.rbegin(); it != mirrored.rend(); ++it) {
      Front f = *it;
      std::swap(f.left_level, f.right_level);
      f.speed = -f.speed;
      f.side = Side::left;
      out.push_back(f);
    }
    return out;
  }

  if (left_level < right_level) {
    // concave flux: an increasing jump is an admissible shock
    Front f;
    f.left_level = left_level;
    f.right_level = right_level;
    f.speed = front_speed(mesh.density(left_level), mesh.density(right_level), Side::right);
    f.kind = right_level - left_level == 1 ? FrontKind::fan_step : FrontKind::shock;
    f.side = Side::right;
    out.push_back(f);
    return out;
  }

  // rarefaction: one step per mesh cell, slowest first
  out.reserve(static_cast<std::size_t>(left_level - right_level));
  for (int k = left_level; k > right_level; --k) {
    Front f;
    f.left_level = k;
    f.right_level = k - 1;
    f.speed = front_speed(mesh.density(k), mesh.density(k - 1), Side::right);
    f.kind = FrontKind::fan_step;
    f.side = Side::right;
    out.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Events

Event next_event(const FrontSet& set, double t_end) {
  Event best;
  best.kind = EventKind::horizon;
  best.time = t_end;
  best.position = set.x_max;

  auto consider = [&](double time, EventKind kind, std::size_t index, double position) {
    if (time > t_end) return;
    if (best.kind == EventKind::horizon || time < best.time ||
        (time == best.time && position < best.position)) {
      best = {time, kind, index, position};
    }
  };

  const auto& fr = set.fronts;
  for (std::size_t i = 0; i + 1 < fr.size(); ++i) {
    const double closing = fr[i].speed - fr[i + 1].speed;
    if (!(closing > 0.0)) continue;
    const double gap = std::max(0.0, fr[i + 1].position - fr[i].position);
    const double dt = gap / closing;
    const bool turning =
        fr[i].kind == FrontKind::turning || fr[i + 1].kind == FrontKind::turning;
    consider(set.time + dt, turning ? EventKind::turning_crossing : EventKind::collision, i,
             fr[i].position + fr[i].speed * dt);
  }
  if (!fr.empty()) {
    const Front& first = fr.front();
    if (first.kind != FrontKind::turning && first.speed < 0.0) {
      const double dt = std::max(0.0, first.position - set.x_min) / -first.speed;
      consider(set.time + dt, EventKind::boundary_exit, 0, set.x_min);
    }
    const Front& last = fr.back();
    if (last.kind != FrontKind::turning && last.speed > 0.0) {
      const double dt = std::max(0.0, set.x_max - last.position) / last.speed;
      consider(set.time + dt, EventKind::boundary_exit, fr.size() - 1, set.x_max);
    }
  }
  return best;
}

void advance_to(FrontSet& set, double t) {
  const double dt = t - set.time;
  if (dt < 0.0) throw SchemeFailure("wft: time cannot run backwards");
  double floor = set.x_min;
  for (auto& f : set.fronts) {
    f.position = std::clamp(f.position + f.speed * dt, set.x_min, set.x_max);
    f.position = std::max(f.position, floor);  // rounding must not reorder fronts
    floor = f.position;
  }
  set.time = t;
}

// ---------------------------------------------------------------------------
// Profile queries

namespace {

template <typename Visit>
void for_each_plateau(const FrontSet& set, Visit&& visit) {
  double start = set.x_min;
  int level = set.left_edge_level();
  for (const auto& f : set.fronts) {
    const double end = std::clamp(f.position, set.x_min, set.x_max);
    visit(start, std::max(start, end), level);
    start = std::max(start, end);
    level = f.right_level;
  }
  visit(start, set.x_max, level);
}

std::size_t turning_index(const FrontSet& set) {
  for (std::size_t i = 0; i < set.fronts.size(); ++i) {
    if (set.fronts[i].kind == FrontKind::turning) return i;
  }
  return set.fronts.size();
}

/// Inserts the turning front at set.xi and opens a vacuum plateau around it.
void insert_turning(FrontSet& set, const DensityMesh& mesh) {
  auto& fr = set.fronts;
  const double xi = set.xi;
  auto pos = std::find_if(fr.begin(), fr.end(), [&](const Front& f) {
    return f.position > xi || (f.position == xi && f.side == Side::right);
  });
  const auto idx = static_cast<std::size_t>(pos - fr.begin());
  const int m = idx == 0 ? set.left_edge_level() : fr[idx - 1].right_level;

  const bool left_room = xi > set.x_min;
  const bool right_room = xi < set.x_max;
  std::vector<Front> inserted;
  if (m != 0 && left_room) {
    for (auto f : solve_riemann(m, 0, Side::left, mesh)) {
      f.position = xi;
      inserted.push_back(f);
    }
  }
  // A turning point sitting on an exit has no room on that side: only the
  // inner side opens a vacuum. Both sides pinned only happens on a
  // degenerate domain, which keeps its plateau.
  Front turning;
  turning.position = xi;
  turning.kind = FrontKind::turning;
  turning.speed = 0.0;
  turning.side = Side::right;
  turning.left_level = turning.right_level = (m != 0 && !left_room && !right_room) ? m : 0;
  inserted.push_back(turning);
  if (m != 0 && right_room) {
    for (auto f : solve_riemann(0, m, Side::right, mesh)) {
      f.position = xi;
      inserted.push_back(f);
    }
  }
  fr.insert(fr.begin() + static_cast<std::ptrdiff_t>(idx), inserted.begin(), inserted.end());
  if (fr.size() == inserted.size()) set.background_level = m;
}

/// Relocates the turning point to xi_new and re-solves every front whose
/// owning side flipped (plus `force`, if given).
void reanchor(FrontSet& set, double xi_new, const DensityMesh& mesh,
              std::size_t force = std::numeric_limits<std::size_t>::max()) {
  auto& fr = set.fronts;
  const std::size_t t_idx = turning_index(set);
  if (t_idx < fr.size()) {
    if (fr[t_idx].left_level != fr[t_idx].right_level) {
      throw SchemeFailure("wft: turning front carries a jump");
    }
    if (fr.size() == 1) set.background_level = fr[t_idx].left_level;
    fr.erase(fr.begin() + static_cast<std::ptrdiff_t>(t_idx));
    if (force != std::numeric_limits<std::size_t>::max() && force > t_idx) --force;
  }

  std::vector<Front> rebuilt;
  rebuilt.reserve(fr.size() + 8);
  for (std::size_t i = 0; i < fr.size(); ++i) {
    const Front& f = fr[i];
    Side side = f.side;
    if (f.position < xi_new) side = Side::left;
    if (f.position > xi_new) side = Side::right;
    // a turning point on an exit leaves no room on the outer side
    if (xi_new <= set.x_min) side = Side::right;
    if (xi_new >= set.x_max) side = Side::left;
    if (side == f.side && i != force) {
      rebuilt.push_back(f);
      continue;
    }
    for (auto g : solve_riemann(f.left_level, f.right_level, side, mesh)) {
      g.position = f.position;
      rebuilt.push_back(g);
    }
  }
  if (rebuilt.empty() && !fr.empty()) set.background_level = fr.front().left_level;
  fr = std::move(rebuilt);
  set.xi = xi_new;
  insert_turning(set, mesh);
}

/// Exits drain into an empty exterior: waves of the exit Riemann problem that
/// travel inwards are kept at the exit, outgoing ones are discarded.
void resolve_exits(FrontSet& set, const DensityMesh& mesh, const TurningModel& model) {
  auto& fr = set.fronts;
  if (set.xi < set.x_max) {
    const int edge = set.right_edge_level();
    if (edge != 0) {
      if (model.exit_closed(Side::right)) {
        throw SchemeFailure("wft: flow into a closed right exit is not supported");
      }
      for (auto f : solve_riemann(edge, 0, Side::right, mesh)) {
        if (!(f.speed < 0.0)) break;
        f.position = set.x_max;
        fr.push_back(f);
      }
    }
  }
  if (set.xi > set.x_min) {
    const int edge = set.left_edge_level();
    if (edge != 0) {
      if (model.exit_closed(Side::left)) {
        throw SchemeFailure("wft: flow into a closed left exit is not supported");
      }
      std::vector<Front> inward;
      for (auto f : solve_riemann(0, edge, Side::left, mesh)) {
        if (f.speed > 0.0) {
          f.position = set.x_min;
          inward.push_back(f);
        }
      }
      fr.insert(fr.begin(), inward.begin(), inward.end());
    }
  }
}

/// True when relocating the turning point to xi_new changes the side of a front.
bool flips_a_front(const FrontSet& set, double xi_new) {
  return std::any_of(set.fronts.begin(), set.fronts.end(), [&](const Front& f) {
    if (f.kind == FrontKind::turning) return false;
    return (f.position < xi_new && f.side == Side::right) ||
           (f.position > xi_new && f.side == Side::left);
  });
}

}  // namespace

double balance_turning_point(const FrontSet& set, const DensityMesh& mesh,
                             const TurningModel& model) {
  double total = 0.0;
  for_each_plateau(set, [&](double a, double b, int level) {
    total += model.diagram.cost(mesh.density(level)) * (b - a);
  });
  // phi_l + int_{x_min}^{xi} c = phi_r + int_{xi}^{x_max} c
  const double target = 0.5 * (total + model.phi_right - model.phi_left);
  if (target <= 0.0) return set.x_min;
  if (target >= total) return set.x_max;
  double acc = 0.0;
  double xi = set.x_max;
  bool found = false;
  for_each_plateau(set, [&](double a, double b, int level) {
    if (found || b <= a) return;
    const double c = model.diagram.cost(mesh.density(level));
    const double piece = c * (b - a);
    if (acc + piece >= target) {
      xi = std::clamp(a + (target - acc) / c, a, b);
      found = true;
    }
    acc += piece;
  });
  return xi;
}

FrontSet initial_front_set(const QuantizedProfile& profile, double x_min, double x_max,
                           const DensityMesh& mesh, const TurningModel& model) {
  FrontSet set;
  set.time = 0.0;
  set.x_min = x_min;
  set.x_max = x_max;
  set.background_level = profile.levels.front();
  // raw jumps first, so the balance sees the quantized profile
  for (std::size_t k = 0; k < profile.jumps.size(); ++k) {
    Front f;
    f.position = profile.jumps[k];
    f.left_level = profile.levels[k];
    f.right_level = profile.levels[k + 1];
    f.kind = FrontKind::shock;
    set.fronts.push_back(f);
  }
  const double xi = balance_turning_point(set, mesh, model);
  std::vector<Front> solved;
  for (const auto& raw : set.fronts) {
    const Side side = raw.position < xi ? Side::left : Side::right;
    for (auto f : solve_riemann(raw.left_level, raw.right_level, side, mesh)) {
      f.position = raw.position;
      solved.push_back(f);
    }
  }
  set.fronts = std::move(solved);
  set.xi = xi;
  insert_turning(set, mesh);
  resolve_exits(set, mesh, model);
  set.check_invariants(mesh);
  return set;
}

void handle_event(FrontSet& set, const Event& event, const DensityMesh& mesh,
                  const TurningModel& model) {
  auto& fr = set.fronts;
  std::size_t force = std::numeric_limits<std::size_t>::max();
  switch (event.kind) {
    case EventKind::horizon:
      return;
    case EventKind::collision: {
      if (event.index + 1 >= fr.size()) throw SchemeFailure("wft: stale collision event");
      const Front a = fr[event.index];
      const Front b = fr[event.index + 1];
      const double at = 0.5 * (a.position + b.position);
      auto merged = solve_riemann(a.left_level, b.right_level, a.side, mesh);
      for (auto& f : merged) f.position = at;
      const auto first = fr.begin() + static_cast<std::ptrdiff_t>(event.index);
      fr.erase(first, first + 2);
      fr.insert(fr.begin() + static_cast<std::ptrdiff_t>(event.index), merged.begin(),
                merged.end());
      if (fr.empty()) set.background_level = a.left_level;
      break;
    }
    case EventKind::turning_crossing: {
      if (event.index + 1 >= fr.size()) throw SchemeFailure("wft: stale turning event");
      // the crossing front is re-solved once the turning point is relocated
      const std::size_t crossing =
          fr[event.index].kind == FrontKind::turning ? event.index + 1 : event.index;
      const double at = 0.5 * (fr[event.index].position + fr[event.index + 1].position);
      fr[event.index].position = fr[event.index + 1].position = at;
      force = crossing;
      break;
    }
    case EventKind::boundary_exit: {
      if (event.index >= fr.size()) throw SchemeFailure("wft: stale exit event");
      const Front gone = fr[event.index];
      const Side exit = event.index == 0 && gone.speed < 0.0 ? Side::left : Side::right;
      if (model.exit_closed(exit)) {
        throw SchemeFailure("wft: wave reached a closed exit");
      }
      fr.erase(fr.begin() + static_cast<std::ptrdiff_t>(event.index));
      if (fr.empty()) {
        set.background_level = exit == Side::left ? gone.right_level : gone.left_level;
      }
      break;
    }
  }

  double xi_new = balance_turning_point(set, mesh, model);
  // Between refreshes the turning point only moves inside its own plateau.
  if (event.kind != EventKind::turning_crossing && flips_a_front(set, xi_new)) xi_new = set.xi;
  reanchor(set, xi_new, mesh, force);
  resolve_exits(set, mesh, model);
  set.check_invariants(mesh);
}

void refresh_turning_point(FrontSet& set, const DensityMesh& mesh, const TurningModel& model) {
  const double target = balance_turning_point(set, mesh, model);
  double xi_new = target;
  if (model.crossing_margin > 0.0) {
    // stop short of the first front that the balance point has not cleared
    const auto& fr = set.fronts;
    if (target > set.xi) {
      for (const auto& f : fr) {
        if (f.kind == FrontKind::turning || f.position < set.xi) continue;
        if (f.side == Side::left) continue;
        if (target - f.position < model.crossing_margin) {
          xi_new = std::min(xi_new, std::max(set.xi, f.position));
          break;
        }
      }
    } else if (target < set.xi) {
      for (auto it = fr.rbegin(); it != fr.rend(); ++it) {
        if (it->kind == FrontKind::turning || it->position > set.xi) continue;
        if (it->side == Side::right) continue;
        if (it->position - target < model.crossing_margin) {
          xi_new = std::max(xi_new, std::min(set.xi, it->position));
          break;
        }
      }
    }
  }
  reanchor(set, xi_new, mesh);
  resolve_exits(set, mesh, model);
  set.check_invariants(mesh);
}

double density_at(const FrontSet& set, const DensityMesh& mesh, double x) {
  const auto& fr = set.fronts;
  const auto it = std::upper_bound(fr.begin(), fr.end(), x,
                                   [](double v, const Front& f) { return v < f.position; });
  const int level = it == fr.begin() ? set.left_edge_level() : std::prev(it)->right_level;
  return mesh.density(level);
}

double total_mass(const FrontSet& set, const DensityMesh& mesh) {
  double m = 0.0;
  for_each_plateau(set, [&](double a, double b, int level) { m += mesh.density(level) * (b - a); });
  return m;
}

double total_variation(const FrontSet& set, const DensityMesh& mesh) {
  double tv = 0.0;
  for (const auto& f : set.fronts) {
    tv += std::abs(mesh.density(f.left_level) - mesh.density(f.right_level));
  }
  return tv;
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<double> sample_positions(const SpaceTimeGrid& grid) {
  const auto centers = grid.cell_centers();
  std::vector<double> xs(centers.begin(), centers.end());
  if (grid.nx() == 201 && grid.x_min() == -1.0 && grid.x_max() == 1.0) {
    for (double& x : xs) x = std::round(x * 100.0) / 100.0;
  }
  return xs;
}

namespace {

void sample_row(const FrontSet& set, const DensityMesh& mesh, double t,
                const std::vector<double>& xs, std::span<double> out) {
  const double dt = t - set.time;
  const auto& fr = set.fronts;
  std::size_t k = 0;
  int level = set.left_edge_level();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (k < fr.size() && fr[k].position + fr[k].speed * dt <= xs[i]) {
      level = fr[k].right_level;
      ++k;
    }
    out[i] = mesh.density(level);
  }
}

}  // namespace

Trajectory sample_trajectory(const std::vector<Snapshot>& history, const SpaceTimeGrid& grid,
                             const DensityMesh& mesh, std::size_t output_stride) {
  if (history.empty()) throw ValidationError("sample_trajectory: empty history");
  if (output_stride == 0) throw ValidationError("sample_trajectory: stride must be positive");
  const std::size_t n_time = grid.n_time();
  const std::size_t n_rows = (n_time + output_stride - 1) / output_stride;
  Trajectory traj;
  traj.grid = grid;
  traj.scheme_tag = Scheme::wft;
  traj.rho = Field(n_rows, grid.nx());
  const auto xs = sample_positions(grid);
  std::size_t snap = 0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const double t = static_cast<double>(r * output_stride) * grid.dt();
    while (snap + 1 < history.size() && history[snap + 1].set.time <= t) ++snap;
    sample_row(history[snap].set, mesh, t, xs, traj.rho.row(r));
    traj.times.push_back(t);
    traj.xi.push_back(history[snap].set.xi);
    traj.phi_left.push_back(0.0);
    traj.phi_right.push_back(0.0);
  }
  return traj;
}

Trajectory solve(const ScenarioConfig& config, RunStats* stats, const FundamentalDiagram& fd) {
  if (config.scheme != Scheme::wft) throw ValidationError("wft::solve: wrong scheme tag");
  config.validate();
  if (!config.bc.time_invariant()) {
    throw ValidationError("wavefront tracking supports time-invariant exit potentials only");
  }
  const DensityMesh mesh(config.mesh_levels);
  const auto& grid = config.grid;

  TurningModel model;
  model.diagram = fd;
  model.phi_left = config.bc.potential(Side::left, 0.0);
  model.phi_right = config.bc.potential(Side::right, 0.0);
  model.closed_threshold = config.bc.closed_threshold();
  model.crossing_margin = 0.5 * grid.dx();

  FrontSet set = initial_front_set(quantize_ic(config.ic, mesh), grid.x_min(), grid.x_max(),
                                   mesh, model);

  const std::size_t n_time = grid.n_time();
  const std::size_t stride = config.output_stride;
  const std::size_t n_rows = (n_time + stride - 1) / stride;
  Trajectory traj;
  traj.grid = grid;
  traj.scheme_tag = Scheme::wft;
  traj.rho = Field(n_rows, grid.nx());
  traj.times.reserve(n_rows);
  traj.xi.reserve(n_rows);
  const auto xs = sample_positions(grid);

  RunStats local;
  local.max_fronts = set.fronts.size();
  std::size_t row = 0;
  for (;;) {
    const Event ev = next_event(set, grid.t_end());
    if (row < n_rows) {
      const double t = static_cast<double>(row * stride) * grid.dt();
      if (t <= ev.time) {
        advance_to(set, t);
        refresh_turning_point(set, mesh, model);
        sample_row(set, mesh, t, xs, traj.rho.row(row));
        traj.times.push_back(t);
        traj.xi.push_back(set.xi);
        ++row;
        continue;
      }
    }
    if (ev.kind == EventKind::horizon) break;
    advance_to(set, ev.time);
    handle_event(set, ev, mesh, model);
    if (++local.events > config.event_cap) {
      throw SchemeFailure("wft: event cap of " + std::to_string(config.event_cap) + " exceeded",
                          static_cast<std::int64_t>(row));
    }
    local.max_fronts = std::max(local.max_fronts, set.fronts.size());
  }

  traj.phi_left.assign(traj.times.size(), model.phi_left);
  traj.phi_right.assign(traj.times.size(), model.phi_right);
  traj.cost_clamped = std::any_of(traj.rho.values().begin(), traj.rho.values().end(),
                                  [&](double r) { return fd.cost_clamped(r); });
  if (stats) *stats = local;
  return traj;
}

}  // namespace hughes::wft
