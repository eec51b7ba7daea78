#include "hughes/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hughes {

std::string to_string(Scheme scheme) {
  return scheme == Scheme::godunov ? "godunov" : "wft";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "godunov") return Scheme::godunov;
  if (name == "wft") return Scheme::wft;
  throw ValidationError("unknown scheme '" + name + "'");
}

// ---------------------------------------------------------------------------
// FundamentalDiagram

double FundamentalDiagram::velocity(double rho) const {
  if (!(rho >= 0.0 && rho <= rho_max)) throw DomainError("density outside [0, 1]");
  return v_max * (1.0 - rho / rho_max);
}

double FundamentalDiagram::flux(double rho) const {
  if (!(rho >= 0.0 && rho <= rho_max)) {
    throw DomainError("flux: density " + std::to_string(rho) + " outside [0, 1]");
  }
  return rho * (1.0 - rho);
}

double FundamentalDiagram::cost(double rho) const {
  if (!(rho >= 0.0 && rho <= rho_max)) {
    throw DomainError("cost: density " + std::to_string(rho) + " outside [0, 1]");
  }
  return 1.0 / (1.0 - std::min(rho, cost_clamp));
}

// ---------------------------------------------------------------------------
// SpaceTimeGrid

SpaceTimeGrid::SpaceTimeGrid(double x_min, double x_max, std::size_t nx, double t_end, double dt)
    : x_min_(x_min), x_max_(x_max), nx_(nx), t_end_(t_end), dt_(dt) {
  if (!(x_max > x_min)) throw ValidationError("grid: x_max must exceed x_min");
  if (nx == 0) throw ValidationError("grid: nx must be positive");
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ValidationError("grid: dt and t_end must be positive");
  n_time_ = static_cast<std::size_t>(std::llround(t_end / dt));
  if (n_time_ == 0) n_time_ = 1;
  centers_.resize(nx_);
  const double h = dx();
  for (std::size_t i = 0; i < nx_; ++i) {
    centers_[i] = x_min_ + (static_cast<double>(i) + 0.5) * h;
  }
}

SpaceTimeGrid SpaceTimeGrid::from_spacing(double x_min, double x_max, double dx, double t_end,
                                          double dt) {
  if (!(dx > 0.0)) throw ValidationError("grid: dx must be positive");
  const auto nx = static_cast<std::size_t>(std::llround((x_max - x_min) / dx));
  return {x_min, x_max, nx, t_end, dt};
}

std::size_t SpaceTimeGrid::cell_of(double x) const noexcept {
  const double s = std::floor((x - x_min_) / dx());
  if (s <= 0.0) return 0;
  const auto i = static_cast<std::size_t>(s);
  return std::min(i, nx_ - 1);
}

SpaceTimeGrid default_godunov_grid(double t_end) {
  return SpaceTimeGrid::from_spacing(-1.0, 1.0, 1.0 / 500.0, t_end, 1.0 / 600.0);
}

SpaceTimeGrid default_wft_grid(double t_end) {
  return {-1.0, 1.0, 201, t_end, 1.0 / 2000.0};
}

// ---------------------------------------------------------------------------
// Field

Field::Field(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) throw ValidationError("field: data size does not match shape");
}

// ---------------------------------------------------------------------------
// BoundarySchedule

BoundarySchedule::BoundarySchedule() : BoundarySchedule({{0.0, 0.0}}, {{0.0, 0.0}}) {}

BoundarySchedule::BoundarySchedule(std::vector<Segment> left, std::vector<Segment> right,
                                   double closed_threshold)
    : left_(std::move(left)), right_(std::move(right)), closed_threshold_(closed_threshold) {
  for (const auto* segs : {&left_, &right_}) {
    if (segs->empty()) throw ValidationError("schedule: each side needs at least one segment");
    if (segs->front().start != 0.0) throw ValidationError("schedule: first segment must start at 0");
    for (std::size_t k = 1; k < segs->size(); ++k) {
      if (!((*segs)[k].start > (*segs)[k - 1].start)) {
        throw ValidationError("schedule: switch times must be strictly increasing");
      }
    }
    for (const auto& s : *segs) {
      if (!(s.level >= 0.0)) throw ValidationError("schedule: potentials must be non-negative");
    }
  }
}

BoundarySchedule BoundarySchedule::constant(double left_level, double right_level) {
  return {{{0.0, left_level}}, {{0.0, right_level}}};
}

double BoundarySchedule::potential(Side side, double t) const {
  const auto& segs = segments(side);
  // last segment whose start <= t
  auto it = std::upper_bound(segs.begin(), segs.end(), t,
                             [](double value, const Segment& s) { return value < s.start; });
  if (it == segs.begin()) return segs.front().level;
  return std::prev(it)->level;
}

void BoundarySchedule::validate(double t_end) const {
  for (const auto* segs : {&left_, &right_}) {
    for (const auto& s : *segs) {
      if (s.start < 0.0 || s.start > t_end) {
        throw ValidationError("schedule: switch time outside [0, t_end]");
      }
      if (s.level != 0.0 && s.level != kHighPotential) {
        throw ValidationError("schedule: levels must be 0 or 10000");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// ICDescriptor

ICDescriptor ICDescriptor::constant(double value) {
  return piecewise_constant({value}, {});
}

ICDescriptor ICDescriptor::piecewise_constant(std::vector<double> plateaus,
                                              std::vector<double> jumps) {
  ICDescriptor ic;
  ic.kind = Kind::piecewise;
  ic.plateaus = std::move(plateaus);
  ic.jumps = std::move(jumps);
  return ic;
}

ICDescriptor ICDescriptor::gaussian(double mu, double sigma) {
  ICDescriptor ic;
  ic.kind = Kind::gaussian;
  ic.mu = mu;
  ic.sigma = sigma;
  return ic;
}

double ICDescriptor::evaluate(double x) const {
  if (kind == Kind::gaussian) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z);
  }
  // region r_j = [s_{j-1}, s_j): a point on a jump takes the right plateau
  const auto it = std::upper_bound(jumps.begin(), jumps.end(), x);
  return plateaus[static_cast<std::size_t>(it - jumps.begin())];
}

void ICDescriptor::validate(double x_min, double x_max) const {
  if (kind == Kind::gaussian) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian IC: sigma must be positive");
    if (!std::isfinite(mu)) throw ValidationError("gaussian IC: mu must be finite");
    return;
  }
  if (plateaus.size() != jumps.size() + 1) {
    throw ValidationError("piecewise IC: need exactly one more plateau than jumps");
  }
  for (double v : plateaus) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("piecewise IC: plateau outside [0, 1]");
  }
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    if (!(jumps[k] > x_min && jumps[k] < x_max)) {
      throw ValidationError("piecewise IC: jump outside the domain interior");
    }
    if (k > 0 && !(jumps[k] > jumps[k - 1])) {
      throw ValidationError("piecewise IC: jumps must be sorted and unique");
    }
  }
}

void ICDescriptor::validate_generated(double x_min, double x_max) const {
  validate(x_min, x_max);
  if (kind == Kind::gaussian) return;
  for (std::size_t k = 0; k < plateaus.size(); ++k) {
    if (!(plateaus[k] > 0.0 && plateaus[k] < 1.0)) {
      throw ValidationError("piecewise IC: plateau outside (0, 1)");
    }
    if (k > 0 && plateaus[k] == plateaus[k - 1]) {
      throw ValidationError("piecewise IC: consecutive plateaus must differ");
    }
  }
}

std::vector<double> project_ic(const ICDescriptor& ic, const SpaceTimeGrid& grid) {
  ic.validate(grid.x_min(), grid.x_max());
  std::vector<double> row(grid.nx());
  const auto centers = grid.cell_centers();
  std::transform(centers.begin(), centers.end(), row.begin(),
                 [&](double x) { return ic.evaluate(x); });
  return row;
}

// ---------------------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (grid.nx() == 0) throw ValidationError("scenario: grid not initialised");
  ic.validate(grid.x_min(), grid.x_max());
  if (output_stride == 0) throw ValidationError("scenario: output stride must be positive");
  if (scheme == Scheme::godunov && grid.cfl() > 1.0 + 1e-12) {
    throw ValidationError("scenario: CFL number " + std::to_string(grid.cfl()) + " exceeds 1");
  }
  if (scheme == Scheme::wft && mesh_levels < 1) {
    throw ValidationError("scenario: density mesh needs at least one level");
  }
}

double mass(std::span<const double> row, double dx) {
  return std::accumulate(row.begin(), row.end(), 0.0) * dx;
}

}  // namespace hughes
