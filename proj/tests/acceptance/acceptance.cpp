// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 when any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hughes/binary_format.hpp"
#include "hughes/dataset.hpp"
#include "hughes/datagen.hpp"
#include "hughes/godunov.hpp"
#include "hughes/metrics.hpp"
#include "hughes/wft.hpp"

using namespace hughes;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void run(const std::string& name, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(name, false, std::string("threw: ") + e.what());
  }
}

ScenarioConfig scenario(Scheme scheme, const ICDescriptor& ic, const BoundarySchedule& bc,
                        double t_end, std::uint64_t seed = 1) {
  ScenarioConfig sc;
  sc.scheme = scheme;
  sc.grid = scheme == Scheme::godunov ? default_godunov_grid(t_end) : default_wft_grid(t_end);
  sc.ic = ic;
  sc.bc = bc;
  sc.seed = seed;
  return sc;
}

// First stored position where the row crosses `level` going left to right,
// interpolated between sample points.
double crossing(std::span<const double> row, const std::vector<double>& xs, double level,
                double from = -1.0) {
  for (std::size_t i = 0; i + 1 < row.size(); ++i) {
    if (xs[i] < from) continue;
    const double a = row[i] - level;
    const double b = row[i + 1] - level;
    if (a < 0 && b >= 0) return xs[i] + (xs[i + 1] - xs[i]) * (-a) / (b - a);
  }
  return NAN;
}

std::vector<double> positions(const Trajectory& t) {
  if (t.scheme_tag == Scheme::wft) return wft::sample_positions(t.grid);
  auto c = t.grid.cell_centers();
  return {c.begin(), c.end()};
}

std::vector<datagen::SampleRecord> easy_records;

void conservation() {
  datagen::GenerationConfig c;
  c.problem = datagen::Problem::II;
  c.difficulty = datagen::Difficulty::all;
  c.master_seed = 202;
  double worst = 0.0, slowest = 0.0;
  const std::size_t n = 20;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rec = datagen::generate_sample(c, i);
    slowest = std::max(slowest, elapsed_ms(t0));
    const auto& traj = rec.trajectory;
    const double m0 = mass(traj.rho.row(0), traj.grid.dx());
    for (std::size_t r = 1; r < traj.n_rows(); ++r) {
      worst = std::max(worst, std::abs(mass(traj.rho.row(r), traj.grid.dx()) - m0));
    }
  }
  report("conservation", worst <= 1e-9 && slowest < 10000.0,
         fmt("problem II, %.0f samples: max |mass drift| %.2e (tol 1e-9), slowest %.0f ms (limit 10000)",
             n, worst, slowest));
}

void mass_monotone() {
  datagen::GenerationConfig c;
  c.master_seed = 101;
  double worst = -INFINITY;
  for (std::size_t i = 0; i < 100; ++i) {
    easy_records.push_back(datagen::generate_sample(c, i));
    const auto& traj = easy_records.back().trajectory;
    for (std::size_t r = 1; r < traj.n_rows(); ++r) {
      worst = std::max(worst, mass(traj.rho.row(r), traj.grid.dx()) -
                                  mass(traj.rho.row(r - 1), traj.grid.dx()));
    }
  }
  report("mass-monotone", worst <= 1e-12,
         fmt("problem I, 100 easy samples: max per-step mass increase %.2e (tol 1e-12)", worst));
}

void max_principle() {
  struct Family {
    Scheme scheme;
    datagen::Problem problem;
  };
  const Family families[] = {{Scheme::godunov, datagen::Problem::I},
                             {Scheme::godunov, datagen::Problem::II},
                             {Scheme::godunov, datagen::Problem::III_open},
                             {Scheme::godunov, datagen::Problem::III_switching},
                             {Scheme::wft, datagen::Problem::I}};
  double lo = INFINITY, hi = -INFINITY;
  std::size_t n = 0;
  for (const auto& f : families) {
    datagen::GenerationConfig c;
    c.scheme = f.scheme;
    c.problem = f.problem;
    c.difficulty = datagen::Difficulty::all;
    c.master_seed = 303 + n;
    for (std::size_t i = 0; i < 200; ++i, ++n) {
      const auto rec = datagen::generate_sample(c, i);
      for (double v : rec.trajectory.rho.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  report("max-principle", lo >= -1e-12 && hi <= 1 + 1e-12,
         fmt("%.0f mixed samples: densities in [%.3g, %.17g] (tol 1e-12)", n, lo, hi));
}

void riemann() {
  const auto closed_left = BoundarySchedule::constant(10000, 0);
  std::string detail;
  bool ok = true;
  for (Scheme s : {Scheme::godunov, Scheme::wft}) {
    const auto sc = scenario(s, ICDescriptor::piecewise_constant({0.2, 0.8}, {0.0}), closed_left, 1.0);
    const auto traj = datagen::solve(sc);
    const auto xs = positions(traj);
    const double dx = xs[1] - xs[0];
    const double x1 = crossing(traj.rho.row(traj.n_rows() - 1), xs, 0.5, -0.5);
    const bool pass = std::abs(x1) <= 2 * dx;
    ok = ok && pass;
    detail += (s == Scheme::godunov ? "godunov" : "wft") +
              fmt(" stationary shift %.4f (tol %.4f); ", x1, 2 * dx);
  }
  // moving shock at dx = 1/500
  ScenarioConfig sc = scenario(Scheme::godunov, ICDescriptor::piecewise_constant({0.1, 0.3}, {-0.5}),
                               closed_left, 1.0);
  sc.grid = SpaceTimeGrid(-1, 1, 1000, 1.0, 1.0 / 600);
  auto traj = godunov::solve(sc);
  auto xs = positions(traj);
  const double tg = traj.times.back();
  const double vg = (crossing(traj.rho.row(traj.n_rows() - 1), xs, 0.2, -0.6) + 0.5) / tg;
  sc.scheme = Scheme::wft;
  sc.grid = default_wft_grid(1.0);
  traj = wft::solve(sc);
  xs = positions(traj);
  const double tw = traj.times.back();
  const double vw = (crossing(traj.rho.row(traj.n_rows() - 1), xs, 0.2, -0.6) + 0.5) / tw;
  const bool moving = std::abs(vg - 0.6) <= 0.03 && std::abs(vw - 0.6) <= 0.03;
  detail += fmt("moving shock speed godunov %.4f, wft %.4f (0.6 +- 5%%)", vg, vw);
  report("riemann-oracle", ok && moving, detail);
}

void turning_point() {
  const FundamentalDiagram fd;
  // worst |xi| / dx for piecewise data and for the smooth pulse
  double sym_piecewise = 0.0, sym_smooth = 0.0;
  const ICDescriptor symmetric[] = {ICDescriptor::constant(0.4),
                                    ICDescriptor::piecewise_constant({0.3, 0.7, 0.3}, {-0.4, 0.4}),
                                    ICDescriptor::piecewise_constant({0.8, 0.2, 0.8}, {-0.5, 0.5}),
                                    ICDescriptor::gaussian(0.0, 0.3)};
  for (Scheme s : {Scheme::godunov, Scheme::wft}) {
    for (const auto& ic : symmetric) {
      if (s == Scheme::wft && ic.kind == ICDescriptor::Kind::gaussian) continue;
      const auto traj = datagen::solve(scenario(s, ic, BoundarySchedule(), 3.0));
      const auto xs = positions(traj);
      const double dx = xs[1] - xs[0];
      double& worst = ic.kind == ICDescriptor::Kind::gaussian ? sym_smooth : sym_piecewise;
      for (double xi : traj.xi) worst = std::max(worst, std::abs(xi) / dx);
    }
  }
  // pinned by a huge potential
  bool pinned = true;
  for (Side side : {Side::left, Side::right}) {
    const auto bc = side == Side::left ? BoundarySchedule::constant(10000, 0)
                                       : BoundarySchedule::constant(0, 10000);
    const auto sc = scenario(Scheme::godunov, ICDescriptor::piecewise_constant({0.3, 0.6}, {0.1}), bc, 3.0);
    const auto traj = godunov::solve(sc);
    // the high-potential exit is the far end of the walk, so xi sits at the other boundary cell
    const double target = side == Side::left ? sc.grid.center(0) : sc.grid.center(sc.grid.nx() - 1);
    for (double xi : traj.xi) pinned = pinned && xi == target;
  }
  // balance residual on every stored step
  datagen::GenerationConfig c;
  c.difficulty = datagen::Difficulty::all;
  c.master_seed = 404;
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < 10; ++i) {
    const auto rec = datagen::generate_sample(c, i);
    const auto& traj = rec.trajectory;
    for (std::size_t r = 0; r < traj.n_rows(); ++r) {
      const auto row = traj.rho.row(r);
      const double peak = *std::max_element(row.begin(), row.end());
      const auto tp = godunov::find_turning_point(row, traj.phi_left[r], traj.phi_right[r], traj.grid);
      worst_ratio = std::max(worst_ratio, std::abs(tp.residual) / (traj.grid.dx() * fd.cost(peak)));
    }
  }
  report("turning-point",
         sym_piecewise <= 1.0 && sym_smooth <= 1.0 && pinned && worst_ratio <= 1.0 + 1e-9,
         fmt("symmetric max |xi|/dx: piecewise %.2f, gaussian %.2f (tol 1); ", sym_piecewise,
             sym_smooth) +
             (pinned ? "pinned to the boundary cell; " : "NOT pinned; ") +
             fmt("residual / (dx c(max)) %.3f (tol 1)", worst_ratio));
}

void cross_scheme(const fs::path& work) {
  datagen::GenerationConfig g;
  g.samples = 50;
  g.master_seed = 505;
  const auto a = work / "godunov";
  const auto b = work / "wft";
  dataset::generate(g, a);
  auto w = g;
  w.scheme = Scheme::wft;
  dataset::generate(w, b, {.ic_from = a});
  const auto j = dataset::compare_directories(a, b, work / "compare", {.timing_solves = 0});
  const double med = j["median_relative_l2"].get<double>();
  report("cross-scheme", med <= 0.15,
         fmt("50 shared easy ICs on 50x200: median relative L2 %.4f (tol 0.15), mean %.4f", med,
             j["mean_relative_l2"].get<double>()));
}

void e_cost_screen() {
  std::size_t below = 0;
  for (const auto& r : easy_records) below += r.e_cost < 0.1 ? 1 : 0;
  const double frac = static_cast<double>(below) / static_cast<double>(easy_records.size());
  report("e-cost-screen", frac >= 0.95,
         fmt("%.0f of %.0f godunov easy samples below 0.1 (%.1f%%, need 95%%)", below,
             easy_records.size(), 100 * frac));
}

void tvd() {
  Rng rng(606);
  double worst = -INFINITY;
  const int n = 30;
  for (int k = 0; k < n; ++k) {
    const auto ic = datagen::gen_piecewise_ic(static_cast<std::size_t>(rng.uniform_int(1, 10)), rng);
    const auto traj = godunov::solve(scenario(Scheme::godunov, ic, BoundarySchedule::constant(10000, 0), 3.0, k));
    for (std::size_t r = 1; r < traj.n_rows(); ++r) {
      worst = std::max(worst, metrics::tv_extended(traj.rho.row(r)) - metrics::tv_extended(traj.rho.row(r - 1)));
    }
  }
  report("tvd", worst <= 1e-12,
         fmt("closed left exit, %.0f samples: max per-step TV increase %.2e (tol 1e-12)", n, worst));
}

void performance() {
  datagen::GenerationConfig c;
  c.difficulty = datagen::Difficulty::all;
  c.master_seed = 707;
  const std::size_t n = 50;
  std::vector<datagen::SampleRecord> drawn;
  for (std::size_t i = 0; i < n; ++i) drawn.push_back(datagen::generate_sample(c, i));

  datagen::GenerationConfig g = c;
  g.dx = 0.01;
  g.dt = 0.01;
  datagen::GenerationConfig w = c;
  w.scheme = Scheme::wft;
  w.mesh_levels = 100;
  double tg = 0.0, tw = 0.0;
  for (const auto& d : drawn) {
    tg += datagen::solve_sample(g, d.index, d.ic, d.bc, d.solver_seed).solve_ms;
    tw += datagen::solve_sample(w, d.index, d.ic, d.bc, d.solver_seed).solve_ms;
  }
  tg /= n;
  tw /= n;
  report("performance", tg <= 740 && tw <= 950,
         fmt("%.0f problem I samples: godunov dx=dt=1/100 %.2f ms (limit 740), wft drho=1/100 %.2f ms (limit 950)",
             n, tg, tw));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HUGHES_KIT_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(const fs::path& work) {
  const auto a = work / "run_a";
  const auto b = work / "run_b";
  const std::string args = "generate --samples 20 --seed 808 --keep-full --out ";
  const int ra = run_cli(args + a.string());
  const int rb = run_cli(args + b.string());
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || io::file_checksum(e.path()) != io::file_checksum(other)) ++differ;
  }
  // the manifest must also carry e_cost for every sample
  const auto m = dataset::read_manifest(a);
  const auto j = dataset::to_json(m);
  bool e_cost_everywhere = m.samples.size() == 20;
  for (const auto& s : j["samples"]) e_cost_everywhere = e_cost_everywhere && s.contains("e_cost");
  report("determinism", ra == 0 && rb == 0 && files > 20 && differ == 0 && e_cost_everywhere,
         fmt("two CLI runs, %.0f files compared by FNV-1a: %.0f differ; exit codes %.0f %.0f", files,
             differ, ra, rb));
}

}  // namespace

int main() {
  const auto work = fs::temp_directory_path() / "hughes_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const auto t0 = std::chrono::steady_clock::now();

  run("conservation", conservation);
  run("mass-monotone", mass_monotone);
  run("max-principle", max_principle);
  run("riemann-oracle", riemann);
  run("turning-point", turning_point);
  run("cross-scheme", [&] { cross_scheme(work); });
  run("e-cost-screen", e_cost_screen);
  run("tvd", tvd);
  run("performance", performance);
  run("determinism", [&] { determinism(work); });

  fs::remove_all(work);
  std::printf("%d criteria failed (%.1f s)\n", failures, elapsed_ms(t0) / 1000.0);
  return failures == 0 ? 0 : 1;
}
