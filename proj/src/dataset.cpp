#include "hughes/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "hughes/metrics.hpp"

namespace hughes::dataset {

namespace fs = std::filesystem;
using datagen::Classification;
using datagen::GenerationConfig;

// ---------------------------------------------------------------------------
// JSON conversions

json to_json(const ICDescriptor& ic) {
  json j;
  if (ic.kind == ICDescriptor::Kind::piecewise) {
    j["kind"] = "piecewise";
    j["plateaus"] = ic.plateaus;
    j["jumps"] = ic.jumps;
  } else {
    j["kind"] = "gaussian";
    j["mu"] = ic.mu;
    j["sigma"] = ic.sigma;
  }
  return j;
}

ICDescriptor ic_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "piecewise") {
    return ICDescriptor::piecewise_constant(j.at("plateaus").get<std::vector<double>>(),
                                            j.value("jumps", std::vector<double>{}));
  }
  if (kind == "gaussian") return ICDescriptor::gaussian(j.at("mu"), j.at("sigma"));
  throw FormatError("unknown IC kind '" + kind + "'");
}

namespace {

json segments_to_json(const std::vector<BoundarySchedule::Segment>& segs) {
  json a = json::array();
  for (const auto& s : segs) a.push_back({s.start, s.level});
  return a;
}

std::vector<BoundarySchedule::Segment> segments_from_json(const json& a) {
  std::vector<BoundarySchedule::Segment> out;
  for (const auto& s : a) out.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  return out;
}

json file_to_json(const FileEntry& f) {
  return {{"path", f.path},
          {"rows", f.rows},
          {"cols", f.cols},
          {"fnv1a64", io::checksum_hex(f.checksum)}};
}

FileEntry file_from_json(const json& j) {
  FileEntry f;
  f.path = j.at("path").get<std::string>();
  f.rows = j.at("rows").get<std::uint32_t>();
  f.cols = j.at("cols").get<std::uint32_t>();
  f.checksum = io::checksum_from_hex(j.at("fnv1a64").get<std::string>());
  return f;
}

}  // namespace

json to_json(const BoundarySchedule& bc) {
  return {{"left", segments_to_json(bc.segments(Side::left))},
          {"right", segments_to_json(bc.segments(Side::right))},
          {"closed_threshold", bc.closed_threshold()}};
}

BoundarySchedule bc_from_json(const json& j) {
  return BoundarySchedule(segments_from_json(j.at("left")), segments_from_json(j.at("right")),
                          j.value("closed_threshold", 9999.0));
}

json to_json(const Manifest& m) {
  const auto& c = m.config;
  json j;
  j["format_version"] = m.format_version;
  j["kind"] = m.kind;
  if (m.kind == "dataset") {
    const auto grid = c.source_grid();
    j["scheme"] = to_string(c.scheme);
    j["problem"] = to_string(c.problem);
    j["difficulty"] = to_string(c.difficulty);
    j["mode"] = to_string(c.mode);
    j["master_seed"] = c.master_seed;
    j["generation"] = {{"dx", c.dx},
                       {"dt", c.dt},
                       {"horizon", c.horizon},
                       {"mesh_levels", c.mesh_levels},
                       {"mu_range", {c.mu_lo, c.mu_hi}},
                       {"sigma_floor", c.sigma_floor},
                       {"max_attempts", c.max_attempts}};
    j["source"] = {{"x_min", grid.x_min()}, {"x_max", grid.x_max()}, {"nx", grid.nx()},
                   {"n_time", grid.n_time()}, {"dx", grid.dx()},     {"dt", grid.dt()},
                   {"t_end", grid.t_end()}};
    if (c.scheme == Scheme::wft) j["source"]["drho"] = 1.0 / c.mesh_levels;
    j["target"] = {{"t", c.out_t}, {"x", c.target_cols()}};
    j["splits"] = {{"train", m.splits.train}, {"val", m.splits.val}, {"test", m.splits.test}};
    if (m.ic_source) j["ic_source"] = *m.ic_source;
  }
  json samples = json::array();
  for (const auto& s : m.samples) {
    json e;
    e["id"] = s.id;
    if (m.kind == "dataset") {
      e["seed"] = s.seed;
      e["solver_seed"] = s.solver_seed;
      e["split"] = s.split;
      e["classification"] = to_string(s.classification);
      e["n_discontinuities"] = s.n_discontinuities;
      e["delta_xi"] = s.delta_xi;
      e["e_cost"] = s.e_cost;
      e["attempts"] = s.attempts;
      e["cost_clamped"] = s.cost_clamped;
      e["ic"] = to_json(s.ic);
      e["bc"] = to_json(s.bc);
    }
    json files = json::object();
    if (s.x) files["X"] = file_to_json(*s.x);
    if (s.y) files["Y"] = file_to_json(*s.y);
    if (s.full) files["full"] = file_to_json(*s.full);
    if (s.pred) files["pred"] = file_to_json(*s.pred);
    e["files"] = files;
    if (m.kind == "dataset") e["turning_draws"] = s.turning_draws;
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != kManifestVersion) {
    throw FormatError("unsupported manifest version " + std::to_string(m.format_version));
  }
  m.kind = j.value("kind", std::string("dataset"));
  if (m.kind != "dataset" && m.kind != "predictions") {
    throw FormatError("unknown manifest kind '" + m.kind + "'");
  }
  auto& c = m.config;
  if (m.kind == "dataset") {
    c.scheme = scheme_from_string(j.at("scheme"));
    c.problem = datagen::problem_from_string(j.at("problem"));
    c.difficulty = datagen::difficulty_from_string(j.at("difficulty"));
    c.mode = datagen::pair_mode_from_string(j.at("mode"));
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    const auto& g = j.at("generation");
    c.dx = g.at("dx");
    c.dt = g.at("dt");
    c.horizon = g.at("horizon");
    c.mesh_levels = g.at("mesh_levels");
    c.mu_lo = g.at("mu_range").at(0);
    c.mu_hi = g.at("mu_range").at(1);
    c.sigma_floor = g.at("sigma_floor");
    c.max_attempts = g.at("max_attempts");
    c.out_t = j.at("target").at("t");
    c.out_x = j.at("target").at("x");
    const auto& sp = j.at("splits");
    m.splits = {sp.at("train"), sp.at("val"), sp.at("test")};
    if (j.contains("ic_source")) m.ic_source = j.at("ic_source");
  }
  for (const auto& e : j.at("samples")) {
    SampleEntry s;
    s.id = e.at("id").get<std::size_t>();
    if (m.kind == "dataset") {
      s.seed = e.at("seed").get<std::uint64_t>();
      s.solver_seed = e.at("solver_seed").get<std::uint64_t>();
      s.split = e.at("split").get<std::string>();
      s.classification = datagen::classification_from_string(e.at("classification"));
      s.n_discontinuities = e.at("n_discontinuities");
      s.delta_xi = e.at("delta_xi");
      s.e_cost = e.at("e_cost");
      s.attempts = e.at("attempts");
      s.cost_clamped = e.at("cost_clamped");
      s.ic = ic_from_json(e.at("ic"));
      s.bc = bc_from_json(e.at("bc"));
      s.turning_draws = e.value("turning_draws", std::string());
    }
    const auto& f = e.at("files");
    if (f.contains("X")) s.x = file_from_json(f.at("X"));
    if (f.contains("Y")) s.y = file_from_json(f.at("Y"));
    if (f.contains("full")) s.full = file_from_json(f.at("full"));
    if (f.contains("pred")) s.pred = file_from_json(f.at("pred"));
    m.samples.push_back(std::move(s));
  }
  return m;
}

Manifest read_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw FormatError("missing manifest: " + path.string());
  try {
    return manifest_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& dir, const Manifest& m) {
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw FormatError("cannot write manifest in " + dir.string());
  out << to_json(m).dump(2) << '\n';
}

std::string split_of(std::size_t id, std::size_t n_samples, const SplitRatios& ratios) {
  const double n = static_cast<double>(n_samples);
  const auto n_train = static_cast<std::size_t>(std::llround(ratios.train * n));
  const auto n_val = static_cast<std::size_t>(std::llround((ratios.train + ratios.val) * n));
  if (id < n_train) return "train";
  if (id < n_val) return "val";
  return "test";
}

std::string sample_file_name(std::size_t id, const std::string& suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu_%s.bin", id, suffix.c_str());
  return std::string("samples/") + buf;
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HUGHES_KIT_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return n;
}

// ---------------------------------------------------------------------------
// generate

namespace {

/// Runs fn(i) for i in [0, n) on a small pool; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string encode_draws(const std::vector<std::uint8_t>& draws) {
  std::string s(draws.size(), '0');
  for (std::size_t i = 0; i < draws.size(); ++i) s[i] = static_cast<char>('0' + draws[i]);
  return s;
}

FileEntry write_entry(const fs::path& dir, const std::string& rel, const Field& grid,
                      io::PayloadKind kind) {
  FileEntry f;
  f.path = rel;
  f.rows = static_cast<std::uint32_t>(grid.rows());
  f.cols = static_cast<std::uint32_t>(grid.cols());
  f.checksum = io::write_grid(dir / rel, grid, kind);
  return f;
}

}  // namespace

GenerateSummary generate(const GenerationConfig& config, const fs::path& out,
                         const GenerateOptions& options) {
  config.validate();
  std::optional<Manifest> source;
  if (options.ic_from) {
    source = read_manifest(*options.ic_from);
    if (source->kind != "dataset") throw FormatError("--ic-from needs a dataset directory");
    if (config.samples > source->samples.size()) {
      throw ValidationError("--ic-from dataset holds only " +
                            std::to_string(source->samples.size()) + " samples");
    }
  }
  fs::create_directories(out / "samples");

  Manifest m;
  m.config = config;
  if (source) {
    m.ic_source = json{{"scheme", to_string(source->config.scheme)},
                       {"problem", to_string(source->config.problem)},
                       {"difficulty", to_string(source->config.difficulty)},
                       {"master_seed", source->config.master_seed}};
  }
  m.samples.resize(config.samples);
  std::vector<double> attempts(config.samples, 0.0);
  std::vector<double> solve_ms(config.samples, 0.0);

  parallel_for(config.samples, options.threads ? options.threads : worker_threads(),
               [&](std::size_t i) {
    datagen::SampleRecord rec;
    if (source) {
      const auto& src = source->samples.at(i);
      rec = datagen::solve_sample(config, i, src.ic, src.bc, src.solver_seed);
      rec.seed = src.seed;
      rec.classification = src.classification;
    } else {
      rec = datagen::generate_sample(config, i);
    }
    std::vector<double> row_times;
    const Field Y = datagen::target_grid(rec, config, &row_times);
    const auto pair = datagen::build_training_pair(Y, rec.bc, row_times, config.mode);

    SampleEntry& e = m.samples[i];
    e.id = i;
    e.seed = rec.seed;
    e.solver_seed = rec.solver_seed;
    e.split = split_of(i, config.samples, m.splits);
    e.classification = rec.classification;
    e.n_discontinuities = rec.n_discontinuities;
    e.delta_xi = rec.delta_xi;
    e.e_cost = rec.e_cost;
    e.attempts = rec.attempts;
    e.cost_clamped = rec.trajectory.cost_clamped;
    e.ic = rec.ic;
    e.bc = rec.bc;
    e.turning_draws = encode_draws(rec.trajectory.turning_draws);
    e.x = write_entry(out, sample_file_name(i, "X"), pair.X, io::PayloadKind::input);
    e.y = write_entry(out, sample_file_name(i, "Y"), pair.Y, io::PayloadKind::target);
    if (options.keep_full) {
      e.full = write_entry(out, sample_file_name(i, "full"), rec.trajectory.rho,
                           io::PayloadKind::trajectory);
    }
    attempts[i] = rec.attempts;
    solve_ms[i] = rec.solve_ms;
  });

  write_manifest(out, m);
  GenerateSummary summary;
  summary.manifest = std::move(m);
  if (config.samples > 0) {
    double a = 0.0;
    double t = 0.0;
    for (std::size_t i = 0; i < config.samples; ++i) {
      a += attempts[i];
      t += solve_ms[i];
    }
    summary.mean_attempts = a / static_cast<double>(config.samples);
    summary.mean_solve_ms = t / static_cast<double>(config.samples);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// verify

std::vector<std::string> verify(const fs::path& dir) {
  std::vector<std::string> problems;
  const Manifest m = read_manifest(dir);
  for (std::size_t k = 0; k < m.samples.size(); ++k) {
    const auto& s = m.samples[k];
    const std::string tag = "sample " + std::to_string(s.id);
    if (m.kind == "dataset" && s.id != k) problems.push_back(tag + ": ids are not dense from 0");
    for (const auto* f : {&s.x, &s.y, &s.full, &s.pred}) {
      if (!*f) continue;
      const auto path = dir / (*f)->path;
      if (!fs::exists(path)) {
        problems.push_back(tag + ": missing file " + (*f)->path);
        continue;
      }
      try {
        const auto bytes = io::read_file(path);
        const auto h = io::decode_header(bytes);
        if (h.rows != (*f)->rows || h.cols != (*f)->cols) {
          problems.push_back(tag + ": shape mismatch in " + (*f)->path);
        }
        if (io::fnv1a64(bytes) != (*f)->checksum) {
          problems.push_back(tag + ": checksum mismatch in " + (*f)->path);
        }
      } catch (const FormatError& e) {
        problems.push_back(tag + ": " + e.what());
      }
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// metrics

namespace {

struct PredictionSet {
  std::vector<std::size_t> ids;
  std::map<std::size_t, fs::path> files;
};

PredictionSet find_predictions(const fs::path& pred_dir) {
  PredictionSet set;
  if (fs::exists(pred_dir / "manifest.json")) {
    const Manifest pm = read_manifest(pred_dir);
    for (const auto& s : pm.samples) {
      const auto& f = pm.kind == "dataset" ? s.y : s.pred;
      if (!f) {
        throw FormatError("prediction entry for sample " + std::to_string(s.id) + " has no file");
      }
      set.ids.push_back(s.id);
      set.files[s.id] = pred_dir / f->path;
    }
    return set;
  }
  const auto samples = pred_dir / "samples";
  if (!fs::is_directory(samples)) throw FormatError("no predictions found in " + pred_dir.string());
  for (const auto& entry : fs::directory_iterator(samples)) {
    const auto name = entry.path().filename().string();
    if (name.size() != 15 || name.substr(6) != "_pred.bin") continue;
    const auto id = static_cast<std::size_t>(std::stoull(name.substr(0, 6)));
    set.ids.push_back(id);
    set.files[id] = entry.path();
  }
  std::sort(set.ids.begin(), set.ids.end());
  return set;
}

}  // namespace

json score_directories(const fs::path& pred_dir, const fs::path& truth_dir, const fs::path& out_dir,
                       const ScoreOptions& options) {
  const Manifest truth = read_manifest(truth_dir);
  if (truth.kind != "dataset") throw FormatError("truth directory is not a dataset");
  std::map<std::size_t, const SampleEntry*> by_id;
  for (const auto& s : truth.samples) by_id[s.id] = &s;

  const PredictionSet preds = find_predictions(pred_dir);
  std::vector<Field> p_grids;
  std::vector<Field> t_grids;
  std::vector<std::size_t> ids;
  for (auto id : preds.ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw FormatError("prediction for unknown sample " + std::to_string(id));
    if (options.split && it->second->split != *options.split) continue;
    const auto& pf = preds.files.at(id);
    if (!fs::exists(pf)) throw FormatError("missing prediction file for sample " + std::to_string(id));
    if (!it->second->y) throw FormatError("truth sample " + std::to_string(id) + " has no target");
    const auto tf = truth_dir / it->second->y->path;
    if (!fs::exists(tf)) throw FormatError("missing truth file for sample " + std::to_string(id));
    Field p = io::read_grid(pf);
    Field t = io::read_grid(tf);
    if (p.rows() != t.rows() || p.cols() != t.cols()) {
      throw FormatError("shape mismatch for sample " + std::to_string(id) + ": prediction " +
                        std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + ", truth " +
                        std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    }
    p_grids.push_back(std::move(p));
    t_grids.push_back(std::move(t));
    ids.push_back(id);
  }

  const auto report = metrics::score(p_grids, t_grids, ids);
  fs::create_directories(out_dir);
  {
    std::ofstream csv(out_dir / "metrics.csv", std::ios::trunc);
    csv << "id,relative_l2,clipped_tv,tv_truth,tv_pred,delta_xi,e_cost\n";
    char buf[256];
    for (const auto& s : report.samples) {
      const auto* e = by_id.at(s.id);
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.id,
                    s.relative_l2, s.clipped_tv, s.tv_truth, s.tv_pred, e->delta_xi, e->e_cost);
      csv << buf;
    }
  }
  {
    std::ofstream csv(out_dir / "tv.csv", std::ios::trunc);
    csv << "id,t_index,tv_pred,delta_tv\n";
    char buf[160];
    for (std::size_t k = 0; k < report.samples.size(); ++k) {
      for (std::size_t r = 0; r < report.tv[k].size(); ++r) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", report.samples[k].id, r,
                      report.tv[k][r], report.delta_tv[k][r]);
        csv << buf;
      }
    }
  }
  json j;
  j["n_samples"] = report.samples.size();
  j["mean_type"] = "arithmetic";
  j["mean_relative_l2"] = report.mean_relative_l2;
  j["median_relative_l2"] = report.median_relative_l2;
  j["clipped_tv"] = report.clipped_tv;
  std::vector<double> e_costs;
  for (auto id : ids) e_costs.push_back(by_id.at(id)->e_cost);
  j["e_cost_below_0_1"] = static_cast<std::size_t>(
      std::count_if(e_costs.begin(), e_costs.end(), [](double v) { return v < 0.1; }));
  json per = json::array();
  for (const auto& s : report.samples) {
    per.push_back({{"id", s.id}, {"relative_l2", s.relative_l2}, {"clipped_tv", s.clipped_tv},
                   {"e_cost", by_id.at(s.id)->e_cost}, {"delta_xi", by_id.at(s.id)->delta_xi}});
  }
  j["samples"] = std::move(per);
  std::ofstream(out_dir / "metrics.json", std::ios::trunc) << j.dump(2) << '\n';
  return j;
}

// ---------------------------------------------------------------------------
// compare

double target_row_time(const Manifest& m, std::size_t r) {
  const auto grid = m.config.source_grid();
  const auto ri = datagen::downsample_indices(grid.n_time(), m.config.out_t);
  return static_cast<double>(ri.at(r)) * grid.dt();
}

Field resample_common(const Field& Y, const Manifest& m, std::size_t rows, std::size_t cols,
                      double t_last) {
  const auto grid = m.config.source_grid();
  const auto ri = datagen::downsample_indices(grid.n_time(), m.config.out_t);
  const auto ci = datagen::downsample_indices(grid.nx(), m.config.target_cols());
  if (Y.rows() != ri.size() || Y.cols() != ci.size()) {
    throw FormatError("target grid does not match its manifest resolution");
  }
  std::vector<double> times(ri.size());
  for (std::size_t r = 0; r < ri.size(); ++r) times[r] = static_cast<double>(ri[r]) * grid.dt();
  std::vector<double> xs(ci.size());
  for (std::size_t c = 0; c < ci.size(); ++c) xs[c] = grid.center(ci[c]);

  auto nearest = [](const std::vector<double>& axis, double v) {
    const auto it = std::lower_bound(axis.begin(), axis.end(), v);
    if (it == axis.begin()) return std::size_t{0};
    if (it == axis.end()) return axis.size() - 1;
    const auto k = static_cast<std::size_t>(it - axis.begin());
    return (v - axis[k - 1] <= axis[k] - v) ? k - 1 : k;
  };

  Field out(rows, cols);
  const double dx = 2.0 / static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double t = rows == 1 ? 0.0 : t_last * static_cast<double>(r) / static_cast<double>(rows - 1);
    const std::size_t rr = nearest(times, t);
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = -1.0 + (static_cast<double>(c) + 0.5) * dx;
      out(r, c) = Y(rr, nearest(xs, x));
    }
  }
  return out;
}

namespace {

double mean_solve_ms(const Manifest& m, std::size_t solves) {
  if (m.samples.empty() || solves == 0) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < solves; ++k) {
    const auto& s = m.samples[k % m.samples.size()];
    ScenarioConfig sc;
    sc.scheme = m.config.scheme;
    sc.grid = m.config.source_grid();
    sc.mesh_levels = m.config.mesh_levels;
    sc.ic = s.ic;
    sc.bc = s.bc;
    sc.seed = s.solver_seed;
    const auto t0 = std::chrono::steady_clock::now();
    (void)datagen::solve(sc);
    total += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  return total / static_cast<double>(solves);
}

}  // namespace

json compare_directories(const fs::path& dir_a, const fs::path& dir_b, const fs::path& out_dir,
                         const CompareOptions& options) {
  const Manifest a = read_manifest(dir_a);
  const Manifest b = read_manifest(dir_b);
  if (a.kind != "dataset" || b.kind != "dataset") throw FormatError("compare needs two datasets");
  if (a.samples.size() != b.samples.size()) {
    throw FormatError("datasets hold different sample counts (" + std::to_string(a.samples.size()) +
                      " vs " + std::to_string(b.samples.size()) + ")");
  }
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    if (!(a.samples[k].ic == b.samples[k].ic) || !(a.samples[k].bc == b.samples[k].bc)) {
      throw FormatError("initial/boundary data differ for sample " + std::to_string(a.samples[k].id));
    }
  }
  const double t_last = std::min(target_row_time(a, a.config.out_t - 1),
                                 target_row_time(b, b.config.out_t - 1));

  std::vector<double> l2;
  fs::create_directories(out_dir);
  std::ofstream csv(out_dir / "compare.csv", std::ios::trunc);
  csv << "id,relative_l2\n";
  json per = json::array();
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    const auto& sa = a.samples[k];
    const auto& sb = b.samples[k];
    if (!sa.y || !sb.y) throw FormatError("sample " + std::to_string(sa.id) + " has no target");
    const Field ga = resample_common(io::read_grid(dir_a / sa.y->path), a, options.common_t,
                                     options.common_x, t_last);
    const Field gb = resample_common(io::read_grid(dir_b / sb.y->path), b, options.common_t,
                                     options.common_x, t_last);
    const double v = metrics::relative_l2(ga, gb);
    l2.push_back(v);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", sa.id, v);
    csv << buf;
    per.push_back({{"id", sa.id}, {"relative_l2", v}});
  }

  json j;
  j["scheme_a"] = to_string(a.config.scheme);
  j["scheme_b"] = to_string(b.config.scheme);
  j["common_grid"] = {{"t", options.common_t}, {"x", options.common_x}, {"t_last", t_last}};
  j["n_samples"] = l2.size();
  j["median_relative_l2"] = metrics::median(l2);
  double sum = 0.0;
  for (double v : l2) sum += v;
  j["mean_relative_l2"] = l2.empty() ? 0.0 : sum / static_cast<double>(l2.size());
  if (options.timing_solves > 0 && !a.samples.empty()) {
    const std::size_t n = std::max(options.timing_solves, a.samples.size());
    j["timing"] = {
        {"solves_per_scheme", n},
        {"mean_ms_a", mean_solve_ms(a, n)},
        {"mean_ms_b", mean_solve_ms(b, n)},
    };
  }
  j["samples"] = std::move(per);
  std::ofstream(out_dir / "compare.json", std::ios::trunc) << j.dump(2) << '\n';
  return j;
}

// ---------------------------------------------------------------------------
// export

void write_npy(const fs::path& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& data) {
  std::string dims;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    dims += std::to_string(shape[k]);
    if (shape.size() == 1 || k + 1 < shape.size()) dims += ",";
    if (k + 1 < shape.size()) dims += " ";
  }
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (" + dims + "), }";
  // magic (6) + version (2) + header length (2) + header, padded to 64 bytes
  const std::size_t unpadded = 10 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create " + path.string());
  out.write("\x93NUMPY\x01\x00", 8);
  const auto len = static_cast<std::uint16_t>(header.size());
  const char len_bytes[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
  out.write(len_bytes, 2);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto grid = Field(1, data.size(), data);
  const auto bytes = io::encode(grid, io::PayloadKind::trajectory);
  out.write(reinterpret_cast<const char*>(bytes.data() + io::kHeaderSize),
            static_cast<std::streamsize>(bytes.size() - io::kHeaderSize));
  if (!out) throw FormatError("write failed on " + path.string());
}

json export_numpy(const fs::path& dir, const fs::path& out, const std::string& split) {
  const Manifest m = read_manifest(dir);
  if (m.kind != "dataset") throw FormatError("export needs a dataset directory");
  if (split != "all" && split != "train" && split != "val" && split != "test") {
    throw ValidationError("unknown split '" + split + "'");
  }
  fs::create_directories(out);
  json index;
  for (const std::string name : {"train", "val", "test"}) {
    if (split != "all" && split != name) continue;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::size_t> ids;
    std::size_t rows = m.config.out_t;
    std::size_t cols = m.config.target_cols();
    for (const auto& s : m.samples) {
      if (s.split != name) continue;
      const Field x = io::read_grid(dir / s.x.value().path);
      const Field y = io::read_grid(dir / s.y.value().path);
      if (x.rows() != rows || x.cols() != cols || y.rows() != rows || y.cols() != cols) {
        throw FormatError("sample " + std::to_string(s.id) + " does not match the manifest shape");
      }
      xs.insert(xs.end(), x.values().begin(), x.values().end());
      ys.insert(ys.end(), y.values().begin(), y.values().end());
      ids.push_back(s.id);
    }
    write_npy(out / ("X_" + name + ".npy"), {ids.size(), rows, cols}, xs);
    write_npy(out / ("Y_" + name + ".npy"), {ids.size(), rows, cols}, ys);
    index[name] = ids;
  }
  json j;
  j["source"] = fs::absolute(dir).lexically_normal().string();
  j["scheme"] = to_string(m.config.scheme);
  j["problem"] = to_string(m.config.problem);
  j["mode"] = to_string(m.config.mode);
  j["t_range"] = {0.0, target_row_time(m, m.config.out_t - 1)};
  j["x_range"] = {-1.0, 1.0};
  j["ids"] = index;
  std::ofstream(out / "index.json", std::ios::trunc) << j.dump(2) << '\n';
  return j;
}

}  // namespace hughes::dataset
