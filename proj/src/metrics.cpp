#include "hughes/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hughes::metrics {

double relative_l2(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    throw ValidationError("relative_l2: shapes differ (" + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double e = pred[i] - truth[i];
    num += e * e;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw DomainError("relative_l2: truth has zero norm");
  return std::sqrt(num / den);
}

double relative_l2(const Field& pred, const Field& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw ValidationError("relative_l2: shapes differ");
  }
  return relative_l2(pred.values(), truth.values());
}

double tv(std::span<const double> row) {
  double s = 0.0;
  for (std::size_t j = 1; j < row.size(); ++j) s += std::abs(row[j] - row[j - 1]);
  return s;
}

double tv_extended(std::span<const double> row) {
  if (row.empty()) return 0.0;
  return tv(row) + std::abs(row.front()) + std::abs(row.back());
}

std::vector<double> tv_per_row(const Field& grid) {
  std::vector<double> out(grid.rows());
  for (std::size_t r = 0; r < grid.rows(); ++r) out[r] = tv(grid.row(r));
  return out;
}

std::vector<double> delta_tv(const Field& pred, const Field& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) {
    throw ValidationError("delta_tv: shapes differ");
  }
  std::vector<double> out(truth.rows());
  for (std::size_t r = 0; r < truth.rows(); ++r) out[r] = tv(truth.row(r)) - tv(pred.row(r));
  return out;
}

double clipped_tv_sum(const Field& pred, const Field& truth) {
  double s = 0.0;
  for (double d : delta_tv(pred, truth)) s += std::max(0.0, d);
  return s;
}

double clipped_tv(std::span<const Field> preds, std::span<const Field> truths) {
  if (preds.size() != truths.size()) throw ValidationError("clipped_tv: sample counts differ");
  if (truths.empty()) return 0.0;
  double s = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < truths.size(); ++m) {
    s += clipped_tv_sum(preds[m], truths[m]);
    count += truths[m].rows();
  }
  return count == 0 ? 0.0 : s / static_cast<double>(count);
}

double cost_imbalance(std::span<const double> row, double xi, double x_min, double x_max,
                      const FundamentalDiagram& fd) {
  const std::size_t n = row.size();
  if (n == 0) throw ValidationError("cost_imbalance: empty row");
  const double dx = (x_max - x_min) / static_cast<double>(n);
  xi = std::clamp(xi, x_min, x_max);
  double left = 0.0;
  double right = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = x_min + static_cast<double>(j) * dx;
    const double c = fd.cost(std::clamp(row[j], 0.0, 1.0));
    const double w_left = std::clamp(xi - a, 0.0, dx);
    left += c * w_left;
    right += c * (dx - w_left);
  }
  return std::abs(left - right);
}

double e_cost(const Trajectory& traj, const FundamentalDiagram& fd) {
  double worst = 0.0;
  for (std::size_t r = 0; r < traj.n_rows(); ++r) {
    worst = std::max(worst, cost_imbalance(traj.rho.row(r), traj.xi.at(r), traj.grid.x_min(),
                                           traj.grid.x_max(), fd));
  }
  return worst;
}

double delta_xi(std::span<const double> xi) {
  if (xi.empty()) throw ValidationError("delta_xi: empty turning-point path");
  const auto [lo, hi] = std::minmax_element(xi.begin(), xi.end());
  return *hi - *lo;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

MetricReport score(std::span<const Field> preds, std::span<const Field> truths,
                   std::span<const std::size_t> ids) {
  if (preds.size() != truths.size() || ids.size() != truths.size()) {
    throw ValidationError("score: sample counts differ");
  }
  MetricReport report;
  std::vector<double> l2;
  for (std::size_t m = 0; m < truths.size(); ++m) {
    const Field& p = preds[m];
    const Field& t = truths[m];
    if (p.rows() != t.rows() || p.cols() != t.cols()) {
      throw ValidationError("score: shape mismatch for sample " + std::to_string(ids[m]));
    }
    SampleScore s;
    s.id = ids[m];
    s.relative_l2 = relative_l2(p, t);
    auto tv_p = tv_per_row(p);
    auto tv_t = tv_per_row(t);
    std::vector<double> d(t.rows());
    double clipped = 0.0;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      d[r] = tv_t[r] - tv_p[r];
      clipped += std::max(0.0, d[r]);
      s.tv_truth += tv_t[r];
      s.tv_pred += tv_p[r];
    }
    if (t.rows() > 0) {
      const auto rows = static_cast<double>(t.rows());
      s.clipped_tv = clipped / rows;
      s.tv_truth /= rows;
      s.tv_pred /= rows;
    }
    l2.push_back(s.relative_l2);
    report.samples.push_back(s);
    report.tv.push_back(std::move(tv_p));
    report.delta_tv.push_back(std::move(d));
  }
  if (!l2.empty()) {
    double sum = 0.0;
    for (double v : l2) sum += v;
    report.mean_relative_l2 = sum / static_cast<double>(l2.size());
    report.median_relative_l2 = median(l2);
  }
  report.clipped_tv = clipped_tv(preds, truths);
  return report;
}

}  // namespace hughes::metrics
