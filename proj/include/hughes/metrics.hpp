#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hughes/core.hpp"

namespace hughes::metrics {

/// ||pred - truth||_2 / ||truth||_2 over the flattened grid (no quadrature
/// weights). Throws DomainError when truth is identically zero.
double relative_l2(std::span<const double> pred, std::span<const double> truth);
double relative_l2(const Field& pred, const Field& truth);

/// sum_j |rho_{j+1} - rho_j|
double tv(std::span<const double> row);

/// TV of the row padded with an empty cell on each side, i.e. the variation
/// of the profile seen together with the vacuum outside the exits.
double tv_extended(std::span<const double> row);

std::vector<double> tv_per_row(const Field& grid);

/// TV(truth) - TV(pred) for each time row.
std::vector<double> delta_tv(const Field& pred, const Field& truth);

/// (1 / (M T)) sum_m sum_n max(0, TV(truth^{n,m}) - TV(pred^{n,m}))
double clipped_tv(std::span<const Field> preds, std::span<const Field> truths);

/// Sum over the rows of one sample of max(0, TV(truth) - TV(pred)); the
/// building block of clipped_tv.
double clipped_tv_sum(const Field& pred, const Field& truth);

/// |int_{x_min}^{xi} c(rho) - int_{xi}^{x_max} c(rho)| for a cell-averaged
/// row, integrating the piecewise-constant clamped cost exactly.
double cost_imbalance(std::span<const double> row, double xi, double x_min, double x_max,
                      const FundamentalDiagram& fd = {});

/// Maximum cost imbalance over the stored rows of a trajectory.
double e_cost(const Trajectory& traj, const FundamentalDiagram& fd = {});

/// max(xi) - min(xi)
double delta_xi(std::span<const double> xi);

struct SampleScore {
  std::size_t id = 0;
  double relative_l2 = 0.0;
  double clipped_tv = 0.0;  // per-sample mean over rows
  double tv_truth = 0.0;    // mean over rows
  double tv_pred = 0.0;
};

struct MetricReport {
  std::vector<SampleScore> samples;
  double mean_relative_l2 = 0.0;
  double median_relative_l2 = 0.0;
  double clipped_tv = 0.0;
  std::vector<std::vector<double>> tv;        // [sample][time] of the predictions
  std::vector<std::vector<double>> delta_tv;  // [sample][time]
};

/// Scores matched prediction/truth grids. ids label the samples in the report.
MetricReport score(std::span<const Field> preds, std::span<const Field> truths,
                   std::span<const std::size_t> ids);

double median(std::vector<double> values);

}  // namespace hughes::metrics
