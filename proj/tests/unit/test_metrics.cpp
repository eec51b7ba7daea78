#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hughes/metrics.hpp"
#include "hughes/random.hpp"

using namespace hughes;
using namespace hughes::metrics;

namespace {

Field random_field(Rng& rng, std::size_t rows, std::size_t cols) {
  Field f(rows, cols);
  for (auto& v : f.values()) v = rng.uniform();
  return f;
}

}  // namespace

TEST_CASE("relative l2") {
  Rng rng(31);
  const Field t = random_field(rng, 6, 9);
  CHECK(relative_l2(t, t) == 0.0);
  Field twice = t;
  for (auto& v : twice.values()) v *= 2;
  CHECK(relative_l2(twice, t) == doctest::Approx(1.0).epsilon(1e-14));
  // perturbation proportional to a unit vector with half the norm of t
  double norm = 0.0;
  for (double v : t.values()) norm += v * v;
  norm = std::sqrt(norm);
  Field p = t;
  p(2, 3) += 0.5 * norm;
  CHECK(relative_l2(p, t) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(relative_l2(t, Field(6, 9)), DomainError);
  CHECK_THROWS(relative_l2(Field(2, 2, 1.0), Field(2, 3, 1.0)));

  for (int k = 0; k < 100; ++k) {
    const Field a = random_field(rng, 4, 5);
    const Field b = random_field(rng, 4, 5);
    const double s = rng.uniform(0.01, 100.0);
    Field as = a, bs = b;
    for (auto& v : as.values()) v *= s;
    for (auto& v : bs.values()) v *= s;
    CHECK(relative_l2(as, bs) == doctest::Approx(relative_l2(a, b)).epsilon(1e-12));
    CHECK(relative_l2(a, b) > 0.0);
  }
}

TEST_CASE("total variation") {
  CHECK(tv(std::vector<double>{0.3, 0.3, 0.3}) == 0.0);
  CHECK(tv(std::vector<double>{0.2, 0.2, 0.8, 0.8}) == doctest::Approx(0.6));
  std::vector<double> ramp;
  for (int i = 0; i <= 37; ++i) ramp.push_back(i / 37.0);
  CHECK(tv(ramp) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tv_extended(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
  Rng rng(32);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> row(20);
    for (auto& v : row) v = rng.uniform();
    std::vector<double> rev(row.rbegin(), row.rend());
    std::vector<double> shifted = row;
    for (auto& v : shifted) v += 0.37;
    CHECK(tv(rev) == doctest::Approx(tv(row)).epsilon(1e-14));
    CHECK(tv(shifted) == doctest::Approx(tv(row)).epsilon(1e-12));
  }
}

TEST_CASE("clipped tv") {
  Rng rng(33);
  std::vector<Field> truths, halved, doubled;
  double mean_tv = 0.0;
  for (int m = 0; m < 5; ++m) {
    const Field t = random_field(rng, 8, 12);
    truths.push_back(t);
    Field h = t, d = t;
    for (auto& v : h.values()) v *= 0.5;
    for (auto& v : d.values()) v *= 2.0;
    halved.push_back(h);
    doubled.push_back(d);
    for (double v : tv_per_row(t)) mean_tv += v;
  }
  mean_tv /= 40.0;
  CHECK(clipped_tv(truths, truths) == 0.0);
  CHECK(clipped_tv(halved, truths) == doctest::Approx(mean_tv / 2).epsilon(1e-12));
  CHECK(clipped_tv(doubled, truths) == 0.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<Field> preds;
    for (int m = 0; m < 5; ++m) preds.push_back(random_field(rng, 8, 12));
    const double c = clipped_tv(preds, truths);
    CHECK(c >= 0.0);
    CHECK(c <= mean_tv + 1e-12);
  }
  const auto d = delta_tv(halved[0], truths[0]);
  const auto tv_t = tv_per_row(truths[0]);
  for (std::size_t r = 0; r < d.size(); ++r) CHECK(d[r] == doctest::Approx(tv_t[r] / 2));
}

TEST_CASE("cost imbalance and e_cost") {
  const FundamentalDiagram fd;
  // uniform row with the turning point at the centre
  std::vector<double> row(100, 0.4);
  CHECK(cost_imbalance(row, 0.0, -1, 1) <= 0.02 * fd.cost(0.4));
  CHECK(cost_imbalance(row, 0.0, -1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  // pinned at the left exit: the whole right integral
  Rng rng(34);
  for (auto& v : row) v = rng.uniform(0.0, 0.99);
  double right = 0.0;
  for (double v : row) right += 0.02 / (1.0 - v);
  CHECK(cost_imbalance(row, -1.0, -1, 1) == doctest::Approx(right).epsilon(1e-12));
  CHECK(cost_imbalance(row, 1.0, -1, 1) == doctest::Approx(right).epsilon(1e-12));

  Trajectory traj;
  traj.grid = SpaceTimeGrid(-1, 1, 100, 1, 0.01);
  traj.rho = Field(2, 100, 0.4);
  traj.xi = {0.0, -1.0};
  CHECK(e_cost(traj) == doctest::Approx(2.0 / 0.6));
  // jammed cells use the clamped cost
  std::vector<double> jam(10, 1.0);
  CHECK(std::isfinite(cost_imbalance(jam, -1.0, -1, 1)));
}

TEST_CASE("delta xi and median") {
  CHECK(delta_xi(std::vector<double>{0.1, 0.1, 0.1}) == 0.0);
  CHECK(delta_xi(std::vector<double>{-0.2, 0.3}) == doctest::Approx(0.5));
  CHECK_THROWS(delta_xi(std::vector<double>{}));
  CHECK(median({3, 1, 2}) == 2);
  CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("score report") {
  Rng rng(35);
  std::vector<Field> t{random_field(rng, 3, 4), random_field(rng, 3, 4)};
  const std::vector<std::size_t> ids{7, 9};
  const auto r = score(t, t, ids);
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[1].id == 9);
  CHECK(r.mean_relative_l2 == 0.0);
  CHECK(r.clipped_tv == 0.0);
  CHECK(r.tv.size() == 2);
  CHECK(r.tv[0].size() == 3);
  CHECK(score(t, t, ids).mean_relative_l2 == r.mean_relative_l2);
}
