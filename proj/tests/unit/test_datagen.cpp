#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "hughes/datagen.hpp"
#include "hughes/metrics.hpp"

using namespace hughes;
using namespace hughes::datagen;

TEST_CASE("piecewise generator") {
  Rng rng(11);
  for (int k = 0; k < 2000; ++k) {
    const auto n = static_cast<std::size_t>(k % 11);
    const auto ic = gen_piecewise_ic(n, rng);
    REQUIRE(ic.plateaus.size() == n + 1);
    REQUIRE(ic.jumps.size() == n);
    CHECK(ic.plateaus[0] >= 0.05);
    CHECK(ic.plateaus[0] < 0.95);
    CHECK_NOTHROW(ic.validate_generated(-1.0, 1.0));
    CHECK(std::is_sorted(ic.jumps.begin(), ic.jumps.end()));
    CHECK(std::adjacent_find(ic.jumps.begin(), ic.jumps.end()) == ic.jumps.end());
  }
  Rng a(5), b(5);
  CHECK(gen_piecewise_ic(4, a) == gen_piecewise_ic(4, b));
  CHECK(gen_piecewise_ic(0, a).plateaus.size() == 1);
}

TEST_CASE("first plateau is uniform on its range") {
  Rng rng(12);
  const std::size_t n = 10000;
  std::vector<double> k1;
  for (std::size_t i = 0; i < n; ++i) k1.push_back(gen_piecewise_ic(3, rng).plateaus[0]);
  std::sort(k1.begin(), k1.end());
  CHECK(k1.front() >= 0.05);
  CHECK(k1.back() <= 0.95);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cdf = (k1[i] - 0.05) / 0.9;
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  CHECK(d < 0.05);
}

TEST_CASE("gaussian generator") {
  Rng rng(13);
  for (int k = 0; k < 1000; ++k) {
    const auto ic = gen_gaussian_ic(rng);
    CHECK(ic.mu >= 0.0);
    CHECK(ic.mu < 1.0);
    CHECK(ic.sigma >= 0.05);
    CHECK(ic.sigma < 0.5);
    CHECK(ic.evaluate(ic.mu) == 1.0);
  }
  Rng a(3), b(3);
  CHECK(gen_gaussian_ic(a) == gen_gaussian_ic(b));
  // narrowest pulse on a fine grid: rises to ~1 and falls back to ~0
  const auto grid = SpaceTimeGrid(-1, 1, 4000, 1, 1e-4);
  const auto row = project_ic(ICDescriptor::gaussian(0.0, 0.05), grid);
  CHECK(metrics::tv(row) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("boundary schedules") {
  Rng rng(14);
  CHECK(gen_bc_schedule(Problem::I, rng) == BoundarySchedule::constant(0, 0));
  CHECK(gen_bc_schedule(Problem::III_open, rng) == BoundarySchedule::constant(0, 0));
  CHECK(gen_bc_schedule(Problem::II, rng) == BoundarySchedule::constant(10000, 10000));
  const double windows[5][2] = {{0.08, 0.5}, {0.8, 1.0}, {1.4, 2.2}, {2.5, 2.75}, {2.8, 3.33}};
  for (int k = 0; k < 500; ++k) {
    const auto bc = gen_bc_schedule(Problem::III_switching, rng);
    const auto& left = bc.segments(Side::left);
    REQUIRE(left.size() == 6);
    CHECK(left[0].start == 0.0);
    for (std::size_t j = 0; j < 6; ++j) CHECK(left[j].level == (j % 2 == 0 ? 10000.0 : 0.0));
    for (std::size_t j = 1; j < 6; ++j) {
      CHECK(left[j].start >= windows[j - 1][0]);
      CHECK(left[j].start < windows[j - 1][1]);
    }
    CHECK(bc.segments(Side::right).size() == 1);
    CHECK(bc.potential(Side::right, 4.0) == 0.0);
    CHECK_NOTHROW(bc.validate(5.0));
  }
  CHECK(default_horizon(Problem::III_switching) == 5.0);
  CHECK(default_horizon(Problem::I) == 3.0);
}

TEST_CASE("classification thresholds") {
  CHECK(classify(0.1, 2) == Classification::easy);
  CHECK(classify(0.5, 7) == Classification::complex);
  CHECK(classify(0.3, 2) == Classification::rejected);
  CHECK(classify(0.3, 7) == Classification::rejected);
  CHECK(classify(0.1, 4) == Classification::rejected);
  CHECK(classify(0.5, 11) == Classification::rejected);
  CHECK(classify(0.5, 1) == Classification::complex);
  CHECK(classify(0.0, 0) == Classification::easy);
}

TEST_CASE("downsample index map") {
  const auto check_map = [](std::size_t src, std::size_t dst) {
    const auto idx = downsample_indices(src, dst);
    REQUIRE(idx.size() == dst);
    CHECK(idx.front() == 0);
    CHECK(idx.back() == src - 1);
    for (std::size_t i = 0; i < dst; ++i) {
      // nearest integer to i (src - 1) / (dst - 1), computed in integers
      const std::size_t num = i * (src - 1);
      const std::size_t den = dst - 1;
      const std::size_t expected = (2 * num + den) / (2 * den);
      CHECK(idx[i] == expected);
      if (i > 0) CHECK(idx[i] > idx[i - 1]);
    }
  };
  check_map(1800, 50);
  check_map(1000, 200);
  check_map(201, 201);
  check_map(300, 201);
  check_map(3000, 128);
  CHECK_THROWS_AS(downsample_indices(10, 11), ValidationError);

  Field g(7, 5);
  for (std::size_t r = 0; r < 7; ++r)
    for (std::size_t c = 0; c < 5; ++c) g(r, c) = 10.0 * r + c;
  CHECK(downsample(g, 7, 5) == g);
  const auto d = downsample(g, 3, 3);
  CHECK(d(0, 0) == 0.0);
  CHECK(d(2, 2) == 64.0);
  CHECK(d(1, 1) == 32.0);
  CHECK(downsample(Field(40, 30, 0.4), 4, 3) == Field(4, 3, 0.4));
}

TEST_CASE("training pairs") {
  Field Y(5, 4);
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 4; ++c) Y(r, c) = 0.1 * (r + 1) + 0.01 * c;
  const std::vector<double> times{0.0, 0.5, 1.0, 1.5, 2.0};
  const auto ivp = build_training_pair(Y, BoundarySchedule::constant(0, 0), times, PairMode::ivp);
  CHECK(ivp.Y == Y);
  for (std::size_t c = 0; c < 4; ++c) CHECK(ivp.X(0, c) == Y(0, c));
  double rest = 0.0;
  for (std::size_t r = 1; r < 5; ++r)
    for (std::size_t c = 0; c < 4; ++c) rest += std::abs(ivp.X(r, c));
  CHECK(rest == 0.0);

  const BoundarySchedule sw({{0.0, 10000}, {0.7, 0}, {1.2, 10000}}, {{0.0, 0}});
  const auto mi = build_training_pair(Y, sw, times, PairMode::mibvp);
  const double expected_left[] = {1, 1, 0, 1, 1};
  for (std::size_t r = 0; r < 5; ++r) {
    CHECK(mi.X(r, 0) == expected_left[r]);
    CHECK(mi.X(r, 3) == 0.0);
    if (r > 0) {
      CHECK(mi.X(r, 1) == 0.0);
      CHECK(mi.X(r, 2) == 0.0);
    }
  }
  CHECK(mi.X(0, 1) == Y(0, 1));
  CHECK_THROWS_AS(build_training_pair(Y, sw, {0.0}, PairMode::ivp), ValidationError);
}

TEST_CASE("generation configuration") {
  GenerationConfig c;
  c.samples = 1;
  CHECK_NOTHROW(c.validate());
  CHECK(c.source_grid().nx() == 1000);
  CHECK(c.target_cols() == 200);
  c.scheme = Scheme::wft;
  CHECK(c.target_cols() == 201);
  c.problem = Problem::II;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.scheme = Scheme::godunov;
  c.dx = 0.001;
  c.dt = 0.01;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("generated samples") {
  GenerationConfig c;
  c.samples = 4;
  c.master_seed = 21;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto a = generate_sample(c, i);
    const auto b = generate_sample(c, i);
    CHECK(a.ic == b.ic);
    CHECK(a.trajectory.rho == b.trajectory.rho);
    CHECK(a.classification == Classification::easy);
    CHECK(a.n_discontinuities <= 3);
    CHECK(a.delta_xi < 0.3);
    std::vector<double> times;
    const auto Y = target_grid(a, c, &times);
    CHECK(Y.rows() == 50);
    CHECK(Y.cols() == 200);
    CHECK(times.front() == 0.0);
    CHECK(Y == downsample(a.trajectory.rho, 50, 200));
  }
  CHECK_FALSE(generate_sample(c, 0).ic == generate_sample(c, 1).ic);
}
