#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qpack/errors.hpp"
#include "qpack/optim.hpp"
#include "qpack/random.hpp"

using namespace qpack;

namespace {

using Fn = Objective::Function;

Objective bowl() {
  return Objective({{-5, 5}, {-5, 5}}, [](std::span<const double> x) {
    return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2);
  });
}

Objective rosenbrock() {
  return Objective({{-5, 5}, {-5, 5}}, [](std::span<const double> x) {
    return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  });
}

// Two wells along x: global minimum near x = -1 (value about -tilt), a local
// one near x = +1 (about +tilt).
Objective two_well(double tilt) {
  return Objective({{-2, 2}, {-2, 2}}, [tilt](std::span<const double> x) {
    return (x[0] * x[0] - 1) * (x[0] * x[0] - 1) + tilt * x[0] + x[1] * x[1];
  });
}

double two_well_global(double tilt) {
  // Fine scan of the x profile (y = 0 at the optimum).
  double best = 1e300;
  for (int i = 0; i <= 400000; ++i) {
    const double x = -2.0 + 4.0 * i / 400000;
    best = std::min(best, (x * x - 1) * (x * x - 1) + tilt * x);
  }
  return best;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("Objective clamps, counts and validates") {
  std::vector<double> seen;
  Objective obj({{0, 1}}, [&](std::span<const double> x) {
    seen.push_back(x[0]);
    return x[0];
  });
  CHECK(obj(std::vector<double>{2.0}) == 1.0);
  CHECK(obj(std::vector<double>{-3.0}) == 0.0);
  CHECK(obj.eval_count() == 2);
  CHECK(seen == std::vector<double>{1.0, 0.0});
  CHECK_THROWS_AS(Objective({{1, 1}}, [](std::span<const double>) { return 0.0; }), ValidationError);
  CHECK_THROWS_AS(Objective({}, [](std::span<const double>) { return 0.0; }), ValidationError);
  CHECK_THROWS_AS(obj(std::vector<double>{0.1, 0.2}), ValidationError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate(OptConfig{0, 1e-6, 0}), ValidationError);
  CHECK_THROWS_AS(validate(OptConfig{10, 0.0, 0}), ValidationError);
}

TEST_CASE("Nelder-Mead on the quadratic bowl") {
  Objective obj = bowl();
  const OptResult r = nelder_mead(obj, std::vector<double>{0, 0}, {300, 1e-8, 0});
  CHECK(std::hypot(r.x_best[0] - 1, r.x_best[1] - 2) < 1e-4);
  CHECK(r.evals_used <= 300);
  CHECK(r.converged);
  CHECK(r.evals_used == obj.eval_count());
}

TEST_CASE("Nelder-Mead on a constant") {
  Objective obj({{0, 1}, {0, 1}}, [](std::span<const double>) { return 3.5; });
  const OptResult r = nelder_mead(obj, std::vector<double>{0.5, 0.5}, {300, 1e-6, 0});
  CHECK(r.converged);
  CHECK(r.f_best == 3.5);
  CHECK(r.evals_used <= 3);
}

TEST_CASE("Nelder-Mead on Rosenbrock from (-1.2, 1)") {
  Objective obj = rosenbrock();
  const OptResult r = nelder_mead(obj, std::vector<double>{-1.2, 1.0}, {2000, 1e-14, 0});
  CHECK(r.f_best < 1e-6);
  CHECK(r.evals_used <= 2000);
  // Cross-check against a fine grid plus refinement around its best cell.
  double grid_best = 1e300;
  for (int i = 0; i <= 400; ++i) {
    for (int j = 0; j <= 400; ++j) {
      const double x = -2 + 4.0 * i / 400, y = -2 + 4.0 * j / 400;
      grid_best = std::min(grid_best, 100 * (y - x * x) * (y - x * x) + (1 - x) * (1 - x));
    }
  }
  CHECK(r.f_best <= grid_best + 1e-12);
}

TEST_CASE("Nelder-Mead rejects a start outside the bounds and respects the budget") {
  Objective obj = bowl();
  CHECK_THROWS_AS(nelder_mead(obj, std::vector<double>{9, 0}, {}), ValidationError);
  Objective obj2 = rosenbrock();
  for (std::uint64_t budget : {1u, 2u, 3u, 7u, 50u}) {
    const OptResult r = nelder_mead(obj2, std::vector<double>{-1.2, 1.0}, {budget, 1e-12, 0});
    CHECK(r.evals_used <= budget);
  }
}

TEST_CASE("every evaluated point lies within bounds") {
  bool inside = true;
  Objective obj({{0, 1}, {0, 1}}, [&](std::span<const double> x) {
    inside = inside && x[0] >= 0 && x[0] <= 1 && x[1] >= 0 && x[1] <= 1;
    return -x[0] - 2 * x[1];  // optimum on the corner
  });
  const OptResult nm = nelder_mead(obj, std::vector<double>{0.9, 0.95}, {300, 1e-10, 0});
  CHECK(nm.f_best == doctest::Approx(-3.0).epsilon(1e-6));
  simulated_annealing(obj, {500, 1e-8, 3});
  sampled_global(obj, 16, 2, {200, 1e-8, 3});
  random_restart(obj, nelder_mead, 3, {100, 1e-8, 3});
  CHECK(inside);
}

TEST_CASE("never worse than the start") {
  Objective obj = two_well(0.3);
  const std::vector<double> x0 = {0.9, 0.1};
  const double f0 = obj(x0);
  CHECK(nelder_mead(obj, x0, {100, 1e-8, 0}).f_best <= f0);
  CHECK(run_optimizer({OptimizerKind::NelderMead}, obj, x0, {100, 1e-8, 0}).f_best <= f0);
}

TEST_CASE("random_restart: one start equals the inner optimizer from the seeded point") {
  Objective obj = two_well(0.3);
  std::vector<double> start;
  OptConfig sub_cfg;
  LocalOptimizer recording = [&](Objective& o, std::span<const double> x0, const OptConfig& c) {
    start.assign(x0.begin(), x0.end());
    sub_cfg = c;
    return nelder_mead(o, x0, c);
  };
  const OptConfig cfg{200, 1e-9, 17};
  const OptResult r = random_restart(obj, recording, 1, cfg);
  Objective fresh = two_well(0.3);
  const OptResult direct = nelder_mead(fresh, start, sub_cfg);
  CHECK(r == direct);
}

TEST_CASE("random_restart: evals_used sums the starts") {
  Objective obj = two_well(0.3);
  std::uint64_t total = 0;
  LocalOptimizer counting = [&](Objective& o, std::span<const double> x0, const OptConfig& c) {
    OptResult r = nelder_mead(o, x0, c);
    total += r.evals_used;
    return r;
  };
  const OptResult r = random_restart(obj, counting, 5, {80, 1e-9, 4});
  CHECK(r.evals_used == total);
  CHECK(r.evals_used <= 5 * 80);
  CHECK_THROWS_AS(random_restart(obj, nelder_mead, 0, {}), ValidationError);
}

TEST_CASE("random_restart escapes a bad basin on the two-well family") {
  std::vector<double> single, restarted;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(derive_seed(seed, 99));
    const double tilt = uniform_real(rng, 0.1, 0.5);
    Objective a = two_well(tilt);
    single.push_back(nelder_mead(a, std::vector<double>{1.2, 0.5}, {300, 1e-10, seed}).f_best);
    Objective b = two_well(tilt);
    restarted.push_back(random_restart(b, nelder_mead, 8, {300, 1e-10, seed}).f_best);
  }
  CHECK(median(restarted) <= median(single));
  int better_or_equal = 0;
  for (std::size_t i = 0; i < single.size(); ++i) better_or_equal += restarted[i] <= single[i] + 1e-12;
  CHECK(better_or_equal == 50);
}

TEST_CASE("simulated annealing: bowl, determinism, egg carton") {
  Objective a = bowl();
  const OptResult r = simulated_annealing(a, {5000, 1e-10, 11});
  CHECK(r.f_best < 1e-2);
  CHECK(std::hypot(r.x_best[0] - 1, r.x_best[1] - 2) < 1e-2);
  CHECK(r.evals_used <= 5000);
  Objective b = bowl();
  CHECK(simulated_annealing(b, {5000, 1e-10, 11}) == r);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Objective egg({{0, 2 * std::numbers::pi}, {0, 2 * std::numbers::pi}},
                  [](std::span<const double> x) { return std::sin(x[0]) * std::sin(x[1]); });
    CHECK(simulated_annealing(egg, {3000, 1e-10, seed}).f_best <= -0.99);
  }
}

TEST_CASE("sampled_global: single sample equals Nelder-Mead from that sample") {
  std::vector<double> first;
  Objective probe({{-2, 2}, {-2, 2}}, [&](std::span<const double> x) {
    if (first.empty()) first.assign(x.begin(), x.end());
    return (x[0] - 0.3) * (x[0] - 0.3) + 2 * (x[1] + 0.4) * (x[1] + 0.4);
  });
  const OptResult g = sampled_global(probe, 1, 1, {400, 1e-10, 8});
  Objective again({{-2, 2}, {-2, 2}}, [](std::span<const double> x) {
    return (x[0] - 0.3) * (x[0] - 0.3) + 2 * (x[1] + 0.4) * (x[1] + 0.4);
  });
  const OptResult nm = nelder_mead(again, first, {399, 1e-10, 8});
  CHECK(g.x_best == nm.x_best);
  CHECK(g.f_best == nm.f_best);
  CHECK(g.evals_used == nm.evals_used + 1);
}

TEST_CASE("sampled_global: finds the global well and respects its budget") {
  int found = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Objective obj = two_well(0.3);
    const OptResult r = sampled_global(obj, 32, 2, {200, 1e-10, seed});
    CHECK(r.evals_used <= 200);
    CHECK(obj.eval_count() == r.evals_used);
    found += r.f_best < two_well_global(0.3) + 1e-4;
  }
  CHECK(found >= 95);
  Objective obj = two_well(0.3);
  CHECK_THROWS_AS(sampled_global(obj, 4, 5, {}), ValidationError);
}

TEST_CASE("every optimizer is deterministic per seed") {
  for (OptimizerKind k : {OptimizerKind::NelderMead, OptimizerKind::RestartNM, OptimizerKind::Annealing,
                          OptimizerKind::SampledGlobal}) {
    Objective a = two_well(0.2), b = two_well(0.2);
    const OptimizerSpec spec{k, 3, 16, 2};
    const std::vector<double> x0 = {0.5, 0.5};
    CHECK(run_optimizer(spec, a, x0, {150, 1e-8, 21}) == run_optimizer(spec, b, x0, {150, 1e-8, 21}));
  }
}

TEST_CASE("relative_accuracy") {
  CHECK(relative_accuracy(10, 9) == doctest::Approx(0.1));
  CHECK(relative_accuracy(10, 10) == 0.0);
  CHECK(relative_accuracy(10, 11) == doctest::Approx(-0.1));
  CHECK_THROWS_AS(relative_accuracy(0, 1), ValidationError);
}

TEST_CASE("optimizer names") {
  for (OptimizerKind k : {OptimizerKind::NelderMead, OptimizerKind::RestartNM, OptimizerKind::Annealing,
                          OptimizerKind::SampledGlobal}) {
    CHECK(optimizer_from_name(optimizer_name(k)) == k);
  }
  CHECK_THROWS_AS(optimizer_from_name("cobyla"), ValidationError);
}
