#include "qpack/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "qpack/errors.hpp"
#include "qpack/random.hpp"

namespace qpack {

namespace {

using Point = std::vector<double>;

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

// Keeps track of the best point seen so a run never reports worse than any
// evaluated point.
struct Tracker {
  Objective& obj;
  std::uint64_t budget;
  std::uint64_t used = 0;
  Point x_best;
  double f_best = std::numeric_limits<double>::infinity();

  Tracker(Objective& o, std::uint64_t b) : obj(o), budget(b) {}

  bool exhausted() const { return used >= budget; }

  double eval(const Point& x) {
    ++used;
    const double f = obj(x);
    if (f < f_best) {
      f_best = f;
      x_best = obj.clamp(x);
    }
    return f;
  }
};

Point uniform_point(const std::vector<Bound>& bounds, Rng& rng) {
  Point x(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) x[i] = uniform_real(rng, bounds[i].lo, bounds[i].hi);
  return x;
}

double gaussian(Rng& rng) {
  // Box-Muller on the portable uniform stream.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

constexpr std::array<std::uint32_t, 16> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19,
                                                   23, 29, 31, 37, 41, 43, 47, 53};

OptResult nelder_mead_tracked(Tracker& tr, std::span<const double> x0, double tol) {
  Objective& obj = tr.obj;
  const std::size_t n = obj.arity();
  std::vector<Point> simplex(n + 1, Point(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) {
    const Bound& b = obj.bounds()[i];
    double step = 0.05 * b.width();
    if (simplex[i + 1][i] + step > b.hi) step = -step;
    simplex[i + 1][i] += step;
  }
  std::vector<double> f(n + 1, std::numeric_limits<double>::infinity());
  bool converged = false;
  std::size_t filled = 0;
  for (; filled <= n && !tr.exhausted(); ++filled) {
    simplex[filled] = obj.clamp(simplex[filled]);
    f[filled] = tr.eval(simplex[filled]);
  }

  if (filled == n + 1) {
    std::vector<std::size_t> order(n + 1);
    Point centroid(n), xr(n), xe(n), xc(n);
    auto blend = [&](Point& out, const Point& from, double t, const Point& to) {
      // out = from + t * (to - from)
      for (std::size_t i = 0; i < n; ++i) out[i] = from[i] + t * (to[i] - from[i]);
      out = obj.clamp(out);
    };
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
      if (f[worst] - f[best] < tol) {
        converged = true;
        break;
      }
      if (tr.exhausted()) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[order[k]][i];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      blend(xr, centroid, -kReflect, simplex[worst]);
      const double fr = tr.eval(xr);
      if (fr < f[best]) {
        if (tr.exhausted()) {
          simplex[worst] = xr;
          f[worst] = fr;
          continue;
        }
        blend(xe, centroid, -kExpand, simplex[worst]);
        const double fe = tr.eval(xe);
        if (fe < fr) {
          simplex[worst] = xe;
          f[worst] = fe;
        } else {
          simplex[worst] = xr;
          f[worst] = fr;
        }
        continue;
      }
      if (fr < f[second]) {
        simplex[worst] = xr;
        f[worst] = fr;
        continue;
      }
      if (tr.exhausted()) break;
      // Outside contraction when the reflection beat the worst, inside otherwise.
      if (fr < f[worst]) {
        blend(xc, centroid, kContract, xr);
      } else {
        blend(xc, centroid, kContract, simplex[worst]);
      }
      const double fc = tr.eval(xc);
      if (fc < std::min(fr, f[worst])) {
        simplex[worst] = xc;
        f[worst] = fc;
        continue;
      }
      for (std::size_t k = 1; k <= n && !tr.exhausted(); ++k) {
        Point& v = simplex[order[k]];
        blend(v, simplex[best], kShrink, v);
        f[order[k]] = tr.eval(v);
      }
    }
  }
  return {tr.x_best, tr.f_best, tr.used, converged};
}

}  // namespace

Objective::Objective(std::vector<Bound> bounds, Function fn)
    : bounds_(std::move(bounds)), fn_(std::move(fn)) {
  detail::require(!bounds_.empty(), "objective needs at least one dimension");
  for (const Bound& b : bounds_) {
    detail::require(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi,
                    "objective bounds must be finite with lo < hi");
  }
  detail::require(static_cast<bool>(fn_), "objective function is empty");
}

double Objective::operator()(std::span<const double> x) {
  detail::require(x.size() == bounds_.size(), "objective: point has wrong dimension");
  const Point clamped = clamp(x);
  ++evals_;
  return fn_(clamped);
}

std::vector<double> Objective::clamp(std::span<const double> x) const {
  Point out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size() && i < bounds_.size(); ++i) {
    out[i] = std::clamp(out[i], bounds_[i].lo, bounds_[i].hi);
  }
  return out;
}

bool Objective::contains(std::span<const double> x) const {
  if (x.size() != bounds_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= bounds_[i].lo && x[i] <= bounds_[i].hi)) return false;
  }
  return true;
}

void validate(const OptConfig& cfg) {
  detail::require(cfg.max_evals >= 1, "optimizer budget max_evals must be at least 1");
  detail::require(cfg.tol > 0.0, "optimizer tolerance must be positive");
}

OptResult nelder_mead(Objective& obj, std::span<const double> x0, const OptConfig& cfg) {
  validate(cfg);
  detail::require(obj.contains(x0), "nelder_mead: starting point outside the bounds");
  Tracker tr{obj, cfg.max_evals};
  return nelder_mead_tracked(tr, x0, cfg.tol);
}

OptResult random_restart(Objective& obj, const LocalOptimizer& inner, std::uint32_t starts,
                         const OptConfig& cfg) {
  validate(cfg);
  detail::require(starts >= 1, "random_restart: need at least one start");
  Rng rng(derive_seed(cfg.seed, 0x5eedULL));
  OptResult best;
  best.f_best = std::numeric_limits<double>::infinity();
  std::uint64_t total = 0;
  bool any_converged = false;
  for (std::uint32_t s = 0; s < starts; ++s) {
    const Point x0 = uniform_point(obj.bounds(), rng);
    OptConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, s);
    OptResult r = inner(obj, x0, sub);
    total += r.evals_used;
    any_converged = any_converged || r.converged;
    if (r.f_best < best.f_best) best = std::move(r);
  }
  best.evals_used = total;
  best.converged = any_converged;
  return best;
}

OptResult simulated_annealing(Objective& obj, const OptConfig& cfg) {
  validate(cfg);
  Rng rng(derive_seed(cfg.seed, 0xa22ea1ULL));
  const std::size_t n = obj.arity();
  // A quarter of the budget goes to local descents, the rest to the chain.
  const std::uint64_t local_budget = cfg.max_evals / 4;
  Tracker tr{obj, cfg.max_evals - local_budget};

  Point x = uniform_point(obj.bounds(), rng);
  double fx = tr.eval(x);
  // Initial temperature from the spread of a few probes.
  double spread = 0.0;
  for (int i = 0; i < 8 && !tr.exhausted(); ++i) {
    const Point probe = uniform_point(obj.bounds(), rng);
    spread = std::max(spread, std::abs(tr.eval(probe) - fx));
  }
  const double t0 = spread > 0.0 ? spread : 1.0;
  const double t_final = t0 * 1e-4;
  constexpr std::size_t kMovesPerTemperature = 20;
  constexpr std::size_t kDescentEvery = 10;
  const std::uint64_t chain_moves = tr.budget > tr.used ? tr.budget - tr.used : 0;
  const std::size_t steps = std::max<std::size_t>(1, chain_moves / kMovesPerTemperature);
  const double cooling = std::pow(t_final / t0, 1.0 / static_cast<double>(steps));
  const std::uint64_t per_descent =
      std::max<std::uint64_t>(1, local_budget / (steps / kDescentEvery + 1));
  std::uint64_t local_used = 0;

  auto descend = [&]() {
    if (local_used >= local_budget || tr.x_best.empty()) return;
    Tracker local{obj, std::min(per_descent, local_budget - local_used)};
    const OptResult r = nelder_mead_tracked(local, tr.x_best, cfg.tol);
    local_used += r.evals_used;
    if (r.f_best < tr.f_best) {
      tr.f_best = r.f_best;
      tr.x_best = r.x_best;
    }
    if (r.f_best < fx) {
      x = r.x_best;
      fx = r.f_best;
    }
  };

  double temperature = t0;
  for (std::size_t step = 0; step < steps && !tr.exhausted(); ++step) {
    const double scale = std::sqrt(temperature / t0);
    for (std::size_t move = 0; move < kMovesPerTemperature && !tr.exhausted(); ++move) {
      Point y = x;
      for (std::size_t i = 0; i < n; ++i) y[i] += 0.25 * obj.bounds()[i].width() * scale * gaussian(rng);
      y = obj.clamp(y);
      const double fy = tr.eval(y);
      const double delta = fy - fx;
      if (delta <= 0.0 || uniform01(rng) < std::exp(-delta / temperature)) {
        x = std::move(y);
        fx = fy;
      }
    }
    temperature *= cooling;
    if ((step + 1) % kDescentEvery == 0) descend();
  }
  descend();
  // Final polish with whatever local budget is left.
  descend();
  return {tr.x_best, tr.f_best, tr.used + local_used, false};
}

OptResult sampled_global(Objective& obj, std::uint32_t n_samples, std::uint32_t n_refine,
                         const OptConfig& cfg) {
  validate(cfg);
  detail::require(n_samples >= 1, "sampled_global: need at least one sample");
  detail::require(n_refine <= n_samples, "sampled_global: n_refine must not exceed n_samples");
  detail::require(obj.arity() <= kPrimes.size(), "sampled_global: dimension too large for Halton");
  const std::size_t n = obj.arity();
  Rng rng(derive_seed(cfg.seed, 0x4a170ULL));
  Point shift(n);
  for (double& s : shift) s = uniform01(rng);

  std::vector<std::pair<double, Point>> samples;
  samples.reserve(n_samples);
  std::uint64_t used = 0;
  for (std::uint32_t k = 0; k < n_samples && used < cfg.max_evals; ++k) {
    Point x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double u = radical_inverse(k + 1, kPrimes[i]) + shift[i];
      u -= std::floor(u);
      const Bound& b = obj.bounds()[i];
      x[i] = b.lo + u * b.width();
    }
    const double fx = obj(x);
    ++used;
    samples.emplace_back(fx, std::move(x));
  }
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  OptResult best{samples.front().second, samples.front().first, used, false};
  const std::uint64_t remaining = cfg.max_evals > used ? cfg.max_evals - used : 0;
  const std::uint32_t refine = std::min<std::uint32_t>(n_refine, static_cast<std::uint32_t>(samples.size()));
  for (std::uint32_t r = 0; r < refine && remaining > 0; ++r) {
    const std::uint64_t share = remaining / refine + (r < remaining % refine ? 1 : 0);
    if (share == 0) continue;
    Tracker tr{obj, share};
    const OptResult local = nelder_mead_tracked(tr, samples[r].second, cfg.tol);
    best.evals_used += local.evals_used;
    if (local.f_best < best.f_best) {
      best.x_best = local.x_best;
      best.f_best = local.f_best;
      best.converged = local.converged;
    }
  }
  return best;
}

double relative_accuracy(double ref_value, double test_value) {
  detail::require(ref_value != 0.0, "relative_accuracy: reference value must be nonzero");
  return (ref_value - test_value) / ref_value;
}

std::string_view optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::NelderMead:
      return "nelder-mead";
    case OptimizerKind::RestartNM:
      return "restart-nm";
    case OptimizerKind::Annealing:
      return "annealing";
    case OptimizerKind::SampledGlobal:
      return "sampled-global";
  }
  return "?";
}

OptimizerKind optimizer_from_name(std::string_view name) {
  for (auto k : {OptimizerKind::NelderMead, OptimizerKind::RestartNM, OptimizerKind::Annealing,
                 OptimizerKind::SampledGlobal}) {
    if (optimizer_name(k) == name) return k;
  }
  throw ValidationError("unknown optimizer '" + std::string(name) + "'");
}

OptResult run_optimizer(const OptimizerSpec& spec, Objective& obj, std::span<const double> x0,
                        const OptConfig& cfg) {
  switch (spec.kind) {
    case OptimizerKind::NelderMead:
      return nelder_mead(obj, x0, cfg);
    case OptimizerKind::RestartNM:
      return random_restart(obj, nelder_mead, spec.starts, cfg);
    case OptimizerKind::Annealing:
      return simulated_annealing(obj, cfg);
    case OptimizerKind::SampledGlobal:
      return sampled_global(obj, spec.samples, spec.refine, cfg);
  }
  throw ValidationError("run_optimizer: unknown optimizer");
}

}  // namespace qpack
