#pragma once

// Derivative-free bounded minimizers for the 2p-dimensional QAOA angle
// landscape. Every optimizer minimizes; callers negate maximization targets.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qpack {

struct Bound {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
};

/// A bounded scalar function with an evaluation counter. Points handed to
/// the function are always clamped into the box first.
class Objective {
 public:
  using Function = std::function<double(std::span<const double>)>;

  Objective(std::vector<Bound> bounds, Function fn);

  std::size_t arity() const { return bounds_.size(); }
  const std::vector<Bound>& bounds() const { return bounds_; }
  std::uint64_t eval_count() const { return evals_; }

  /// Clamps x into the box, evaluates, counts.
  double operator()(std::span<const double> x);

  std::vector<double> clamp(std::span<const double> x) const;
  bool contains(std::span<const double> x) const;

 private:
  std::vector<Bound> bounds_;
  Function fn_;
  std::uint64_t evals_ = 0;
};

struct OptConfig {
  std::uint64_t max_evals = 300;
  double tol = 1e-6;  // spread of objective values across the simplex
  std::uint64_t seed = 0;

  friend bool operator==(const OptConfig&, const OptConfig&) = default;
};

void validate(const OptConfig& cfg);

struct OptResult {
  std::vector<double> x_best;
  double f_best = 0.0;
  std::uint64_t evals_used = 0;
  bool converged = false;

  friend bool operator==(const OptResult&, const OptResult&) = default;
};

/// Nelder-Mead with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// The initial simplex steps 5% of each bound range away from x0 (inward
/// when that would leave the box). Converged when max f - min f over the
/// simplex drops below cfg.tol. Throws ValidationError when x0 is outside the
/// bounds.
OptResult nelder_mead(Objective& obj, std::span<const double> x0, const OptConfig& cfg);

using LocalOptimizer =
    std::function<OptResult(Objective&, std::span<const double>, const OptConfig&)>;

/// Runs `inner` from `starts` uniform points drawn from cfg.seed; each start
/// gets the full cfg.max_evals, so evals_used <= starts * max_evals.
OptResult random_restart(Objective& obj, const LocalOptimizer& inner, std::uint32_t starts,
                         const OptConfig& cfg);

/// Annealing with a geometric temperature schedule: Gaussian moves whose
/// scale shrinks with the temperature, Metropolis acceptance, and a short
/// Nelder-Mead descent from the incumbent every few temperature steps and at
/// the end.
OptResult simulated_annealing(Objective& obj, const OptConfig& cfg);

/// Evaluates n_samples points of a randomly shifted Halton sequence, then
/// launches Nelder-Mead from the n_refine best. The refinement budget is
/// max_evals - n_samples, split evenly.
OptResult sampled_global(Objective& obj, std::uint32_t n_samples, std::uint32_t n_refine,
                         const OptConfig& cfg);

/// (ref - test) / ref for maximization values; negative means test beat ref.
double relative_accuracy(double ref_value, double test_value);

enum class OptimizerKind { NelderMead, RestartNM, Annealing, SampledGlobal };

std::string_view optimizer_name(OptimizerKind kind);  // CLI spelling
OptimizerKind optimizer_from_name(std::string_view name);

/// Tunables for optimizers selected by name.
struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::NelderMead;
  std::uint32_t starts = 4;
  std::uint32_t samples = 32;
  std::uint32_t refine = 2;

  friend bool operator==(const OptimizerSpec&, const OptimizerSpec&) = default;
};

/// Dispatch by kind. x0 is used by nelder-mead only; the others draw their
/// own starting points from cfg.seed.
OptResult run_optimizer(const OptimizerSpec& spec, Objective& obj, std::span<const double> x0,
                        const OptConfig& cfg);

}  // namespace qpack
