// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace sarcr {

void Bounds::validate() const {
  if (lower.size() != upper.size() || lower.empty()) {
    fail(ErrorClass::kInvalidArgument, "InvalidBounds", "lower and upper must be nonempty and equally long");
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      fail(ErrorClass::kInvalidArgument, "InvalidBounds", "bad bound at index " + std::to_string(i));
    }
  }
}

bool Bounds::contains(const std::vector<double>& x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

std::vector<double> Bounds::clip(std::vector<double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  return x;
}

void DEConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorClass::kConfig, "InvalidOptimizerConfig", m); };
  if (populationSize < 4) bad("populationSize must be >= 4");
  if (maxIterations < 0) bad("maxIterations must be >= 0");
  if (!(recombinationProbability >= 0 && recombinationProbability <= 1)) bad("recombination must be in [0,1]");
  if (!(mutationProbability >= 0 && mutationProbability <= 1)) bad("mutation probability must be in [0,1]");
  if (tournamentSize < 1 || tournamentSize > populationSize - 1) bad("tournamentSize out of range");
  if (crowding < 0) bad("crowding must be >= 0");
  if (jobs < 1) bad("jobs must be >= 1");
}

void PSOConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorClass::kConfig, "InvalidOptimizerConfig", m); };
  if (particleCount < 2) bad("particleCount must be >= 2");
  if (maxIterations < 0) bad("maxIterations must be >= 0");
  if (!(velocityClamp > 0.0)) bad("velocityClamp must be > 0");
  if (jobs < 1) bad("jobs must be >= 1");
}

std::string OptimizeTrace::toCsv() const {
  std::ostringstream o;
  o << std::setprecision(17) << "iteration,bestLoss\n";
  for (std::size_t i = 0; i < bestLossPerIteration.size(); ++i) o << i << "," << bestLossPerIteration[i] << "\n";
  return o.str();
}

namespace {

using Vec = std::vector<double>;

// Evaluates a batch of candidates, optionally on several threads. Results
// land in fixed slots so the outcome does not depend on scheduling.
class Evaluator {
 public:
  Evaluator(const Objective& f, const Bounds& b, int jobs, OptimizeTrace& trace)
      : f_(f), bounds_(b), jobs_(jobs), trace_(trace) {}

  std::vector<double> operator()(const std::vector<const Vec*>& xs) {
    std::vector<double> out(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());
    auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t i = begin; i < xs.size(); i += step) {
        try {
          if (!bounds_.contains(*xs[i])) {
            fail(ErrorClass::kNumerical, "BoundsViolation", "candidate outside the search box");
          }
          out[i] = f_(*xs[i]);
          if (std::isnan(out[i])) fail(ErrorClass::kNumerical, "NaNObjective", "objective returned NaN");
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(jobs_), xs.size());
    if (threads <= 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
      for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!errors[i]) continue;
      std::string what = "objective threw";
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      throw ObjectiveFailure(what, trace_);
    }
    trace_.evaluationCount += static_cast<int>(xs.size());
    return out;
  }

 private:
  const Objective& f_;
  const Bounds& bounds_;
  int jobs_;
  OptimizeTrace& trace_;
};

Vec randomPoint(const Bounds& b, Rng& rng) {
  Vec x(b.dim());
  for (std::size_t d = 0; d < x.size(); ++d) x[d] = b.lower[d] + (b.upper[d] - b.lower[d]) * uniform01(rng);
  return x;
}

bool degenerate(const Bounds& b) {
  for (std::size_t d = 0; d < b.dim(); ++d) {
    if (b.lower[d] != b.upper[d]) return false;
  }
  return true;
}

void record(OptimizeTrace& trace, const std::vector<Vec>& xs, const std::vector<double>& fx) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (trace.bestParams.empty() || fx[i] < trace.bestLoss) {
      trace.bestLoss = fx[i];
      trace.bestParams = xs[i];
    }
  }
  trace.bestLossPerIteration.push_back(trace.bestLoss);
}

double scaledDistance2(const Vec& a, const Vec& b, const Bounds& bounds) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double span = bounds.upper[d] - bounds.lower[d];
    if (span <= 0.0) continue;
    const double t = (a[d] - b[d]) / span;
    s += t * t;
  }
  return s;
}

}  // namespace

OptimizeTrace minimizeDE(const Objective& objective, const Bounds& bounds, const DEConfig& config) {
  bounds.validate();
  config.validate();
  const int np = config.populationSize;
  const std::size_t dim = bounds.dim();
  OptimizeTrace trace;
  Evaluator evaluate(objective, bounds, config.jobs, trace);

  std::vector<Vec> pop(np);
  for (int i = 0; i < np; ++i) {
    Rng rng(deriveSeed(config.seed, 0, static_cast<std::uint64_t>(i)));
    pop[i] = randomPoint(bounds, rng);
  }
  std::vector<const Vec*> batch;
  for (const auto& x : pop) batch.push_back(&x);
  std::vector<double> fit = evaluate(batch);
  record(trace, pop, fit);
  if (degenerate(bounds)) return trace;

  // Tournament among `pool`: best of tournamentSize random picks.
  auto tournament = [&](Rng& rng, const std::vector<int>& pool) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    int best = pool[pick(rng)];
    for (int k = 1; k < config.tournamentSize; ++k) {
      const int c = pool[pick(rng)];
      if (fit[c] < fit[best]) best = c;
    }
    return best;
  };

  for (int gen = 1; gen <= config.maxIterations; ++gen) {
    std::vector<Vec> trials;
    std::vector<int> owner;
    for (int i = 0; i < np; ++i) {
      Rng rng(deriveSeed(config.seed, static_cast<std::uint64_t>(gen), static_cast<std::uint64_t>(i)));
      if (uniform01(rng) >= config.mutationProbability) continue;
      std::vector<int> pool;
      for (int j = 0; j < np; ++j) {
        if (j != i) pool.push_back(j);
      }
      const int a = tournament(rng, pool);
      pool.erase(std::find(pool.begin(), pool.end(), a));
      const int b = tournament(rng, pool);
      pool.erase(std::find(pool.begin(), pool.end(), b));
      const int c = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];

      Vec trial = pop[i];
      const std::size_t forced = std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng);
      for (std::size_t d = 0; d < dim; ++d) {
        if (d == forced || uniform01(rng) < config.recombinationProbability) {
          trial[d] = pop[a][d] + config.mutationFactor * (pop[b][d] - pop[c][d]);
        }
      }
      trials.push_back(bounds.clip(std::move(trial)));
      owner.push_back(i);
    }
    batch.clear();
    for (const auto& x : trials) batch.push_back(&x);
    const std::vector<double> trialFit = evaluate(batch);

    for (std::size_t t = 0; t < trials.size(); ++t) {
      int target = owner[t];
      if (config.crowding > 0) {
        // Nearest neighbours of the parent, then the one closest to the trial.
        std::vector<int> order(np);
        std::iota(order.begin(), order.end(), 0);
        const int k = std::min(config.crowding, np);
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int p, int q) {
          const double dp = scaledDistance2(pop[p], pop[owner[t]], bounds);
          const double dq = scaledDistance2(pop[q], pop[owner[t]], bounds);
          return dp != dq ? dp < dq : p < q;
        });
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          const double dd = scaledDistance2(pop[order[j]], trials[t], bounds);
          if (dd < best) {
            best = dd;
            target = order[j];
          }
        }
      }
      if (trialFit[t] <= fit[target]) {
        pop[target] = trials[t];
        fit[target] = trialFit[t];
      }
    }
    record(trace, trials, trialFit);
  }
  return trace;
}

OptimizeTrace minimizePSO(const Objective& objective, const Bounds& bounds, const PSOConfig& config) {
  bounds.validate();
  config.validate();
  const int n = config.particleCount;
  const std::size_t dim = bounds.dim();
  OptimizeTrace trace;
  Evaluator evaluate(objective, bounds, config.jobs, trace);

  Vec vmax(dim);
  for (std::size_t d = 0; d < dim; ++d) vmax[d] = config.velocityClamp * (bounds.upper[d] - bounds.lower[d]);

  std::vector<Vec> x(n), v(n, Vec(dim));
  for (int i = 0; i < n; ++i) {
    Rng rng(deriveSeed(config.seed, 0, static_cast<std::uint64_t>(i)));
    x[i] = randomPoint(bounds, rng);
    for (std::size_t d = 0; d < dim; ++d) v[i][d] = vmax[d] * (2.0 * uniform01(rng) - 1.0);
  }
  std::vector<const Vec*> batch;
  for (const auto& p : x) batch.push_back(&p);
  std::vector<double> fx = evaluate(batch);
  std::vector<Vec> pbest = x;
  std::vector<double> pbestFit = fx;
  record(trace, x, fx);
  if (degenerate(bounds)) return trace;

  for (int it = 1; it <= config.maxIterations; ++it) {
    const Vec gbest = trace.bestParams;
    for (int i = 0; i < n; ++i) {
      Rng rng(deriveSeed(config.seed, static_cast<std::uint64_t>(it), static_cast<std::uint64_t>(i)));
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = uniform01(rng), r2 = uniform01(rng);
        double vel = config.inertiaWeight * v[i][d] + config.cognitiveRate * r1 * (pbest[i][d] - x[i][d]) +
                     config.socialRate * r2 * (gbest[d] - x[i][d]);
        vel = std::clamp(vel, -vmax[d], vmax[d]);
        v[i][d] = vel;
        x[i][d] += vel;
      }
      x[i] = bounds.clip(std::move(x[i]));
    }
    fx = evaluate(batch);
    for (int i = 0; i < n; ++i) {
      if (fx[i] < pbestFit[i]) {
        pbestFit[i] = fx[i];
        pbest[i] = x[i];
      }
    }
    record(trace, x, fx);
  }
  return trace;
}

std::vector<double> ReducedSpace::expand(const std::vector<double>& reduced) const {
  if (reduced.size() != freeIndex.size()) {
    fail(ErrorClass::kInvalidArgument, "DimensionMismatch", "reduced vector has the wrong length");
  }
  std::vector<double> full = template_;
  for (std::size_t k = 0; k < reduced.size(); ++k) full[static_cast<std::size_t>(freeIndex[k])] = reduced[k];
  return full;
}

ReducedSpace fixedAngleVariants(const Bounds& full, int m, AngleVariant variant) {
  full.validate();
  if (m < 1 || full.dim() != static_cast<std::size_t>(3 * m + 1)) {
    fail(ErrorClass::kInvalidArgument, "DimensionMismatch", "bounds must have 3m + 1 entries");
  }
  const bool fixTheta = variant == AngleVariant::kThetaFixed || variant == AngleVariant::kBothFixed;
  const bool fixPhi = variant == AngleVariant::kPhiFixed || variant == AngleVariant::kBothFixed;
  ReducedSpace r;
  r.template_.assign(full.dim(), 0.0);
  for (int k = 0; k < 3 * m + 1; ++k) {
    const bool isTheta = k >= 2 * m && k < 3 * m;
    const bool isPhi = k == 3 * m;
    if ((isTheta && fixTheta) || (isPhi && fixPhi)) {
      r.template_[static_cast<std::size_t>(k)] = isTheta ? kDiagonalIncidence : 0.0;
      continue;
    }
    r.freeIndex.push_back(k);
    r.bounds.lower.push_back(full.lower[static_cast<std::size_t>(k)]);
    r.bounds.upper.push_back(full.upper[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace sarcr
