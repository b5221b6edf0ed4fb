#include "deflect/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace deflect {

bool dominates(const Objectives& a, const Objectives& b) {
  return a.m_sys <= b.m_sys && a.neg_b <= b.neg_b && (a.m_sys < b.m_sys || a.neg_b < b.neg_b);
}

void SolverConfig::validate() const {
  if (outer_pop < 3) throw std::invalid_argument("outer population must be at least 3");
  if (explorers < 0 || explorers > outer_pop) {
    throw std::invalid_argument("explorer count must lie in [0, outer population]");
  }
  if (outer_budget < outer_pop) {
    throw std::invalid_argument("outer budget must cover the initial population");
  }
  if (inner_pop < 4) throw std::invalid_argument("inner population must be at least 4");
  if (inner_budget < inner_pop) {
    throw std::invalid_argument("inner budget must cover the initial population");
  }
  if (archive_capacity < 2) throw std::invalid_argument("archive capacity must be at least 2");
}

double round_half_up(double x) { return std::floor(x + 0.5); }

bool ParetoArchive::insert(const Individual& cand) {
  if (!std::isfinite(cand.obj.m_sys) || !std::isfinite(cand.obj.neg_b)) return false;
  for (const auto& m : members_) {
    if (dominates(m.obj, cand.obj)) return false;
    if (m.obj.m_sys == cand.obj.m_sys && m.obj.neg_b == cand.obj.neg_b) return false;
  }
  std::erase_if(members_, [&](const Individual& m) { return dominates(cand.obj, m.obj); });
  members_.push_back(cand);
  if (members_.size() <= capacity_) return true;
  prune();
  const auto& o = cand.obj;
  return std::any_of(members_.begin(), members_.end(), [&](const Individual& m) {
    return m.obj.m_sys == o.m_sys && m.obj.neg_b == o.neg_b;
  });
}

void ParetoArchive::prune() {
  while (members_.size() > capacity_) {
    // On a two-objective front sorting by one objective orders the other.
    std::sort(members_.begin(), members_.end(), [](const Individual& a, const Individual& b) {
      return a.obj.m_sys < b.obj.m_sys;
    });
    const std::size_t n = members_.size();
    const double r1 = std::max(members_.back().obj.m_sys - members_.front().obj.m_sys, 1e-300);
    const double r2 = std::max(members_.front().obj.neg_b - members_.back().obj.neg_b, 1e-300);
    std::size_t worst = 1;
    double worst_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double d = (members_[i + 1].obj.m_sys - members_[i - 1].obj.m_sys) / r1 +
                       (members_[i - 1].obj.neg_b - members_[i + 1].obj.neg_b) / r2;
      if (d < worst_d) {
        worst_d = d;
        worst = i;
      }
    }
    members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

std::vector<Individual> ParetoArchive::sorted() const {
  auto out = members_;
  std::sort(out.begin(), out.end(), [](const Individual& a, const Individual& b) {
    return a.obj.m_sys < b.obj.m_sys || (a.obj.m_sys == b.obj.m_sys && a.obj.neg_b < b.obj.neg_b);
  });
  return out;
}

BoundResult restart_de(const ScalarFn& f, const std::vector<double>& lo,
                       const std::vector<double>& hi, Sense sense, int budget, int pop,
                       std::uint64_t seed, const std::vector<std::vector<double>>& initial) {
  const std::size_t n = lo.size();
  if (hi.size() != n || n == 0) throw std::invalid_argument("restart_de: bad box");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(lo[k] <= hi[k])) throw std::invalid_argument("restart_de: lo > hi");
  }
  if (pop < 4) throw std::invalid_argument("restart_de: population must be at least 4");
  if (budget < pop) throw std::invalid_argument("restart_de: budget below one population");

  const double sign = sense == Sense::minimize ? 1.0 : -1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double cr = 0.9;

  auto random_point = [&] {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = lo[k] + unif(rng) * (hi[k] - lo[k]);
    return x;
  };
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < n; ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
  };

  BoundResult res;
  std::vector<std::vector<double>> xs(pop);
  std::vector<double> gs(pop);
  std::vector<double> best;
  double best_g = std::numeric_limits<double>::infinity();
  auto eval = [&](const std::vector<double>& x) {
    double g = sign * f(x);
    if (std::isnan(g)) g = std::numeric_limits<double>::infinity();
    ++res.evaluations;
    if (g < best_g || best.empty()) {
      best_g = g;
      best = x;
    }
    return g;
  };

  for (int i = 0; i < pop; ++i) {
    xs[i] = random_point();
    if (static_cast<std::size_t>(i) < initial.size() && initial[i].size() == n) {
      xs[i] = initial[i];
      clamp(xs[i]);
    }
    gs[i] = eval(xs[i]);
  }

  std::uniform_int_distribution<int> pick(0, pop - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, n - 1);
  const int patience = 10;  // generations without a new best before restarting
  int stale = 0;
  while (res.evaluations < budget) {
    const double best_before = best_g;
    for (int i = 0; i < pop && res.evaluations < budget; ++i) {
      int r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const double fw = 0.5 + 0.5 * unif(rng);
      const std::size_t jr = pick_dim(rng);
      std::vector<double> trial = xs[i];
      for (std::size_t k = 0; k < n; ++k) {
        if (k == jr || unif(rng) < cr) trial[k] = xs[r1][k] + fw * (xs[r2][k] - xs[r3][k]);
      }
      clamp(trial);
      const double g = eval(trial);
      if (g <= gs[i]) {
        xs[i] = std::move(trial);
        gs[i] = g;
      }
    }
    stale = best_g < best_before ? 0 : stale + 1;
    // Collapse: every member within a tiny fraction of the box of the best,
    // or no progress for a while (plateaus).
    double spread = 0.0;
    for (int i = 0; i < pop; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const double w = hi[k] - lo[k];
        if (w > 0.0) spread = std::max(spread, std::abs(xs[i][k] - best[k]) / w);
      }
    }
    if ((spread < 1e-4 || stale >= patience) && res.evaluations + pop - 1 <= budget) {
      stale = 0;
      xs[0] = best;
      gs[0] = best_g;
      for (int i = 1; i < pop; ++i) {
        xs[i] = random_point();
        gs[i] = eval(xs[i]);
      }
    }
  }
  res.value = sign * best_g;
  res.witness = best;
  return res;
}

BoundResult inner_bound_search(const ScalarFn& f, std::size_t dim, Sense sense, int budget,
                               int pop, std::uint64_t seed,
                               const std::vector<std::vector<double>>& initial) {
  return restart_de(f, std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0), sense,
                    budget, pop, seed, initial);
}

namespace {

struct Explorer {
  double rho = 0.2;     // step as a fraction of the box width
  std::size_t dim = 0;  // coordinate being probed
  int dir = 1;
  std::size_t failures = 0;
};

}  // namespace

ParetoArchive solve_moo(const MooProblem& problem, const SolverConfig& config) {
  config.validate();
  const std::size_t n = problem.lo.size();
  if (problem.hi.size() != n || n == 0) throw std::invalid_argument("solve_moo: bad box");
  if (!problem.evaluate) throw std::invalid_argument("solve_moo: no objective");
  std::vector<bool> integer = problem.integer;
  integer.resize(n, false);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ParetoArchive archive(config.archive_capacity);
  int evals = 0;

  auto evaluate = [&](std::vector<double> x) {
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::clamp(x[k], problem.lo[k], problem.hi[k]);
      if (integer[k]) x[k] = std::clamp(round_half_up(x[k]), problem.lo[k], problem.hi[k]);
    }
    Individual ind = problem.evaluate(x);
    ind.x = std::move(x);
    ++evals;
    const bool entered = archive.insert(ind);
    return std::pair{ind, entered};
  };

  // Latin hypercube start.
  const int np = config.outer_pop;
  std::vector<std::vector<double>> strata(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < np; ++i) strata[k].push_back((i + unif(rng)) / np);
    std::shuffle(strata[k].begin(), strata[k].end(), rng);
  }
  std::vector<Individual> agents;
  for (int i = 0; i < np; ++i) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = problem.lo[k] + strata[k][i] * (problem.hi[k] - problem.lo[k]);
    }
    agents.push_back(evaluate(x).first);
  }

  std::vector<Explorer> explorers(config.explorers);
  std::uniform_int_distribution<int> pick(0, np - 1);

  // Moving onto a candidate: it must not be worse than the agent, and if the
  // two are incomparable it must have been good enough for the archive.
  auto accept = [](const Individual& agent, const Individual& cand, bool entered) {
    return dominates(cand.obj, agent.obj) || (!dominates(agent.obj, cand.obj) && entered);
  };

  while (evals < config.outer_budget) {
    for (int i = 0; i < np && evals < config.outer_budget; ++i) {
      Individual& agent = agents[i];
      if (i < config.explorers) {
        Explorer& ex = explorers[i];
        const std::size_t k = ex.dim;
        const double width = problem.hi[k] - problem.lo[k];
        double step = ex.rho * width;
        if (integer[k]) step = std::max(step, 1.0);
        std::vector<double> x = agent.x;
        x[k] += ex.dir * step;
        auto [cand, entered] = evaluate(x);
        if (accept(agent, cand, entered) && cand.x != agent.x) {
          agent = cand;
          ex.rho = std::min(2.0 * ex.rho, 0.5);
          ex.failures = 0;
        } else if (ex.dir == 1) {
          ex.dir = -1;
        } else {
          ex.dir = 1;
          ex.dim = (ex.dim + 1) % n;
          if (++ex.failures == n) {
            ex.failures = 0;
            ex.rho *= 0.5;
            if (ex.rho < 1e-3) {
              // Converged locally: restart from a random archive member.
              ex.rho = 0.2;
              const auto& m = archive.members();
              std::uniform_int_distribution<std::size_t> pm(0, m.size() - 1);
              agent = m[pm(rng)];
            }
          }
        }
      } else {
        const auto& members = archive.members();
        std::uniform_int_distribution<std::size_t> pm(0, members.size() - 1);
        const std::vector<double> leader = members[pm(rng)].x;
        int r1, r2;
        do r1 = pick(rng); while (r1 == i);
        do r2 = pick(rng); while (r2 == i || r2 == r1);
        const double pull = unif(rng);
        const double fw = 0.5 + 0.5 * unif(rng);
        std::uniform_int_distribution<std::size_t> pick_dim(0, n - 1);
        const std::size_t jr = pick_dim(rng);
        std::vector<double> x = agent.x;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == jr || unif(rng) < 0.9) {
            x[k] = agent.x[k] + pull * (leader[k] - agent.x[k]) +
                   fw * (agents[r1].x[k] - agents[r2].x[k]);
          }
        }
        auto [cand, entered] = evaluate(x);
        if (accept(agent, cand, entered)) agent = cand;
      }
    }
  }
  return archive;
}

std::vector<LabeledPoint> extract_extremes(const ParetoArchive& archive, Mode mode) {
  if (archive.empty()) throw std::invalid_argument("extract_extremes: empty archive");
  std::string label;
  switch (mode) {
    case Mode::minmax: label = "Bel=1"; break;
    case Mode::minmin:
    case Mode::minmin_margins: label = "Pl=0"; break;
    case Mode::deterministic:
      throw std::invalid_argument("extract_extremes: the deterministic front carries no evidence level");
  }
  std::vector<LabeledPoint> out;
  for (const auto& m : archive.sorted()) out.push_back({m, label});
  return out;
}

}  // namespace deflect
