#pragma once

// Multi-objective design search and the single-objective bound search over
// the uncertain space. The generic part works on boxes of R^n; the robust
// part wires it to the mission model for the deterministic, minmin and
// minmax problems.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deflect/evidence.hpp"
#include "deflect/mission.hpp"

namespace deflect {

/// Both minimized: system mass [kg] and minus the impact parameter [km].
struct Objectives {
  double m_sys = 0.0;
  double neg_b = 0.0;
};

/// a <= b componentwise with at least one strict inequality.
bool dominates(const Objectives& a, const Objectives& b);

struct SolverConfig {
  int outer_budget = 30000;
  int outer_pop = 10;
  int explorers = 2;
  int inner_budget = 250;
  int inner_pop = 5;
  std::uint64_t seed = 1;
  std::size_t archive_capacity = 100;

  void validate() const;
};

struct Individual {
  std::vector<double> x;  // decision vector in physical units
  Objectives obj;
  std::vector<double> witness_m;  // uncertain point behind m_sys (evidence modes)
  std::vector<double> witness_b;  // uncertain point behind neg_b
};

/// Nondominated set with a size cap. When full, the member in the most
/// crowded region of objective space is dropped (extremes are kept).
class ParetoArchive {
 public:
  explicit ParetoArchive(std::size_t capacity = 100) : capacity_(capacity) {}

  /// Returns true if the candidate entered the archive.
  bool insert(const Individual& cand);

  const std::vector<Individual>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t capacity() const { return capacity_; }

  /// Members sorted by increasing m_sys.
  std::vector<Individual> sorted() const;

 private:
  void prune();

  std::size_t capacity_;
  std::vector<Individual> members_;
};

enum class Sense { minimize, maximize };

struct BoundResult {
  double value = 0.0;
  std::vector<double> witness;
  int evaluations = 0;
};

using ScalarFn = std::function<double(const std::vector<double>&)>;

/// Differential evolution (rand/1/bin) with restarts on population collapse;
/// the best point survives every restart. Trial points are clamped to the
/// box. Points in `initial` replace the first random members of the
/// starting population. Throws std::invalid_argument if the budget does not
/// cover the initial population.
BoundResult restart_de(const ScalarFn& f, const std::vector<double>& lo,
                       const std::vector<double>& hi, Sense sense, int budget, int pop,
                       std::uint64_t seed, const std::vector<std::vector<double>>& initial = {});

/// restart_de over the unit hypercube of the given dimension.
BoundResult inner_bound_search(const ScalarFn& f, std::size_t dim, Sense sense, int budget,
                               int pop, std::uint64_t seed,
                               const std::vector<std::vector<double>>& initial = {});

using VectorObjective = std::function<Individual(const std::vector<double>& x)>;

struct MooProblem {
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<bool> integer;  // genes rounded half-up before evaluation
  VectorObjective evaluate;   // fills obj (and witnesses); x is set by the solver
};

/// Memetic multi-objective search: agents move by DE-style social moves
/// toward archive members, the first `explorers` agents instead run a
/// coordinate pattern search with adaptive step. Every evaluation is offered
/// to the archive. Deterministic for a fixed seed.
ParetoArchive solve_moo(const MooProblem& problem, const SolverConfig& config);

/// Round-half-up used for integer genes.
double round_half_up(double x);

// ---------------------------------------------------------------------------
// Robust design problems on the mission model.

enum class Mode { deterministic, minmin, minmin_margins, minmax };

std::string to_string(Mode m);
/// Parses "deterministic", "minmin", "minmin-margins", "minmax".
std::optional<Mode> parse_mode(const std::string& s);

DesignVector design_from(const std::vector<double>& x);
std::vector<double> to_vector(const DesignVector& d);

/// Evaluates designs under one of the four formulations. Evidence modes take
/// the bound of each objective over the unit hypercube of the evidence
/// structure, with one independent inner search per objective. Results are
/// cached per design on a 1e-9 relative grid; inner-search seeds are derived
/// from the design so results do not depend on evaluation order.
class RobustEvaluator {
 public:
  RobustEvaluator(const MissionModel& model, EvidenceStructure evidence, Mode mode,
                  bool contamination, SolverConfig config);

  Individual evaluate(const DesignVector& design) const;

  /// Physical uncertain vector for a unit-hypercube point.
  UncertainVector uncertain_at(const std::vector<double>& unit) const;

  Mode mode() const { return mode_; }
  const Margins& margins() const { return margins_; }
  std::size_t cache_size() const { return cache_.size(); }

  MooProblem problem() const;

 private:
  const MissionModel& model_;
  EvidenceStructure evidence_;
  Mode mode_;
  bool contamination_;
  SolverConfig config_;
  Margins margins_;
  mutable std::map<std::vector<std::int64_t>, Individual> cache_;
};

/// Runs the outer search for one formulation over the design bounds of the
/// scenario.
ParetoArchive solve_robust(const RobustEvaluator& evaluator, const DesignBounds& bounds,
                           const SolverConfig& config);

struct LabeledPoint {
  Individual member;
  std::string label;  // "Bel=1" on the minmax front, "Pl=0" on the minmin fronts
};

/// Tags archive members with the evidence level they certify. Throws
/// std::invalid_argument for an empty archive or the deterministic mode.
std::vector<LabeledPoint> extract_extremes(const ParetoArchive& archive, Mode mode);

}  // namespace deflect
