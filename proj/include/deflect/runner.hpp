#pragma once

// Run orchestration shared by the command-line tool and the acceptance
// checks: dispatches a mode on a loaded scenario and renders the results as
// CSV text. Nothing here touches the file system.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deflect/evidence.hpp"
#include "deflect/optimize.hpp"
#include "deflect/scenario.hpp"

namespace deflect {

inline constexpr const char* kVersion = "1.0.0";

enum class Objective { b, m_sys };

std::string to_string(Objective o);

struct RunRequest {
  std::string mode;  // a Mode name, "bpcurve", "sensitivity" or "propagate"
  bool contamination = false;
  std::optional<DesignVector> design;  // bpcurve / sensitivity / propagate
  std::optional<std::uint64_t> seed;   // overrides the scenario seed
  std::optional<int> outer_budget;     // overrides the scenario budget
  bool oracle = false;                 // propagate: also run the Runge-Kutta reference
};

struct RunResult {
  std::string mode;
  std::vector<std::pair<std::string, std::string>> files;  // name, CSV text
  std::vector<std::string> log;                            // human-readable summary
};

/// Throws std::invalid_argument for an unknown mode or a design outside the
/// scenario bounds.
RunResult run(const Scenario& scenario, const RunRequest& request);

/// Lower and upper bound of one objective over a box of the evidence unit
/// hypercube, each found with restart_de at the scenario's inner budget.
/// The b objective is bounded as f = -b so that "f <= v" reads "b >= -v".
BoxBounder make_bounder(const MissionModel& model, const EvidenceStructure& evidence,
                        const DesignVector& design, Objective objective, bool contamination,
                        const SolverConfig& config);

/// Curve expressed on the physical objective: for b the proposition is
/// "b >= v" (rows by decreasing v), for m_sys it is "m_sys <= v".
BeliefCurve objective_curve(const MissionModel& model, const EvidenceStructure& evidence,
                            const DesignVector& design, Objective objective, bool contamination,
                            const SolverConfig& solver, const CurveOptions& curve);

struct SensitivityEntry {
  std::string parameter;
  double b_worst = 0.0;  // b certain with Bel = 1
  double b_best = 0.0;   // smallest b with Pl = 0 beyond it
  double m_best = 0.0;
  double m_worst = 0.0;
  double spread() const { return b_best / b_worst; }
};

/// One-parameter structures for every uncertain parameter, the other nine
/// held at the scenario's fixed values.
std::vector<SensitivityEntry> sensitivity(const Scenario& scenario, const MissionModel& model,
                                          const DesignVector& design, bool contamination);

std::string archive_csv(const ParetoArchive& archive, const std::string& mode);
std::string curve_csv(const std::vector<std::pair<Objective, BeliefCurve>>& curves);

/// FNV-1a, used to fingerprint the scenario in the manifest.
std::uint64_t fnv1a(const std::string& text);

/// "%.17g"
std::string format_double(double x);

DesignVector parse_design(const std::string& text);

}  // namespace deflect
