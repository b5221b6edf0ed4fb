#pragma once

// Scenario files: everything a run needs (orbits, asteroid and technology
// defaults, margins, design bounds, solver settings, expert opinions) in a
// versioned JSON document. Angles are stored in radians and lengths in km so
// that a parse/serialize cycle is exact.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "deflect/evidence.hpp"
#include "deflect/mission.hpp"
#include "deflect/optimize.hpp"

namespace deflect {

inline constexpr int kScenarioSchemaVersion = 1;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  MissionScenario mission;
  bool calibrate = true;     // phase the asteroid onto the Earth when loading
  std::string experts_file;  // relative to the scenario file unless absolute
  SolverConfig solver;
  CurveOptions curve;

  std::vector<ExpertOpinion> experts;  // filled by load_scenario, not serialized
};

/// Public Apophis-like orbit with the model defaults used throughout the
/// tests. Not calibrated.
Scenario reference_scenario();

std::string serialize_scenario(const Scenario& s);
/// Throws ScenarioError on malformed input, unknown keys or a wrong schema
/// version. Does not touch the file system.
Scenario parse_scenario(const std::string& text);

/// Reads the scenario and its expert file; calibrates when the scenario asks
/// for it and `apply_calibration` is set.
Scenario load_scenario(const std::filesystem::path& path, bool apply_calibration = true);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

std::string serialize_experts(const std::vector<ExpertOpinion>& experts);
std::vector<ExpertOpinion> parse_experts(const std::string& text);
std::vector<ExpertOpinion> load_experts(const std::filesystem::path& path);

/// Fuses the opinions of every uncertain parameter, in the canonical order.
std::vector<ParameterBPA> fuse_all(const std::vector<ExpertOpinion>& experts);
EvidenceStructure evidence_from(const std::vector<ExpertOpinion>& experts);

/// Evidence structure over one parameter; the others collapse to their
/// fixed values (single interval of zero width, BPA 1).
EvidenceStructure single_parameter_evidence(const std::vector<ExpertOpinion>& experts,
                                            std::size_t parameter,
                                            const UncertainVector& fixed);

}  // namespace deflect
