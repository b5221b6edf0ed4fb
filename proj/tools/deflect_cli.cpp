// Command-line front end: loads a scenario, runs one mode and writes the CSV
// results plus a manifest under --out.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "deflect/runner.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace deflect;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ScenarioError("cannot write " + p.string());
  out << text;
}

std::string hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asteroid deflection design by laser ablation under evidence-theory uncertainty"};
  std::string scenario_path;
  std::string mode = "deterministic";
  std::string contamination = "off";
  std::string design_text;
  std::optional<std::uint64_t> seed;
  std::optional<int> budget;
  std::string out_dir = "out";
  bool oracle = false;
  std::string write_reference;

  app.add_option("--scenario", scenario_path, "scenario JSON file");
  app.add_option("--mode", mode, "run mode")
      ->check(CLI::IsMember({"deterministic", "minmin", "minmin-margins", "minmax", "bpcurve",
                             "sensitivity", "propagate"}));
  app.add_option("--contamination", contamination, "plume contamination of the optics")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--design", design_text, "dM,nsc,twarn,Cr for bpcurve, sensitivity, propagate");
  app.add_option("--seed", seed, "overrides the scenario seed");
  app.add_option("--budget", budget, "overrides the outer evaluation budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--oracle", oracle, "propagate: cross-check against the Runge-Kutta reference");
  app.add_option("--write-reference", write_reference,
                 "write the built-in reference scenario to this path and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (!write_reference.empty()) {
      save_scenario(reference_scenario(), write_reference);
      std::cout << "wrote " << write_reference << "\n";
      return 0;
    }
    if (scenario_path.empty()) throw ScenarioError("--scenario is required");

    const Scenario scenario = load_scenario(scenario_path);
    RunRequest req;
    req.mode = mode;
    req.contamination = contamination == "on";
    if (!design_text.empty()) req.design = parse_design(design_text);
    req.seed = seed;
    req.outer_budget = budget;
    req.oracle = oracle;

    const RunResult res = run(scenario, req);

    fs::create_directories(out_dir);
    nlohmann::ordered_json manifest;
    manifest["version"] = kVersion;
    manifest["mode"] = mode;
    manifest["contamination"] = req.contamination;
    manifest["seed"] = seed.value_or(scenario.solver.seed);
    manifest["outer_budget"] = budget.value_or(scenario.solver.outer_budget);
    if (req.design) manifest["design"] = to_vector(*req.design);
    manifest["scenario_file"] = scenario_path;
    manifest["scenario_fnv1a"] = hex(fnv1a(serialize_scenario(scenario)));
    manifest["experts_fnv1a"] = hex(fnv1a(serialize_experts(scenario.experts)));
    for (const auto& [name, text] : res.files) {
      write_file(fs::path(out_dir) / name, text);
      manifest["files"].push_back({{"name", name}, {"fnv1a", hex(fnv1a(text))}});
    }
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");

    for (const auto& line : res.log) std::cout << line << "\n";
    std::cout << "results in " << out_dir << "\n";
    return 0;
  } catch (const ConvergenceError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EvidenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
