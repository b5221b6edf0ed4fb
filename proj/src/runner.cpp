#include "deflect/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace deflect {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_box(const std::vector<Range>& box, std::uint64_t seed) {
  std::uint64_t h = mix(seed);
  for (const auto& r : box) {
    std::uint64_t a, b;
    std::memcpy(&a, &r.lo, sizeof a);
    std::memcpy(&b, &r.hi, sizeof b);
    h = mix(h ^ a);
    h = mix(h ^ b);
  }
  return h;
}

std::string fmt(double x) { return format_double(x); }

}  // namespace

std::string to_string(Objective o) { return o == Objective::b ? "b" : "m_sys"; }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

DesignVector parse_design(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("design: cannot read '" + item + "' as a number");
    }
    v.push_back(x);
  }
  if (v.size() != 4) throw std::invalid_argument("design needs four values: dM,nsc,twarn,Cr");
  if (v[1] != std::floor(v[1])) throw std::invalid_argument("design: n_sc must be an integer");
  return design_from(v);
}

BoxBounder make_bounder(const MissionModel& model, const EvidenceStructure& evidence,
                        const DesignVector& design, Objective objective, bool contamination,
                        const SolverConfig& config) {
  const auto& nominal = model.scenario().nominal;
  const auto nominal_unit =
      evidence.physical_to_unit(std::vector<double>(nominal.values.begin(), nominal.values.end()));
  return [&model, &evidence, design, objective, contamination, config,
          nominal_unit](const std::vector<Range>& box) {
    const std::size_t d = box.size();
    std::vector<double> lo(d), hi(d);
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = box[k].lo;
      hi[k] = box[k].hi;
    }
    // Dimensions whose physical extent is a single value are frozen so the
    // search only spends evaluations where the objective can change.
    const auto p_lo = evidence.unit_to_physical(lo);
    const auto p_hi = evidence.unit_to_physical(hi);
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < d; ++k) {
      if (p_lo[k] != p_hi[k]) free.push_back(k);
    }
    auto full = [&](const std::vector<double>& x) {
      std::vector<double> u = lo;
      for (std::size_t i = 0; i < free.size(); ++i) u[free[i]] = x[i];
      return u;
    };
    auto f = [&](const std::vector<double>& x) {
      const auto phys = evidence.unit_to_physical(full(x));
      UncertainVector u;
      std::copy(phys.begin(), phys.end(), u.values.begin());
      if (objective == Objective::b) return -model.impact_parameter(design, u, contamination);
      return model.system_mass(design, u, Margins::none());
    };
    if (free.empty()) {
      const double v = f({});
      return Bounds{v, v};
    }
    std::vector<double> flo, fhi;
    std::vector<std::vector<double>> start(1);
    for (std::size_t k : free) {
      flo.push_back(lo[k]);
      fhi.push_back(hi[k]);
      const double c = nominal_unit.empty() ? 0.5 * (lo[k] + hi[k]) : nominal_unit[k];
      start[0].push_back(std::clamp(c, lo[k], hi[k]));
    }
    const std::uint64_t h = hash_box(box, config.seed);
    const int pop = std::max(config.inner_pop, 4);
    const int budget = std::max(config.inner_budget, pop);
    const auto mn = restart_de(f, flo, fhi, Sense::minimize, budget, pop, mix(h ^ 1), start);
    const auto mx = restart_de(f, flo, fhi, Sense::maximize, budget, pop, mix(h ^ 2), start);
    return Bounds{mn.value, mx.value};
  };
}

BeliefCurve objective_curve(const MissionModel& model, const EvidenceStructure& evidence,
                            const DesignVector& design, Objective objective, bool contamination,
                            const SolverConfig& solver, const CurveOptions& curve) {
  BeliefCurve c = bel_pl_curve(
      evidence, make_bounder(model, evidence, design, objective, contamination, solver), curve);
  if (objective == Objective::b) {
    for (double& v : c.v) v = -v;
    const double lo = -c.v_max;
    c.v_max = -c.v_min;
    c.v_min = lo;
  }
  return c;
}

std::vector<SensitivityEntry> sensitivity(const Scenario& scenario, const MissionModel& model,
                                          const DesignVector& design, bool contamination) {
  std::vector<SensitivityEntry> out;
  for (std::size_t k = 0; k < kNumUncertain; ++k) {
    const auto ev = single_parameter_evidence(scenario.experts, k, scenario.mission.nominal);
    SensitivityEntry e;
    e.parameter = std::string(kUncertainNames[k]);
    // One-parameter structures have a handful of cells; bound each exactly
    // once through the whole-structure call.
    const auto bb = make_bounder(model, ev, design, Objective::b, contamination, scenario.solver);
    const auto mb = make_bounder(model, ev, design, Objective::m_sys, contamination, scenario.solver);
    e.b_worst = INFINITY;
    e.b_best = -INFINITY;
    e.m_best = INFINITY;
    e.m_worst = -INFINITY;
    const std::size_t n = ev.element_count();
    for (std::size_t i = 0; i < n; ++i) {
      const auto box = ev.element(i).unit_box;
      const auto b = bb(box);
      const auto m = mb(box);
      e.b_worst = std::min(e.b_worst, -b.max);
      e.b_best = std::max(e.b_best, -b.min);
      e.m_best = std::min(e.m_best, m.min);
      e.m_worst = std::max(e.m_worst, m.max);
    }
    out.push_back(e);
  }
  return out;
}

std::string archive_csv(const ParetoArchive& archive, const std::string& mode) {
  const bool witnesses = mode != to_string(Mode::deterministic);
  std::string s = "d_M,n_sc,t_warn,C_r,m_sys,b,mode";
  if (witnesses) {
    for (auto n : kUncertainNames) s += ",m_" + std::string(n);
    for (auto n : kUncertainNames) s += ",b_" + std::string(n);
  }
  s += "\n";
  for (const auto& m : archive.sorted()) {
    s += fmt(m.x[0]) + "," + fmt(m.x[1]) + "," + fmt(m.x[2]) + "," + fmt(m.x[3]) + "," +
         fmt(m.obj.m_sys) + "," + fmt(-m.obj.neg_b) + "," + mode;
    if (witnesses) {
      for (double w : m.witness_m) s += "," + fmt(w);
      for (double w : m.witness_b) s += "," + fmt(w);
    }
    s += "\n";
  }
  return s;
}

std::string curve_csv(const std::vector<std::pair<Objective, BeliefCurve>>& curves) {
  std::string s = "objective,v,bel,pl\n";
  for (const auto& [o, c] : curves) {
    for (std::size_t i = 0; i < c.v.size(); ++i) {
      s += to_string(o) + "," + fmt(c.v[i]) + "," + fmt(c.bel[i]) + "," + fmt(c.pl[i]) + "\n";
    }
  }
  return s;
}

namespace {

std::string trajectory_csv(const std::vector<TrajectoryNode>& nodes) {
  std::string s = "t,a,P1,P2,Q1,Q2,L,eps\n";
  for (const auto& n : nodes) {
    const auto& e = n.state;
    s += fmt(e.t) + "," + fmt(e.a) + "," + fmt(e.p1) + "," + fmt(e.p2) + "," + fmt(e.q1) + "," +
         fmt(e.q2) + "," + fmt(e.ell) + "," + fmt(n.thrust.eps) + "\n";
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult run(const Scenario& scenario, const RunRequest& req) {
  RunResult res;
  res.mode = req.mode;
  SolverConfig cfg = scenario.solver;
  if (req.seed) cfg.seed = *req.seed;
  if (req.outer_budget) cfg.outer_budget = *req.outer_budget;
  cfg.validate();

  const MissionModel model(scenario.mission);
  const DesignVector design = req.design.value_or(DesignVector{
      scenario.mission.bounds.d_m_hi, scenario.mission.bounds.n_sc_hi,
      scenario.mission.bounds.t_warn_hi, scenario.mission.bounds.c_r_hi});
  if (!scenario.mission.bounds.contains(design)) {
    throw std::invalid_argument("design lies outside the scenario's design bounds");
  }
  const auto t0 = std::chrono::steady_clock::now();

  if (const auto mode = parse_mode(req.mode)) {
    const RobustEvaluator ev(model, evidence_from(scenario.experts), *mode, req.contamination, cfg);
    const auto archive = solve_robust(ev, scenario.mission.bounds, cfg);
    res.files.emplace_back("archive.csv", archive_csv(archive, req.mode));
    const auto s = archive.sorted();
    res.log.push_back(std::to_string(archive.size()) + " nondominated designs, m_sys " +
                      fmt(s.front().obj.m_sys) + " .. " + fmt(s.back().obj.m_sys) + " kg, b up to " +
                      fmt(-s.back().obj.neg_b) + " km");
    if (*mode != Mode::deterministic) {
      std::string x = "label,d_M,n_sc,t_warn,C_r,m_sys,b\n";
      for (const auto& p : extract_extremes(archive, *mode)) {
        const auto& m = p.member;
        x += p.label + "," + fmt(m.x[0]) + "," + fmt(m.x[1]) + "," + fmt(m.x[2]) + "," +
             fmt(m.x[3]) + "," + fmt(m.obj.m_sys) + "," + fmt(-m.obj.neg_b) + "\n";
      }
      res.files.emplace_back("extremes.csv", x);
    }
  } else if (req.mode == "bpcurve") {
    const auto evidence = evidence_from(scenario.experts);
    std::vector<std::pair<Objective, BeliefCurve>> curves;
    for (Objective o : {Objective::b, Objective::m_sys}) {
      curves.emplace_back(o, objective_curve(model, evidence, design, o, req.contamination, cfg,
                                             scenario.curve));
      const auto& c = curves.back().second;
      res.log.push_back(to_string(o) + ": range " + fmt(c.v_min) + " .. " + fmt(c.v_max) + ", " +
                        std::to_string(c.boxes_solved) + " blocks bounded" +
                        (c.partial ? " (partition cap reached, Pl is conservative)" : ""));
    }
    res.files.emplace_back("curves.csv", curve_csv(curves));
  } else if (req.mode == "sensitivity") {
    Scenario sc = scenario;
    sc.solver = cfg;
    const auto rows = sensitivity(sc, model, design, req.contamination);
    std::string s = "parameter,b_worst,b_best,spread,m_best,m_worst\n";
    for (const auto& e : rows) {
      s += e.parameter + "," + fmt(e.b_worst) + "," + fmt(e.b_best) + "," + fmt(e.spread()) + "," +
           fmt(e.m_best) + "," + fmt(e.m_worst) + "\n";
    }
    res.files.emplace_back("sensitivity.csv", s);
    const auto top = std::max_element(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.spread() < b.spread();
    });
    res.log.push_back("widest b spread: " + top->parameter + " (" + fmt(top->spread()) + ")");
  } else if (req.mode == "propagate") {
    const auto& nominal = scenario.mission.nominal;
    const auto nodes = model.trajectory(design, nominal, req.contamination, true);
    const double b = model.impact_parameter(design, nominal, req.contamination);
    res.files.emplace_back("trajectory.csv", trajectory_csv(nodes));
    res.log.push_back(std::to_string(nodes.size() - 1) + " arcs, b = " + fmt(b) + " km (" +
                      fmt(seconds_since(t0)) + " s)");
    if (req.oracle) {
      const auto t1 = std::chrono::steady_clock::now();
      const double ref = model.reference_impact_parameter(design, nominal, req.contamination);
      res.log.push_back("reference b = " + fmt(ref) + " km (" + fmt(seconds_since(t1)) + " s)");
      res.files.emplace_back("oracle.csv", "b_fpet,b_reference,relative_difference\n" + fmt(b) +
                                               "," + fmt(ref) + "," + fmt(std::abs(b - ref) / ref) +
                                               "\n");
    }
  } else {
    throw std::invalid_argument("unknown mode '" + req.mode + "'");
  }
  res.log.push_back("done in " + fmt(seconds_since(t0)) + " s");
  return res;
}

}  // namespace deflect
