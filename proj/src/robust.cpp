#include <cmath>
#include <stdexcept>

#include "deflect/optimize.hpp"

namespace deflect {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::deterministic: return "deterministic";
    case Mode::minmin: return "minmin";
    case Mode::minmin_margins: return "minmin-margins";
    case Mode::minmax: return "minmax";
  }
  return "unknown";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::deterministic, Mode::minmin, Mode::minmin_margins, Mode::minmax}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

DesignVector design_from(const std::vector<double>& x) {
  if (x.size() != 4) throw std::invalid_argument("design vector needs 4 components");
  return {x[0], static_cast<int>(round_half_up(x[1])), x[2], x[3]};
}

std::vector<double> to_vector(const DesignVector& d) {
  return {d.d_m, static_cast<double>(d.n_sc), d.t_warn, d.c_r};
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RobustEvaluator::RobustEvaluator(const MissionModel& model, EvidenceStructure evidence, Mode mode,
                                 bool contamination, SolverConfig config)
    : model_(model),
      evidence_(std::move(evidence)),
      mode_(mode),
      contamination_(contamination),
      config_(config) {
  config_.validate();
  if (evidence_.dimension() != kNumUncertain) {
    throw std::invalid_argument("evidence structure must cover the " +
                                std::to_string(kNumUncertain) + " uncertain parameters");
  }
  for (std::size_t i = 0; i < kNumUncertain; ++i) {
    if (evidence_.parameters()[i].name != kUncertainNames[i]) {
      throw std::invalid_argument("evidence parameter " + std::to_string(i) + " is '" +
                                  evidence_.parameters()[i].name + "', expected '" +
                                  std::string(kUncertainNames[i]) + "'");
    }
  }
  const bool with_margins = mode == Mode::deterministic || mode == Mode::minmin_margins;
  margins_ = with_margins ? model.scenario().margins : Margins::none();
}

UncertainVector RobustEvaluator::uncertain_at(const std::vector<double>& unit) const {
  const auto phys = evidence_.unit_to_physical(unit);
  UncertainVector u;
  for (std::size_t i = 0; i < kNumUncertain; ++i) u[i] = phys[i];
  return u;
}

Individual RobustEvaluator::evaluate(const DesignVector& design) const {
  const auto& b = model_.scenario().bounds;
  const std::vector<double> x = to_vector(design);
  const std::vector<double> scale{b.d_m_hi, static_cast<double>(b.n_sc_hi), b.t_warn_hi, b.c_r_hi};
  std::vector<std::int64_t> key;
  for (std::size_t k = 0; k < x.size(); ++k) key.push_back(std::llround(x[k] / (1e-9 * scale[k])));
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  Individual ind;
  ind.x = x;
  const UncertainVector& nominal = model_.scenario().nominal;
  if (mode_ == Mode::deterministic) {
    ind.obj.m_sys = model_.system_mass(design, nominal, margins_);
    ind.obj.neg_b = -model_.impact_parameter(design, nominal, contamination_);
  } else {
    const Sense sense = mode_ == Mode::minmax ? Sense::maximize : Sense::minimize;
    std::uint64_t h = config_.seed;
    for (auto q : key) h = splitmix(h ^ static_cast<std::uint64_t>(q));
    // Start both searches from the fixed-value point when it lies in the
    // uncertain hull, so the bounds never fall on the wrong side of it.
    std::vector<std::vector<double>> start;
    const auto nominal_unit =
        evidence_.physical_to_unit(std::vector<double>(nominal.values.begin(), nominal.values.end()));
    if (!nominal_unit.empty()) start.push_back(nominal_unit);

    const auto mass = inner_bound_search(
        [&](const std::vector<double>& u) {
          return model_.system_mass(design, uncertain_at(u), margins_);
        },
        kNumUncertain, sense, config_.inner_budget, config_.inner_pop, splitmix(h ^ 1), start);
    const auto dev = inner_bound_search(
        [&](const std::vector<double>& u) {
          return -model_.impact_parameter(design, uncertain_at(u), contamination_);
        },
        kNumUncertain, sense, config_.inner_budget, config_.inner_pop, splitmix(h ^ 2), start);
    ind.obj = {mass.value, dev.value};
    const auto wm = uncertain_at(mass.witness);
    const auto wb = uncertain_at(dev.witness);
    ind.witness_m.assign(wm.values.begin(), wm.values.end());
    ind.witness_b.assign(wb.values.begin(), wb.values.end());
  }
  cache_.emplace(std::move(key), ind);
  return ind;
}

MooProblem RobustEvaluator::problem() const {
  const auto& b = model_.scenario().bounds;
  MooProblem p;
  p.lo = {b.d_m_lo, static_cast<double>(b.n_sc_lo), b.t_warn_lo, b.c_r_lo};
  p.hi = {b.d_m_hi, static_cast<double>(b.n_sc_hi), b.t_warn_hi, b.c_r_hi};
  p.integer = {false, true, false, false};
  p.evaluate = [this](const std::vector<double>& x) { return evaluate(design_from(x)); };
  return p;
}

ParetoArchive solve_robust(const RobustEvaluator& evaluator, const DesignBounds& bounds,
                           const SolverConfig& config) {
  MooProblem p = evaluator.problem();
  p.lo = {bounds.d_m_lo, static_cast<double>(bounds.n_sc_lo), bounds.t_warn_lo, bounds.c_r_lo};
  p.hi = {bounds.d_m_hi, static_cast<double>(bounds.n_sc_hi), bounds.t_warn_hi, bounds.c_r_hi};
  return solve_moo(p, config);
}

}  // namespace deflect
