#include "deflect/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace deflect {

void ParameterBPA::validate(double tol) const {
  if (intervals.empty()) throw EvidenceError("parameter '" + name + "' has no intervals");
  double sum = 0.0;
  for (const auto& iv : intervals) {
    if (!(iv.lo <= iv.hi)) throw EvidenceError("parameter '" + name + "': interval with lo > hi");
    if (!(iv.bpa > 0.0 && iv.bpa <= 1.0)) {
      throw EvidenceError("parameter '" + name + "': BPA outside (0, 1]");
    }
    sum += iv.bpa;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw EvidenceError("parameter '" + name + "': BPAs sum to " + std::to_string(sum));
  }
}

ParameterBPA fuse_experts(const std::vector<ExpertOpinion>& opinions,
                          const std::string& parameter) {
  std::vector<std::pair<double, const std::vector<UncertainInterval>*>> used;
  for (const auto& op : opinions) {
    auto it = op.parameters.find(parameter);
    if (it == op.parameters.end() || it->second.empty()) continue;
    if (!(op.weight > 0.0)) throw EvidenceError("expert '" + op.id + "' has a non-positive weight");
    ParameterBPA check{parameter, it->second};
    check.validate();
    used.emplace_back(op.weight, &it->second);
  }
  if (used.empty()) throw EvidenceError("no expert addressed parameter '" + parameter + "'");

  // Rows: upper bounds, columns: lower bounds, both over all experts.
  std::vector<double> lowers;
  std::vector<double> uppers;
  for (const auto& [w, ivs] : used) {
    for (const auto& iv : *ivs) {
      lowers.push_back(iv.lo);
      uppers.push_back(iv.hi);
    }
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(lowers);
  unique_sorted(uppers);
  auto index = [](const std::vector<double>& v, double x) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };

  std::vector<std::vector<double>> avg(uppers.size(), std::vector<double>(lowers.size(), 0.0));
  for (const auto& [w, ivs] : used) {
    for (const auto& iv : *ivs) avg[index(uppers, iv.hi)][index(lowers, iv.lo)] += w * iv.bpa;
  }
  const double n = static_cast<double>(used.size());
  double total = 0.0;
  for (auto& row : avg) {
    for (double& x : row) {
      x /= n;
      total += x;
    }
  }

  ParameterBPA out;
  out.name = parameter;
  for (std::size_t c = 0; c < lowers.size(); ++c) {
    for (std::size_t r = 0; r < uppers.size(); ++r) {
      if (avg[r][c] > 0.0) out.intervals.push_back({lowers[c], uppers[r], avg[r][c] / total});
    }
  }
  out.validate();
  return out;
}

EvidenceStructure::EvidenceStructure(std::vector<ParameterBPA> params)
    : params_(std::move(params)) {
  if (params_.empty()) throw EvidenceError("evidence structure needs at least one parameter");
  for (const auto& p : params_) {
    p.validate();
    std::vector<double> e{0.0};
    for (const auto& iv : p.intervals) e.push_back(e.back() + iv.bpa);
    e.back() = 1.0;  // absorb round-off so the cells cover [0, 1] exactly
    edges_.push_back(std::move(e));
  }
}

std::uint64_t EvidenceStructure::element_count() const {
  std::uint64_t n = 1;
  for (const auto& p : params_) {
    const std::uint64_t k = p.intervals.size();
    if (n > std::numeric_limits<std::uint64_t>::max() / k) {
      throw EvidenceError("focal element count overflows");
    }
    n *= k;
  }
  return n;
}

FocalElement EvidenceStructure::element(std::uint64_t flat) const {
  FocalElement e;
  e.bpa = 1.0;
  for (std::size_t d = 0; d < params_.size(); ++d) {
    const std::size_t k = params_[d].intervals.size();
    const std::size_t i = flat % k;
    flat /= k;
    const auto& iv = params_[d].intervals[i];
    e.index.push_back(i);
    e.box.push_back({iv.lo, iv.hi});
    e.unit_box.push_back({edges_[d][i], edges_[d][i + 1]});
    e.bpa *= iv.bpa;
  }
  return e;
}

std::vector<FocalElement> EvidenceStructure::build_focal_elements(
    std::uint64_t max_elements) const {
  const std::uint64_t n = element_count();
  if (n > max_elements) {
    throw EvidenceError("focal element count " + std::to_string(n) + " exceeds the cap " +
                        std::to_string(max_elements));
  }
  std::vector<FocalElement> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(element(i));
  return out;
}

std::vector<FocalElement> build_focal_elements(const std::vector<ParameterBPA>& params,
                                               std::uint64_t max_elements) {
  return EvidenceStructure(params).build_focal_elements(max_elements);
}

std::size_t EvidenceStructure::cell_of(std::size_t dim, double x) const {
  const auto& e = edges_[dim];
  // First edge >= x closes the cell; x = 0 falls in the first cell.
  auto it = std::lower_bound(e.begin() + 1, e.end(), x);
  if (it == e.end()) --it;
  return static_cast<std::size_t>(it - e.begin()) - 1;
}

std::vector<double> EvidenceStructure::unit_to_physical(const std::vector<double>& unit) const {
  if (unit.size() != params_.size()) {
    throw std::invalid_argument("unit point dimension does not match the evidence structure");
  }
  std::vector<double> out(unit.size());
  for (std::size_t d = 0; d < unit.size(); ++d) {
    const double x = std::clamp(unit[d], 0.0, 1.0);
    const std::size_t k = cell_of(d, x);
    const auto& iv = params_[d].intervals[k];
    const double lo = edges_[d][k];
    const double hi = edges_[d][k + 1];
    const double s = hi > lo ? (x - lo) / (hi - lo) : 0.0;
    out[d] = x >= hi ? iv.hi : iv.lo + std::clamp(s, 0.0, 1.0) * (iv.hi - iv.lo);
  }
  return out;
}

std::vector<double> EvidenceStructure::physical_to_unit(
    const std::vector<double>& physical) const {
  if (physical.size() != params_.size()) {
    throw std::invalid_argument("physical point dimension does not match the evidence structure");
  }
  std::vector<double> out(physical.size());
  for (std::size_t d = 0; d < physical.size(); ++d) {
    const auto& ivs = params_[d].intervals;
    std::size_t k = 0;
    while (k < ivs.size() && !(ivs[k].lo <= physical[d] && physical[d] <= ivs[k].hi)) ++k;
    if (k == ivs.size()) return {};
    const double w = ivs[k].hi - ivs[k].lo;
    const double s = w > 0.0 ? (physical[d] - ivs[k].lo) / w : 0.0;
    out[d] = edges_[d][k] + s * (edges_[d][k + 1] - edges_[d][k]);
  }
  return out;
}

CellBlock EvidenceStructure::whole() const {
  CellBlock b;
  for (const auto& p : params_) {
    b.first.push_back(0);
    b.last.push_back(p.intervals.size() - 1);
  }
  return b;
}

double EvidenceStructure::bpa(const CellBlock& block) const {
  double m = 1.0;
  for (std::size_t d = 0; d < params_.size(); ++d) m *= edges_[d][block.last[d] + 1] - edges_[d][block.first[d]];
  return m;
}

std::vector<Range> EvidenceStructure::unit_box(const CellBlock& block) const {
  std::vector<Range> box;
  for (std::size_t d = 0; d < params_.size(); ++d) {
    box.push_back({edges_[d][block.first[d]], edges_[d][block.last[d] + 1]});
  }
  return box;
}

BelPl bel_pl_of_threshold(const EvidenceStructure& s, const BoxBounder& bounder, double v) {
  BelPl out;
  const std::uint64_t n = s.element_count();
  for (std::uint64_t i = 0; i < n; ++i) {
    const FocalElement e = s.element(i);
    const Bounds b = bounder(e.unit_box);
    if (b.max <= v) out.bel += e.bpa;
    if (b.min <= v) out.pl += e.bpa;
  }
  return out;
}

namespace {

bool single(const CellBlock& b) {
  for (std::size_t d = 0; d < b.first.size(); ++d) {
    if (b.first[d] != b.last[d]) return false;
  }
  return true;
}

// Halve the block along the dimension spanning the most cells.
std::pair<CellBlock, CellBlock> split(const CellBlock& b) {
  std::size_t dim = 0;
  std::size_t widest = 0;
  for (std::size_t d = 0; d < b.first.size(); ++d) {
    const std::size_t w = b.last[d] - b.first[d];
    if (w > widest) {
      widest = w;
      dim = d;
    }
  }
  const std::size_t mid = b.first[dim] + (b.last[dim] - b.first[dim]) / 2;
  CellBlock lo = b;
  CellBlock hi = b;
  lo.last[dim] = mid;
  hi.first[dim] = mid + 1;
  return {lo, hi};
}

std::vector<std::size_t> key_of(const CellBlock& b) {
  std::vector<std::size_t> k(b.first);
  k.insert(k.end(), b.last.begin(), b.last.end());
  return k;
}

}  // namespace

BeliefCurve bel_pl_curve(const EvidenceStructure& s, const BoxBounder& bounder,
                         const CurveOptions& opts) {
  if (opts.n_v < 2) throw std::invalid_argument("bel_pl_curve: need at least two thresholds");
  std::map<std::vector<std::size_t>, Bounds> cache;
  auto bounds_of = [&](const CellBlock& b) {
    const auto key = key_of(b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Bounds r = bounder(s.unit_box(b));
    cache.emplace(key, r);
    return r;
  };

  const CellBlock root = s.whole();
  const Bounds global = bounds_of(root);
  std::vector<CellBlock> initial;
  if (single(root)) {
    initial.push_back(root);
  } else {
    auto [a, b] = split(root);
    initial = {a, b};
  }

  BeliefCurve curve;
  curve.v_min = global.min;
  curve.v_max = global.max;
  // Block estimates may reach outside the root estimate when the bounder is
  // inexact; widen the threshold range and redo until it covers them.
  for (int pass = 0; pass < 8; ++pass) {
    curve.v.assign(opts.n_v, 0.0);
    curve.bel.assign(opts.n_v, 0.0);
    curve.pl.assign(opts.n_v, 0.0);
    curve.partial = false;
    for (int j = 0; j < opts.n_v; ++j) {
      const double v = j + 1 == opts.n_v
                           ? curve.v_max
                           : curve.v_min + (curve.v_max - curve.v_min) * j / (opts.n_v - 1);
      curve.v[j] = v;
      std::vector<CellBlock> stack = initial;
      while (!stack.empty()) {
        const CellBlock blk = std::move(stack.back());
        stack.pop_back();
        const Bounds b = bounds_of(blk);
        const double m = s.bpa(blk);
        if (b.max <= v) {
          curve.bel[j] += m;
          curve.pl[j] += m;
        } else if (b.min <= v) {
          if (single(blk) || m < opts.bpa_floor) {
            curve.pl[j] += m;
          } else if (cache.size() >= opts.max_partitions) {
            curve.pl[j] += m;
            curve.partial = true;
          } else {
            auto [lo, hi] = split(blk);
            stack.push_back(std::move(lo));
            stack.push_back(std::move(hi));
          }
        }
      }
      curve.bel[j] = std::min(curve.bel[j], 1.0);
      curve.pl[j] = std::min(curve.pl[j], 1.0);
    }
    double lo = curve.v_min;
    double hi = curve.v_max;
    for (const auto& [k, b] : cache) {
      lo = std::min(lo, b.min);
      hi = std::max(hi, b.max);
    }
    if (lo == curve.v_min && hi == curve.v_max) break;
    curve.v_min = lo;
    curve.v_max = hi;
  }
  // Each threshold sums a different partition, so neighbouring values can
  // differ by an ulp in the wrong direction.
  for (std::size_t j = 1; j < curve.v.size(); ++j) {
    curve.bel[j] = std::max(curve.bel[j], curve.bel[j - 1]);
    curve.pl[j] = std::max(curve.pl[j], curve.pl[j - 1]);
  }
  curve.boxes_solved = cache.size();
  return curve;
}

DualityReport duality_check(double bel_a, double pl_a, double bel_not_a, double pl_not_a,
                            double tol) {
  DualityReport r;
  auto fail = [&](const char* what) {
    r.ok = false;
    if (!r.failed.empty()) r.failed += "; ";
    r.failed += what;
  };
  if (bel_a + bel_not_a > 1.0 + tol) fail("Bel(A) + Bel(not A) <= 1");
  if (pl_a + pl_not_a < 1.0 - tol) fail("Pl(A) + Pl(not A) >= 1");
  if (std::abs(bel_a + pl_not_a - 1.0) > tol) fail("Bel(A) + Pl(not A) = 1");
  return r;
}

}  // namespace deflect
