#pragma once

// Dempster-Shafer description of the epistemic uncertainty: interval
// opinions with basic probability assignments, their fusion across
// experts, focal elements over the full parameter space, and Belief /
// Plausibility of the proposition "objective <= v".
//
// The focal elements are laid out in the unit hypercube: along every
// dimension the intervals of that parameter become contiguous cells whose
// widths equal their BPAs, so the cells tile [0, 1]^d without overlap.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace deflect {

class EvidenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UncertainInterval {
  double lo = 0.0;
  double hi = 0.0;
  double bpa = 0.0;
};

struct ParameterBPA {
  std::string name;
  std::vector<UncertainInterval> intervals;

  /// Throws EvidenceError on lo > hi, bpa outside (0, 1] or a sum off 1.
  void validate(double tol = 1e-9) const;
};

/// One expert's opinions; parameters the expert did not address are absent.
struct ExpertOpinion {
  std::string id;
  double weight = 1.0;
  std::map<std::string, std::vector<UncertainInterval>> parameters;
};

/// Weighted average of the experts' lower-triangular interval matrices.
/// Experts that did not address the parameter are left out of the average.
ParameterBPA fuse_experts(const std::vector<ExpertOpinion>& opinions,
                          const std::string& parameter);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct FocalElement {
  std::vector<std::size_t> index;  // interval index per dimension
  std::vector<Range> box;          // physical bounds
  std::vector<Range> unit_box;     // cell in the unit hypercube
  double bpa = 0.0;
};

/// Index ranges [first, last] per dimension: a union of focal elements that
/// is itself a box in the unit hypercube.
struct CellBlock {
  std::vector<std::size_t> first;
  std::vector<std::size_t> last;
};

class EvidenceStructure {
 public:
  explicit EvidenceStructure(std::vector<ParameterBPA> params);

  std::size_t dimension() const { return params_.size(); }
  const std::vector<ParameterBPA>& parameters() const { return params_; }

  /// Number of focal elements (product of the interval counts).
  std::uint64_t element_count() const;

  /// Element with the given mixed-radix index (first dimension fastest).
  FocalElement element(std::uint64_t flat) const;

  /// All focal elements; throws EvidenceError above max_elements.
  std::vector<FocalElement> build_focal_elements(std::uint64_t max_elements = 10'000'000) const;

  /// Piecewise-affine map from the unit hypercube to physical values. A
  /// coordinate on a cell boundary belongs to the lower-indexed cell.
  std::vector<double> unit_to_physical(const std::vector<double>& unit) const;

  /// A unit point mapping to the given physical values, using for each
  /// dimension the first interval that contains the value. Empty if some
  /// value lies outside every interval of its parameter.
  std::vector<double> physical_to_unit(const std::vector<double>& physical) const;

  /// Cell index holding unit coordinate x along dimension dim.
  std::size_t cell_of(std::size_t dim, double x) const;

  /// Cell edges along a dimension: edges[k] .. edges[k+1] is interval k.
  const std::vector<double>& edges(std::size_t dim) const { return edges_[dim]; }

  CellBlock whole() const;
  double bpa(const CellBlock& block) const;
  std::vector<Range> unit_box(const CellBlock& block) const;

 private:
  std::vector<ParameterBPA> params_;
  std::vector<std::vector<double>> edges_;
};

/// Build focal elements from a list of parameter structures.
std::vector<FocalElement> build_focal_elements(const std::vector<ParameterBPA>& params,
                                               std::uint64_t max_elements = 10'000'000);

/// Lower and upper bound of the objective over a box of the unit hypercube.
struct Bounds {
  double min = 0.0;
  double max = 0.0;
};
using BoxBounder = std::function<Bounds(const std::vector<Range>& unit_box)>;

struct BelPl {
  double bel = 0.0;
  double pl = 0.0;
};

/// Bel and Pl of "f <= v" by visiting every focal element.
BelPl bel_pl_of_threshold(const EvidenceStructure& s, const BoxBounder& bounder, double v);

struct CurveOptions {
  int n_v = 50;
  double bpa_floor = 1e-4;          // straddling blocks lighter than this are not split
  std::size_t max_partitions = 100000;
};

struct BeliefCurve {
  std::vector<double> v;
  std::vector<double> bel;
  std::vector<double> pl;
  double v_min = 0.0;
  double v_max = 0.0;
  bool partial = false;         // partition cap reached somewhere
  std::size_t boxes_solved = 0;  // distinct blocks bounded
};

/// Bel/Pl curve by recursive bisection of the unit hypercube along focal
/// boundaries. Block bounds are cached across thresholds. Blocks lighter
/// than bpa_floor, or met after the partition cap, are left unsplit and
/// count toward Pl only.
BeliefCurve bel_pl_curve(const EvidenceStructure& s, const BoxBounder& bounder,
                         const CurveOptions& opts = {});

struct DualityReport {
  bool ok = true;
  std::string failed;  // names of the violated relations
};

/// Relations between a proposition A and its complement.
DualityReport duality_check(double bel_a, double pl_a, double bel_not_a, double pl_not_a,
                            double tol = 1e-9);

}  // namespace deflect
