#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctab/errors.hpp"
#include "ctab/kernels.hpp"

namespace ctab {

// A named discrete variable with an ordered list of at least two states.
struct VariableSpec {
  std::string name;
  std::vector<std::string> states;
};

// Partial or total map from variable name to state label.
using Assignment = std::map<std::string, std::string>;

// Dense joint probability table over an ordered variable list. Cells are
// stored row-major in declaration order, last variable fastest. Construction
// validates and rescales the mass to exactly 1; instances are immutable and
// safe to share across threads.
class JointTable {
 public:
  // Input mass may deviate from 1 by at most mass_tolerance before
  // construction fails.
  static constexpr double mass_tolerance = 1e-6;

  JointTable(std::vector<VariableSpec> variables, std::vector<double> cells);

  const std::vector<VariableSpec>& variables() const noexcept { return vars_; }
  std::size_t rank() const noexcept { return vars_.size(); }
  std::span<const double> cells() const noexcept { return cells_; }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  const kernels::Shape& shape() const noexcept { return shape_; }

  // Factor the construction rescaled the raw cells by (1 / input mass).
  double normalization_scale() const noexcept { return scale_; }

  bool has_variable(std::string_view name) const noexcept;
  std::size_t variable_index(std::string_view name) const;
  std::size_t state_index(std::size_t var, std::string_view state) const;

  // Flat index of a total assignment.
  std::size_t index_of(const Assignment& total) const;
  double at(const Assignment& total) const { return cells_[index_of(total)]; }

 private:
  std::vector<VariableSpec> vars_;
  kernels::Shape shape_;
  std::vector<double> cells_;
  double scale_ = 1.0;
};

// Sums out every variable not in `keep`; the kept variables retain their
// relative order from t. Mass is preserved.
JointTable marginalize(const JointTable& t, const std::vector<std::string>& keep);

// Restricts t to the slice consistent with `hard` and renormalizes,
// returning a table over the unassigned variables.
JointTable condition(const JointTable& t, const Assignment& hard);

// Distribution of one variable, in declared state order.
std::vector<double> marginal_dist(const JointTable& t, std::string_view var);

// Cross-product ratio (p11*p22)/(p12*p21) of a table over exactly two
// binary variables, states taken in declared order.
double pairwise_odds_ratio(const JointTable& t);

// Reference-cell cross-product ratios of a two-variable table: entry
// (i-1, j-1) is the 2x2 ratio of the subtable {first, i} x {first, j}.
// Dimensions (|A|-1) x (|B|-1).
std::vector<std::vector<double>> local_odds_ratios(const JointTable& t,
                                                   std::string_view var_a,
                                                   std::string_view var_b);

// Three-way association of a 2x2x2 table: the ratio of the pairwise odds
// ratios of the first two variables across the layers of the third.
double threeway_odds_ratio(const JointTable& t);

// Product (rather than ratio) of the layer-conditional pairwise odds ratios
// of (var_a, var_b) across the states of `layer`; all three binary.
double layered_odds_ratio_product(const JointTable& t, std::string_view var_a,
                                  std::string_view var_b,
                                  std::string_view layer);

}  // namespace ctab
