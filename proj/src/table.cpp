#include "ctab/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <utility>

namespace ctab {

namespace {

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == '=' || c == '#' || std::isspace(static_cast<unsigned char>(c)))
      return false;
  }
  return true;
}

void validate_specs(const std::vector<VariableSpec>& vars) {
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (!valid_label(v.name)) {
      throw error(errc::duplicate_name,
                  "variable name '" + v.name + "' is not a valid identifier");
    }
    if (!names.insert(v.name).second) {
      throw error(errc::duplicate_name, "variable '" + v.name + "' declared twice");
    }
    if (v.states.size() < 2) {
      throw error(errc::duplicate_state,
                  "variable '" + v.name + "' needs at least two states");
    }
    std::set<std::string> states;
    for (const auto& s : v.states) {
      if (!valid_label(s)) {
        throw error(errc::duplicate_state,
                    "state '" + s + "' of variable '" + v.name + "' is not a valid label");
      }
      if (!states.insert(s).second) {
        throw error(errc::duplicate_state,
                    "variable '" + v.name + "' repeats state '" + s + "'");
      }
    }
  }
}

}  // namespace

JointTable::JointTable(std::vector<VariableSpec> variables,
                       std::vector<double> cells)
    : vars_(std::move(variables)), cells_(std::move(cells)) {
  validate_specs(vars_);

  std::vector<std::size_t> cards;
  cards.reserve(vars_.size());
  for (const auto& v : vars_) cards.push_back(v.states.size());
  shape_ = kernels::Shape::of(cards);

  if (cells_.size() != shape_.size) {
    throw error(errc::wrong_cell_count,
                "expected " + std::to_string(shape_.size) + " cells, got " +
                    std::to_string(cells_.size()));
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!(cells_[i] >= 0.0) || !std::isfinite(cells_[i])) {
      throw error(errc::negative_cell,
                  "cell " + std::to_string(i) + " is negative or not finite");
    }
  }
  const double mass = kernels::total_mass(cells_);
  if (std::abs(mass - 1.0) > mass_tolerance) {
    throw error(errc::mass_out_of_tolerance,
                "cell mass " + std::to_string(mass) + " deviates from 1 by more than " +
                    std::to_string(mass_tolerance));
  }
  scale_ = 1.0 / mass;
  if (scale_ != 1.0) kernels::scale(cells_, scale_);
}

bool JointTable::has_variable(std::string_view name) const noexcept {
  for (const auto& v : vars_) {
    if (v.name == name) return true;
  }
  return false;
}

std::size_t JointTable::variable_index(std::string_view name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].name == name) return i;
  }
  throw error(errc::unknown_variable, "no variable named '" + std::string(name) + "'");
}

std::size_t JointTable::state_index(std::size_t var, std::string_view state) const {
  const auto& states = vars_[var].states;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == state) return i;
  }
  throw error(errc::unknown_state, "variable '" + vars_[var].name +
                                       "' has no state '" + std::string(state) + "'");
}

std::size_t JointTable::index_of(const Assignment& total) const {
  if (total.size() != vars_.size()) {
    for (const auto& [name, state] : total) variable_index(name);
    for (const auto& v : vars_) {
      if (!total.count(v.name)) {
        throw error(errc::unknown_variable,
                    "assignment is missing variable '" + v.name + "'");
      }
    }
  }
  std::size_t idx = 0;
  for (const auto& [name, state] : total) {
    const std::size_t v = variable_index(name);
    idx += state_index(v, state) * shape_.strides[v];
  }
  return idx;
}

JointTable marginalize(const JointTable& t, const std::vector<std::string>& keep) {
  if (keep.empty()) {
    throw error(errc::empty_keep_set, "marginalize needs at least one variable to keep");
  }
  std::set<std::size_t> axes;
  for (const auto& name : keep) axes.insert(t.variable_index(name));
  const std::vector<std::size_t> keep_axes(axes.begin(), axes.end());

  std::vector<VariableSpec> kept;
  std::size_t out_size = 1;
  for (std::size_t a : keep_axes) {
    kept.push_back(t.variables()[a]);
    out_size *= t.shape().cards[a];
  }
  std::vector<double> out(out_size);
  kernels::keep_marginal(t.cells(), t.shape(), keep_axes, out);
  return JointTable(std::move(kept), std::move(out));
}

JointTable condition(const JointTable& t, const Assignment& hard) {
  if (hard.empty()) return t;

  std::vector<kernels::AxisState> fixed;
  fixed.reserve(hard.size());
  for (const auto& [name, state] : hard) {
    const std::size_t v = t.variable_index(name);
    fixed.emplace_back(v, t.state_index(v, state));
  }
  std::sort(fixed.begin(), fixed.end());

  std::vector<VariableSpec> rest;
  std::size_t out_size = 1;
  std::size_t f = 0;
  for (std::size_t a = 0; a < t.rank(); ++a) {
    if (f < fixed.size() && fixed[f].first == a) {
      ++f;
      continue;
    }
    rest.push_back(t.variables()[a]);
    out_size *= t.shape().cards[a];
  }

  std::vector<double> slice(out_size);
  kernels::gather_slice(t.cells(), t.shape(), fixed, slice);
  const double mass = kernels::total_mass(slice);
  if (mass <= 0.0) {
    throw error(errc::zero_probability_evidence,
                "conditioning event has probability zero");
  }
  kernels::scale(slice, 1.0 / mass);
  return JointTable(std::move(rest), std::move(slice));
}

std::vector<double> marginal_dist(const JointTable& t, std::string_view var) {
  const std::size_t axis = t.variable_index(var);
  std::vector<double> out(t.shape().cards[axis]);
  kernels::axis_marginal(t.cells(), t.shape(), axis, out);
  return out;
}

namespace {

void require_all_positive(const JointTable& t) {
  for (double c : t.cells()) {
    if (c <= 0.0) {
      throw error(errc::zero_cell, "odds ratios are undefined on zero cells");
    }
  }
}

}  // namespace

double pairwise_odds_ratio(const JointTable& t) {
  if (t.rank() != 2 || t.shape().cards[0] != 2 || t.shape().cards[1] != 2) {
    throw error(errc::not_two_by_two, "expected a table over two binary variables");
  }
  require_all_positive(t);
  const auto c = t.cells();
  return (c[0] * c[3]) / (c[1] * c[2]);
}

std::vector<std::vector<double>> local_odds_ratios(const JointTable& t,
                                                   std::string_view var_a,
                                                   std::string_view var_b) {
  const std::size_t a = t.variable_index(var_a);
  const std::size_t b = t.variable_index(var_b);
  if (t.rank() != 2 || a == b) {
    throw error(errc::not_two_by_two,
                "expected a table over exactly the two requested variables");
  }
  require_all_positive(t);

  const auto& shape = t.shape();
  const auto c = t.cells();
  auto cell = [&](std::size_t i, std::size_t j) {
    return c[i * shape.strides[a] + j * shape.strides[b]];
  };
  const std::size_t ca = shape.cards[a];
  const std::size_t cb = shape.cards[b];
  std::vector<std::vector<double>> ratios(ca - 1, std::vector<double>(cb - 1));
  for (std::size_t i = 1; i < ca; ++i) {
    for (std::size_t j = 1; j < cb; ++j) {
      ratios[i - 1][j - 1] = (cell(0, 0) * cell(i, j)) / (cell(0, j) * cell(i, 0));
    }
  }
  return ratios;
}

namespace {

void require_two_cubed(const JointTable& t) {
  if (t.rank() != 3 || t.shape().cards[0] != 2 || t.shape().cards[1] != 2 ||
      t.shape().cards[2] != 2) {
    throw error(errc::not_two_cubed, "expected a table over three binary variables");
  }
}

}  // namespace

double threeway_odds_ratio(const JointTable& t) {
  require_two_cubed(t);
  require_all_positive(t);
  const auto c = t.cells();
  auto p = [&](std::size_t i, std::size_t j, std::size_t k) {
    return c[i * 4 + j * 2 + k];
  };
  return (p(0, 0, 0) * p(1, 1, 0) * p(1, 0, 1) * p(0, 1, 1)) /
         (p(1, 0, 0) * p(0, 1, 0) * p(0, 0, 1) * p(1, 1, 1));
}

double layered_odds_ratio_product(const JointTable& t, std::string_view var_a,
                                  std::string_view var_b,
                                  std::string_view layer) {
  require_two_cubed(t);
  require_all_positive(t);
  const std::size_t a = t.variable_index(var_a);
  const std::size_t b = t.variable_index(var_b);
  const std::size_t l = t.variable_index(layer);
  if (a == b || a == l || b == l) {
    throw error(errc::not_two_cubed, "the three variables must be distinct");
  }
  const auto& shape = t.shape();
  const auto c = t.cells();
  auto cell = [&](std::size_t i, std::size_t j, std::size_t s) {
    return c[i * shape.strides[a] + j * shape.strides[b] + s * shape.strides[l]];
  };
  double product = 1.0;
  for (std::size_t s = 0; s < 2; ++s) {
    product *= (cell(0, 0, s) * cell(1, 1, s)) / (cell(0, 1, s) * cell(1, 0, s));
  }
  return product;
}

}  // namespace ctab
