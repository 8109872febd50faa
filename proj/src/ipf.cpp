#include "ctab/ipf.hpp"

#include <algorithm>
#include <cmath>

namespace ctab {

void validate_target_dist(const JointTable& t, const std::string& name,
                          const std::vector<double>& dist) {
  const std::size_t axis = t.variable_index(name);
  if (dist.size() != t.shape().cards[axis]) {
    throw error(errc::invalid_targets,
                "target for '" + name + "' has " + std::to_string(dist.size()) +
                    " entries, variable has " +
                    std::to_string(t.shape().cards[axis]) + " states");
  }
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p)) {
      throw error(errc::invalid_targets,
                  "target entries for '" + name + "' must lie in [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw error(errc::invalid_targets,
                "target for '" + name + "' sums to " + std::to_string(sum));
  }
}

void validate_targets(const JointTable& t, const MarginalTargets& targets) {
  if (targets.empty()) {
    throw error(errc::invalid_targets, "no target marginals given");
  }
  for (const auto& [name, dist] : targets) {
    validate_target_dist(t, name, dist);
  }
}

namespace {

// Constrained axes in table declaration order, paired with their targets.
std::vector<std::pair<std::size_t, const std::vector<double>*>> fit_order(
    const JointTable& t, const MarginalTargets& targets) {
  std::vector<std::pair<std::size_t, const std::vector<double>*>> order;
  order.reserve(targets.size());
  for (std::size_t axis = 0; axis < t.rank(); ++axis) {
    auto it = targets.find(t.variables()[axis].name);
    if (it != targets.end()) order.emplace_back(axis, &it->second);
  }
  return order;
}

// Rescales cells in place along one axis. Throws when a positive target
// sits on an empty marginal entry.
void fit_axis(std::vector<double>& cells, const kernels::Shape& shape,
              std::size_t axis, const std::vector<double>& target,
              const std::string& name) {
  const std::size_t card = shape.cards[axis];
  std::vector<double> current(card);
  kernels::axis_marginal(cells, shape, axis, current);

  std::vector<double> factors(card);
  for (std::size_t s = 0; s < card; ++s) {
    if (current[s] > 0.0) {
      factors[s] = target[s] / current[s];
    } else if (target[s] == 0.0) {
      factors[s] = 0.0;
    } else {
      throw error(errc::target_unreachable,
                  "state '" + std::string(name) + "' entry " + std::to_string(s) +
                      " has target " + std::to_string(target[s]) +
                      " but no supporting probability mass");
    }
  }
  kernels::axis_scale(cells, shape, axis, factors);
}

double max_marginal_residual(
    const std::vector<double>& cells, const kernels::Shape& shape,
    const std::vector<std::pair<std::size_t, const std::vector<double>*>>& order) {
  double worst = 0.0;
  for (const auto& [axis, target] : order) {
    std::vector<double> current(shape.cards[axis]);
    kernels::axis_marginal(cells, shape, axis, current);
    for (std::size_t s = 0; s < current.size(); ++s) {
      worst = std::max(worst, std::abs(current[s] - (*target)[s]));
    }
  }
  return worst;
}

}  // namespace

JointTable fit_cycle(const JointTable& current, const MarginalTargets& targets) {
  validate_targets(current, targets);
  const auto order = fit_order(current, targets);
  std::vector<double> cells(current.cells().begin(), current.cells().end());
  for (const auto& [axis, target] : order) {
    fit_axis(cells, current.shape(), axis, *target, current.variables()[axis].name);
  }
  return JointTable(current.variables(), std::move(cells));
}

std::pair<JointTable, IpfReport> ipf_adjust(const JointTable& start,
                                            const MarginalTargets& targets,
                                            const IpfConfig& config) {
  if (!(config.tolerance > 0.0) || config.max_cycles < 1) {
    throw error(errc::invalid_targets,
                "config needs a positive tolerance and at least one cycle");
  }
  validate_targets(start, targets);
  const auto order = fit_order(start, targets);
  const auto& shape = start.shape();

  // Unreachable targets are detectable from the start table: a positive
  // target entry whose supporting cells are all zero can never be fitted.
  for (const auto& [axis, target] : order) {
    std::vector<double> current(shape.cards[axis]);
    kernels::axis_marginal(start.cells(), shape, axis, current);
    for (std::size_t s = 0; s < current.size(); ++s) {
      if (current[s] == 0.0 && (*target)[s] > 0.0) {
        throw error(errc::target_unreachable,
                    "state '" + start.variables()[axis].name + "=" +
                        start.variables()[axis].states[s] + "' has target " +
                        std::to_string((*target)[s]) +
                        " but zero mass in the start table");
      }
    }
  }

  std::vector<double> cells(start.cells().begin(), start.cells().end());
  IpfReport report;
  while (report.cycles_used < config.max_cycles) {
    for (const auto& [axis, target] : order) {
      fit_axis(cells, shape, axis, *target, start.variables()[axis].name);
    }
    ++report.cycles_used;
    report.max_residual = max_marginal_residual(cells, shape, order);
    if (report.max_residual <= config.tolerance) {
      report.converged = true;
      break;
    }
  }
  return {JointTable(start.variables(), std::move(cells)), report};
}

}  // namespace ctab
