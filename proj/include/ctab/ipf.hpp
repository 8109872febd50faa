#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ctab/table.hpp"

namespace ctab {

// Target marginal distribution per variable, one probability per state in
// declared order. Each distribution must sum to 1 within 1e-9.
using MarginalTargets = std::map<std::string, std::vector<double>>;

struct IpfConfig {
  // Largest tolerated |target - achieved| over all constrained marginal
  // entries at convergence.
  double tolerance = 1e-10;
  // Full passes over the constrained variables before giving up.
  std::size_t max_cycles = 10000;
};

struct IpfReport {
  bool converged = false;
  std::size_t cycles_used = 0;
  double max_residual = 0.0;
};

// One full fitting pass: for each constrained variable in table declaration
// order, rescales every cell by target(state) / current_marginal(state).
// Cells whose marginal entry and target are both zero stay zero; a zero
// marginal entry under a positive target raises TargetUnreachable.
JointTable fit_cycle(const JointTable& current, const MarginalTargets& targets);

// Iterative proportional fitting: repeats fit_cycle until every constrained
// marginal is within config.tolerance of its target or max_cycles is
// exhausted. All cross-product ratios of strictly positive start cells are
// preserved; structural zeros stay zero. On non-convergence the partial
// table is still returned, with report.converged == false.
std::pair<JointTable, IpfReport> ipf_adjust(const JointTable& start,
                                            const MarginalTargets& targets,
                                            const IpfConfig& config = {});

// Shared validation for target maps (also used by the evidence pipeline):
// variables exist, entry counts match, entries lie in [0,1], sums are 1
// within 1e-9, and the map is nonempty.
void validate_targets(const JointTable& t, const MarginalTargets& targets);
void validate_target_dist(const JointTable& t, const std::string& name,
                          const std::vector<double>& dist);

}  // namespace ctab
