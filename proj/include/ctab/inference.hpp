#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctab/evidence.hpp"
#include "ctab/ipf.hpp"
#include "ctab/table.hpp"

namespace ctab {

enum class QueryMethod { prior, hard_only, odds_ratio, independence };

const char* query_method_name(QueryMethod m) noexcept;

struct QueryResult {
  std::vector<double> posterior;  // over target states, declared order
  std::optional<IpfReport> ipf;   // present when soft evidence was fitted
  QueryMethod method = QueryMethod::prior;
};

// Posterior over `target` given mixed evidence. Hard evidence is applied by
// exact conditioning; soft evidence is propagated by fitting the evidence
// subtable to the revised marginals (preserving its odds ratios) and mixing
// the original conditionals with the adjusted joint weights. A
// non-converged fit is reported through result.ipf, not thrown.
QueryResult posterior(const JointTable& t, const Evidence& ev,
                      std::string_view target, const IpfConfig& config = {});

// Same pipeline, but the adjusted joint is replaced by the product of the
// soft marginals. Exact only when the evidence variables are independent;
// kept as the comparison baseline.
QueryResult posterior_independent(const JointTable& t, const Evidence& ev,
                                  std::string_view target);

// Conditions on the hard evidence and marginalizes onto the soft-evidence
// variables: the table the fitting step operates on.
JointTable evidence_subtable(const JointTable& t, const Evidence& ev);

}  // namespace ctab
