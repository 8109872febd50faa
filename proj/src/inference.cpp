#include "ctab/inference.hpp"

#include <cmath>
#include <utility>

namespace ctab {

const char* query_method_name(QueryMethod m) noexcept {
  switch (m) {
    case QueryMethod::prior: return "prior";
    case QueryMethod::hard_only: return "hard-only";
    case QueryMethod::odds_ratio: return "odds-ratio";
    case QueryMethod::independence: return "independence";
  }
  return "unknown";
}

namespace {

struct PreparedEvidence {
  Assignment hard;
  MarginalTargets soft;
};

// Validates evidence against the table and splits it into hard assignments
// and soft targets. Degenerate soft distributions (an entry of 1) become
// hard evidence so the exact conditioning path handles them.
PreparedEvidence prepare(const JointTable& t, const Evidence& ev,
                         const std::string* target) {
  PreparedEvidence out;
  for (const auto& [name, value] : ev.entries) {
    if (target && name == *target) {
      throw error(errc::target_in_evidence,
                  "'" + name + "' is the query target and carries evidence");
    }
    const std::size_t axis = t.variable_index(name);
    if (const auto* h = std::get_if<HardEvidence>(&value)) {
      t.state_index(axis, h->state);
      out.hard[name] = h->state;
      continue;
    }
    const auto& dist = std::get<SoftEvidence>(value).distribution;
    validate_target_dist(t, name, dist);
    bool degenerate = false;
    for (std::size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] >= 1.0) {
        out.hard[name] = t.variables()[axis].states[s];
        degenerate = true;
        break;
      }
    }
    if (!degenerate) out.soft[name] = dist;
  }
  return out;
}

// Variables of the conditioned table to keep in the mixing table: the soft
// variables plus the target, in table order.
std::vector<std::string> soft_names(const PreparedEvidence& prep) {
  std::vector<std::string> names;
  names.reserve(prep.soft.size());
  for (const auto& [name, dist] : prep.soft) names.push_back(name);
  return names;
}

// Total-probability mixture: for each target state, sums conditional
// probability times adjusted configuration weight over all soft-evidence
// configurations. Configurations with zero prior mass carry zero adjusted
// weight and contribute nothing.
std::vector<double> mix_posterior(const JointTable& step3, const JointTable& sub,
                                  std::span<const double> weights,
                                  std::size_t target_axis) {
  const auto& s3 = step3.shape();
  const std::size_t tcard = s3.cards[target_axis];
  const std::size_t tstride = s3.strides[target_axis];
  std::vector<double> post(tcard, 0.0);
  for (std::size_t x = 0; x < sub.cell_count(); ++x) {
    const double px = sub.cells()[x];
    const double wx = weights[x];
    if (px == 0.0 || wx == 0.0) continue;
    std::size_t base = 0;
    std::size_t rem = x;
    for (std::size_t d = sub.rank(); d-- > 0;) {
      const std::size_t axis3 = d < target_axis ? d : d + 1;
      base += (rem % sub.shape().cards[d]) * s3.strides[axis3];
      rem /= sub.shape().cards[d];
    }
    for (std::size_t s = 0; s < tcard; ++s) {
      post[s] += (step3.cells()[base + s * tstride] / px) * wx;
    }
  }
  return post;
}

}  // namespace

QueryResult posterior(const JointTable& t, const Evidence& ev,
                      std::string_view target, const IpfConfig& config) {
  const std::string target_name(target);
  t.variable_index(target_name);
  const PreparedEvidence prep = prepare(t, ev, &target_name);
  const JointTable conditioned = condition(t, prep.hard);

  QueryResult result;
  if (prep.soft.empty()) {
    result.posterior = marginal_dist(conditioned, target_name);
    result.method = ev.empty() ? QueryMethod::prior : QueryMethod::hard_only;
    return result;
  }

  std::vector<std::string> keep = soft_names(prep);
  keep.push_back(target_name);
  const JointTable step3 = marginalize(conditioned, keep);
  const JointTable sub = marginalize(step3, soft_names(prep));
  auto [adjusted, report] = ipf_adjust(sub, prep.soft, config);

  result.posterior =
      mix_posterior(step3, sub, adjusted.cells(), step3.variable_index(target_name));
  result.ipf = report;
  result.method = QueryMethod::odds_ratio;
  return result;
}

QueryResult posterior_independent(const JointTable& t, const Evidence& ev,
                                  std::string_view target) {
  const std::string target_name(target);
  t.variable_index(target_name);
  const PreparedEvidence prep = prepare(t, ev, &target_name);
  const JointTable conditioned = condition(t, prep.hard);

  QueryResult result;
  if (prep.soft.empty()) {
    result.posterior = marginal_dist(conditioned, target_name);
    result.method = ev.empty() ? QueryMethod::prior : QueryMethod::hard_only;
    return result;
  }

  std::vector<std::string> keep = soft_names(prep);
  keep.push_back(target_name);
  const JointTable step3 = marginalize(conditioned, keep);
  const JointTable sub = marginalize(step3, soft_names(prep));

  // Independence shortcut: configuration weight is the product of the soft
  // marginals, ignoring the associations the table encodes.
  std::vector<double> weights(sub.cell_count());
  double unmatched = 0.0;
  for (std::size_t x = 0; x < sub.cell_count(); ++x) {
    double w = 1.0;
    std::size_t rem = x;
    for (std::size_t d = sub.rank(); d-- > 0;) {
      const auto& dist = prep.soft.at(sub.variables()[d].name);
      w *= dist[rem % sub.shape().cards[d]];
      rem /= sub.shape().cards[d];
    }
    weights[x] = w;
    if (sub.cells()[x] == 0.0) unmatched += w;
  }
  if (unmatched > 1e-9) {
    throw error(errc::target_unreachable,
                "product weights place probability " + std::to_string(unmatched) +
                    " on zero-probability evidence configurations");
  }

  result.posterior =
      mix_posterior(step3, sub, weights, step3.variable_index(target_name));
  result.method = QueryMethod::independence;
  return result;
}

JointTable evidence_subtable(const JointTable& t, const Evidence& ev) {
  const PreparedEvidence prep = prepare(t, ev, nullptr);
  if (prep.soft.empty()) {
    throw error(errc::no_soft_evidence,
                "evidence contains no soft distributions to fit");
  }
  const JointTable conditioned = condition(t, prep.hard);
  return marginalize(conditioned, soft_names(prep));
}

}  // namespace ctab
