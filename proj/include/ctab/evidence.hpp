#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace ctab {

// Evidence on one variable: either a known state or a revised marginal
// distribution over its states (declared order). Variables absent from the
// map carry no information.
struct HardEvidence {
  std::string state;
};

struct SoftEvidence {
  std::vector<double> distribution;
};

using EvidenceValue = std::variant<HardEvidence, SoftEvidence>;

struct Evidence {
  std::map<std::string, EvidenceValue> entries;

  Evidence& hard(std::string var, std::string state) {
    entries.insert_or_assign(std::move(var), HardEvidence{std::move(state)});
    return *this;
  }
  Evidence& soft(std::string var, std::vector<double> distribution) {
    entries.insert_or_assign(std::move(var), SoftEvidence{std::move(distribution)});
    return *this;
  }
  bool empty() const noexcept { return entries.empty(); }
};

}  // namespace ctab
