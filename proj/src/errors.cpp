#include "ctab/errors.hpp"

namespace ctab {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::negative_cell: return "NegativeCell";
    case errc::wrong_cell_count: return "WrongCellCount";
    case errc::mass_out_of_tolerance: return "MassOutOfTolerance";
    case errc::duplicate_name: return "DuplicateName";
    case errc::duplicate_state: return "DuplicateState";
    case errc::unknown_variable: return "UnknownVariable";
    case errc::unknown_state: return "UnknownState";
    case errc::empty_keep_set: return "EmptyKeepSet";
    case errc::zero_probability_evidence: return "ZeroProbabilityEvidence";
    case errc::not_two_by_two: return "NotTwoByTwo";
    case errc::not_two_cubed: return "NotTwoCubed";
    case errc::zero_cell: return "ZeroCell";
    case errc::invalid_targets: return "InvalidTargets";
    case errc::target_unreachable: return "TargetUnreachable";
    case errc::target_in_evidence: return "TargetInEvidence";
    case errc::no_soft_evidence: return "NoSoftEvidence";
    case errc::duplicate_cell: return "DuplicateCell";
    case errc::no_feasible_root: return "NoFeasibleRoot";
    case errc::empty_feasible_set: return "EmptyFeasibleSet";
  }
  return "UnknownError";
}

}  // namespace ctab
