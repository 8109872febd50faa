#pragma once

#include <stdexcept>
#include <string>

namespace ctab {

// Failure codes for table construction, probability operations, fitting,
// and evidence handling. Every ctab::error carries exactly one of these.
enum class errc {
  negative_cell,
  wrong_cell_count,
  mass_out_of_tolerance,
  duplicate_name,
  duplicate_state,
  unknown_variable,
  unknown_state,
  empty_keep_set,
  zero_probability_evidence,
  not_two_by_two,
  not_two_cubed,
  zero_cell,
  invalid_targets,
  target_unreachable,
  target_in_evidence,
  no_soft_evidence,
  duplicate_cell,
  no_feasible_root,
  empty_feasible_set,
};

const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace ctab
