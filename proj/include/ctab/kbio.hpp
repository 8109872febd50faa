#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ctab/table.hpp"

namespace ctab {

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string message;
  std::size_t line = 0;  // 1-based line in the source text
};

struct KbCell {
  Assignment assignment;  // total over the declared variables
  double probability = 0.0;
  std::size_t line = 0;  // 0 for cells defaulted to zero
};

// Parsed knowledge-base file: declared variables plus one entry per cell of
// the joint table (unspecified cells are materialized as zeros).
struct KbDocument {
  std::vector<VariableSpec> variables;
  std::vector<KbCell> cells;
};

struct ParseResult {
  KbDocument document;
  std::vector<Diagnostic> diagnostics;

  bool ok() const noexcept {
    for (const auto& d : diagnostics) {
      if (d.severity == Diagnostic::Severity::error) return false;
    }
    return true;
  }
};

// Line-oriented grammar: `variable <name> <state1> <state2> [...]` declares
// a variable (declaration order fixes the cell layout), `p <var>=<state>
// ... <probability>` gives one total assignment, `#` starts a comment.
// Unspecified cells default to 0 with a single aggregated warning.
ParseResult parse_kb(std::string_view text);

// Builds the joint table from a document with no error diagnostics. Cell
// layout follows declared variable order regardless of file line order.
JointTable to_table(const KbDocument& doc);

// Canonical text form: declarations, then one `p` line per cell in layout
// order at 17 significant digits. Parsing the output reproduces the table.
std::string serialize_kb(const JointTable& t);

}  // namespace ctab
