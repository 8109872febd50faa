#include "ctab/kbio.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "ctab/kernels.hpp"

namespace ctab {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.emplace_back(line.substr(start, i - start));
  }
  return tokens;
}

struct LineScanner {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line_no = 0;

  bool next(std::string_view& line) {
    if (pos >= text.size()) return false;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    pos = end + 1;
    ++line_no;
    return true;
  }
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ParseResult run() {
    collect_variables();
    collect_cells();
    materialize_defaults();
    return {std::move(doc_), std::move(diags_)};
  }

 private:
  void err(std::size_t line, std::string message) {
    diags_.push_back({Diagnostic::Severity::error, std::move(message), line});
  }
  void warn(std::size_t line, std::string message) {
    diags_.push_back({Diagnostic::Severity::warning, std::move(message), line});
  }

  void collect_variables() {
    LineScanner scan{text_};
    std::string_view line;
    while (scan.next(line)) {
      last_line_ = scan.line_no;
      const auto tokens = tokenize(line);
      if (tokens.empty()) continue;
      if (tokens[0] != "variable") continue;
      if (tokens.size() < 4) {
        err(scan.line_no, "variable declaration needs a name and at least two states");
        continue;
      }
      VariableSpec spec{tokens[1], {tokens.begin() + 2, tokens.end()}};
      bool bad = false;
      if (spec.name.find('=') != std::string::npos) {
        err(scan.line_no, "variable name '" + spec.name + "' may not contain '='");
        bad = true;
      }
      for (const auto& other : doc_.variables) {
        if (other.name == spec.name) {
          err(scan.line_no, "variable '" + spec.name + "' already declared");
          bad = true;
        }
      }
      std::set<std::string> seen;
      for (const auto& s : spec.states) {
        if (s.find('=') != std::string::npos) {
          err(scan.line_no, "state '" + s + "' may not contain '='");
          bad = true;
        }
        if (!seen.insert(s).second) {
          err(scan.line_no, "variable '" + spec.name + "' repeats state '" + s + "'");
          bad = true;
        }
      }
      if (!bad) doc_.variables.push_back(std::move(spec));
    }
    std::vector<std::size_t> cards;
    for (const auto& v : doc_.variables) cards.push_back(v.states.size());
    shape_ = kernels::Shape::of(cards);
    if (doc_.variables.empty()) {
      err(std::max<std::size_t>(last_line_, 1), "no variables declared");
    }
  }

  void collect_cells() {
    LineScanner scan{text_};
    std::string_view line;
    while (scan.next(line)) {
      const auto tokens = tokenize(line);
      if (tokens.empty() || tokens[0] == "variable") continue;
      if (tokens[0] != "p") {
        err(scan.line_no, "unrecognized directive '" + tokens[0] + "'");
        continue;
      }
      parse_cell(tokens, scan.line_no);
    }
  }

  void parse_cell(const std::vector<std::string>& tokens, std::size_t line_no) {
    if (tokens.size() < 3) {
      err(line_no, "cell line needs at least one assignment and a probability");
      return;
    }
    const std::string& prob_token = tokens.back();
    char* endp = nullptr;
    const double prob = std::strtod(prob_token.c_str(), &endp);
    if (endp != prob_token.c_str() + prob_token.size() || prob_token.empty()) {
      err(line_no, "invalid probability '" + prob_token + "'");
      return;
    }
    if (!(prob >= 0.0 && prob <= 1.0)) {
      err(line_no, "probability " + prob_token + " outside [0,1]");
      return;
    }

    Assignment assignment;
    bool bad = false;
    for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
      const std::string& tok = tokens[i];
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
        err(line_no, "expected <variable>=<state>, got '" + tok + "'");
        bad = true;
        continue;
      }
      const std::string var = tok.substr(0, eq);
      const std::string state = tok.substr(eq + 1);
      const VariableSpec* spec = nullptr;
      for (const auto& v : doc_.variables) {
        if (v.name == var) spec = &v;
      }
      if (!spec) {
        err(line_no, "unknown variable '" + var + "'");
        bad = true;
        continue;
      }
      bool known_state = false;
      for (const auto& s : spec->states) known_state |= (s == state);
      if (!known_state) {
        err(line_no, "unknown state '" + state + "' for variable '" + var + "'");
        bad = true;
        continue;
      }
      if (!assignment.emplace(var, state).second) {
        err(line_no, "variable '" + var + "' assigned twice");
        bad = true;
      }
    }
    if (bad) return;
    for (const auto& v : doc_.variables) {
      if (!assignment.count(v.name)) {
        err(line_no, "assignment is missing variable '" + v.name + "'");
        bad = true;
      }
    }
    if (bad) return;

    const std::size_t idx = flat_index(assignment);
    if (auto it = specified_.find(idx); it != specified_.end()) {
      err(line_no, "duplicate cell (first given at line " +
                       std::to_string(it->second) + ")");
      return;
    }
    specified_.emplace(idx, line_no);
    doc_.cells.push_back({std::move(assignment), prob, line_no});
  }

  std::size_t flat_index(const Assignment& assignment) const {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < doc_.variables.size(); ++v) {
      const auto& spec = doc_.variables[v];
      const auto& state = assignment.at(spec.name);
      for (std::size_t s = 0; s < spec.states.size(); ++s) {
        if (spec.states[s] == state) {
          idx += s * shape_.strides[v];
          break;
        }
      }
    }
    return idx;
  }

  void materialize_defaults() {
    if (doc_.variables.empty()) return;
    const std::size_t total = shape_.size;
    const std::size_t missing = total - specified_.size();
    if (missing == 0) return;
    warn(last_line_, std::to_string(missing) + " of " + std::to_string(total) +
                         " cells unspecified, defaulting to 0");
    for (std::size_t idx = 0; idx < total; ++idx) {
      if (specified_.count(idx)) continue;
      Assignment assignment;
      std::size_t rem = idx;
      for (std::size_t v = doc_.variables.size(); v-- > 0;) {
        const auto& spec = doc_.variables[v];
        assignment[spec.name] = spec.states[rem % spec.states.size()];
        rem /= spec.states.size();
      }
      doc_.cells.push_back({std::move(assignment), 0.0, 0});
    }
  }

  std::string_view text_;
  KbDocument doc_;
  std::vector<Diagnostic> diags_;
  kernels::Shape shape_;
  std::map<std::size_t, std::size_t> specified_;  // flat index -> line
  std::size_t last_line_ = 0;
};

}  // namespace

ParseResult parse_kb(std::string_view text) { return Parser(text).run(); }

JointTable to_table(const KbDocument& doc) {
  std::vector<std::size_t> cards;
  for (const auto& v : doc.variables) cards.push_back(v.states.size());
  const auto shape = kernels::Shape::of(cards);

  std::vector<double> cells(shape.size, 0.0);
  for (const auto& cell : doc.cells) {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < doc.variables.size(); ++v) {
      const auto& spec = doc.variables[v];
      const auto& state = cell.assignment.at(spec.name);
      for (std::size_t s = 0; s < spec.states.size(); ++s) {
        if (spec.states[s] == state) {
          idx += s * shape.strides[v];
          break;
        }
      }
    }
    cells[idx] = cell.probability;
  }
  return JointTable(doc.variables, std::move(cells));
}

std::string serialize_kb(const JointTable& t) {
  std::ostringstream out;
  for (const auto& v : t.variables()) {
    out << "variable " << v.name;
    for (const auto& s : v.states) out << ' ' << s;
    out << '\n';
  }
  char buf[64];
  for (std::size_t idx = 0; idx < t.cell_count(); ++idx) {
    out << 'p';
    for (std::size_t v = 0; v < t.rank(); ++v) {
      const auto& spec = t.variables()[v];
      const std::size_t s = (idx / t.shape().strides[v]) % spec.states.size();
      out << ' ' << spec.name << '=' << spec.states[s];
    }
    std::snprintf(buf, sizeof(buf), "%.17g", t.cells()[idx]);
    out << ' ' << buf << '\n';
  }
  return out.str();
}

}  // namespace ctab
