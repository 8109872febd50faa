#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctab/inference.hpp"
#include "ctab/kbio.hpp"

using nlohmann::json;

namespace {

// Exit codes: 0 ok, 1 KB unreadable or invalid, 2 evidence incompatible
// with the table (unreachable target, zero-probability event, zero cell in
// an odds ratio, non-convergence), 3 bad usage or flags.
constexpr int exit_ok = 0;
constexpr int exit_kb_error = 1;
constexpr int exit_data_error = 2;
constexpr int exit_usage = 3;

int exit_code_for(const ctab::error& e) {
  switch (e.code()) {
    case ctab::errc::negative_cell:
    case ctab::errc::wrong_cell_count:
    case ctab::errc::mass_out_of_tolerance:
    case ctab::errc::duplicate_name:
    case ctab::errc::duplicate_state:
    case ctab::errc::duplicate_cell:
      return exit_kb_error;
    case ctab::errc::target_unreachable:
    case ctab::errc::zero_probability_evidence:
    case ctab::errc::zero_cell:
      return exit_data_error;
    default:
      return exit_usage;
  }
}

// KB diagnostics already reported; unwinds straight to main.
struct KbInvalid {};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt6e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6e", v);
  return buf;
}

struct Output {
  bool as_json = false;
  json doc = json::object();

  void diagnostics(const std::vector<ctab::Diagnostic>& diags) {
    auto arr = json::array();
    for (const auto& d : diags) {
      arr.push_back({{"severity", d.severity == ctab::Diagnostic::Severity::error
                                      ? "error"
                                      : "warning"},
                     {"message", d.message},
                     {"line", d.line}});
    }
    doc["diagnostics"] = arr;
  }

  void flush() {
    if (as_json) std::cout << doc.dump(2) << '\n';
  }
};

void print_diags_to_stderr(const std::vector<ctab::Diagnostic>& diags) {
  for (const auto& d : diags) {
    std::cerr << (d.severity == ctab::Diagnostic::Severity::error ? "error"
                                                                  : "warning")
              << ": line " << d.line << ": " << d.message << '\n';
  }
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(csv);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "--hard var=state"
std::pair<std::string, std::string> parse_hard_flag(const std::string& flag) {
  const std::size_t eq = flag.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size()) {
    throw CLI::ValidationError("--hard", "expected <variable>=<state>, got '" + flag + "'");
  }
  return {flag.substr(0, eq), flag.substr(eq + 1)};
}

// "--soft var=state:p,state:p[,...]" — every state must be listed once and
// the probabilities must sum to 1 within 1e-9.
std::pair<std::string, std::vector<double>> parse_soft_flag(
    const ctab::JointTable& t, const std::string& flag) {
  const std::size_t eq = flag.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size()) {
    throw CLI::ValidationError("--soft",
                               "expected <variable>=<state>:<p>[,...], got '" + flag + "'");
  }
  const std::string var = flag.substr(0, eq);
  const std::size_t axis = t.variable_index(var);
  const auto& states = t.variables()[axis].states;

  std::vector<double> dist(states.size(), -1.0);
  for (const auto& part : split_csv(flag.substr(eq + 1))) {
    const std::size_t colon = part.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == part.size()) {
      throw CLI::ValidationError("--soft", "expected <state>:<p>, got '" + part + "'");
    }
    const std::string state = part.substr(0, colon);
    const std::string ptok = part.substr(colon + 1);
    const std::size_t s = t.state_index(axis, state);
    if (dist[s] >= 0.0) {
      throw CLI::ValidationError("--soft", "state '" + state + "' listed twice");
    }
    char* endp = nullptr;
    const double p = std::strtod(ptok.c_str(), &endp);
    if (endp != ptok.c_str() + ptok.size()) {
      throw CLI::ValidationError("--soft", "invalid probability '" + ptok + "'");
    }
    dist[s] = p;
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < dist.size(); ++s) {
    if (dist[s] < 0.0) {
      throw CLI::ValidationError(
          "--soft", "state '" + states[s] + "' of '" + var + "' not listed");
    }
    sum += dist[s];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw CLI::ValidationError("--soft", "probabilities for '" + var + "' sum to " +
                                             std::to_string(sum) + ", expected 1");
  }
  return {var, dist};
}

ctab::JointTable load_table(const std::string& path, Output& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto parsed = ctab::parse_kb(buf.str());
  out.diagnostics(parsed.diagnostics);
  print_diags_to_stderr(parsed.diagnostics);
  if (!parsed.ok()) throw KbInvalid{};
  return ctab::to_table(parsed.document);
}

void print_table_cells(const ctab::JointTable& t, Output& out) {
  auto cells = json::array();
  for (std::size_t idx = 0; idx < t.cell_count(); ++idx) {
    json assignment = json::object();
    std::string line;
    for (std::size_t v = 0; v < t.rank(); ++v) {
      const auto& spec = t.variables()[v];
      const std::size_t s = (idx / t.shape().strides[v]) % spec.states.size();
      assignment[spec.name] = spec.states[s];
      if (!line.empty()) line += ' ';
      line += spec.name + "=" + spec.states[s];
    }
    if (out.as_json) {
      cells.push_back({{"assignment", assignment}, {"p", t.cells()[idx]}});
    } else {
      std::cout << line << ' ' << fmt6(t.cells()[idx]) << '\n';
    }
  }
  if (out.as_json) {
    auto vars = json::array();
    for (const auto& v : t.variables()) {
      vars.push_back({{"name", v.name}, {"states", v.states}});
    }
    out.doc["variables"] = vars;
    out.doc["cells"] = cells;
  }
}

json ipf_json(const ctab::IpfReport& report) {
  return {{"converged", report.converged},
          {"cycles_used", report.cycles_used},
          {"max_residual", report.max_residual}};
}

void print_ipf_report(const ctab::IpfReport& report, Output& out) {
  if (out.as_json) {
    out.doc["ipf"] = ipf_json(report);
  } else {
    std::cout << "converged: " << (report.converged ? "true" : "false") << '\n'
              << "cycles: " << report.cycles_used << '\n'
              << "max-residual: " << fmt6e(report.max_residual) << '\n';
  }
}

struct Args {
  std::string kb;
  std::string vars_csv;
  std::string threeway_csv;
  std::string target;
  std::vector<std::string> soft;
  std::vector<std::string> hard;
  bool independent = false;
  bool as_json = false;
  ctab::IpfConfig config;
};

ctab::Evidence build_evidence(const ctab::JointTable& t, const Args& args) {
  ctab::Evidence ev;
  for (const auto& flag : args.hard) {
    auto [var, state] = parse_hard_flag(flag);
    if (ev.entries.count(var)) {
      throw CLI::ValidationError("--hard", "variable '" + var + "' given twice");
    }
    ev.hard(var, state);
  }
  for (const auto& flag : args.soft) {
    auto [var, dist] = parse_soft_flag(t, flag);
    if (ev.entries.count(var)) {
      throw CLI::ValidationError("--soft", "variable '" + var + "' given twice");
    }
    ev.soft(var, dist);
  }
  return ev;
}

int cmd_validate(const Args& args, Output& out) {
  std::ifstream in(args.kb, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read '" << args.kb << "'\n";
    return exit_kb_error;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto parsed = ctab::parse_kb(buf.str());
  out.diagnostics(parsed.diagnostics);
  print_diags_to_stderr(parsed.diagnostics);
  if (!parsed.ok()) return exit_kb_error;

  double mass = 0.0;
  for (const auto& cell : parsed.document.cells) mass += cell.probability;
  try {
    ctab::to_table(parsed.document);
  } catch (const ctab::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_kb_error;
  }
  if (out.as_json) {
    out.doc["variables"] = parsed.document.variables.size();
    out.doc["cells"] = parsed.document.cells.size();
    out.doc["mass"] = mass;
  } else {
    std::cout << "ok: " << parsed.document.variables.size() << " variables, "
              << parsed.document.cells.size() << " cells, mass " << fmt6(mass)
              << '\n';
  }
  return exit_ok;
}

int cmd_marginalize(const Args& args, Output& out) {
  const auto t = load_table(args.kb, out);
  const auto kept = ctab::marginalize(t, split_csv(args.vars_csv));
  print_table_cells(kept, out);
  return exit_ok;
}

int cmd_condition(const Args& args, Output& out) {
  const auto t = load_table(args.kb, out);
  ctab::Assignment hard;
  for (const auto& flag : args.hard) {
    auto [var, state] = parse_hard_flag(flag);
    if (!hard.emplace(var, state).second) {
      throw CLI::ValidationError("--hard", "variable '" + var + "' given twice");
    }
  }
  print_table_cells(ctab::condition(t, hard), out);
  return exit_ok;
}

int cmd_odds_ratio(const Args& args, Output& out) {
  const auto t = load_table(args.kb, out);
  if (!args.threeway_csv.empty()) {
    const auto names = split_csv(args.threeway_csv);
    if (names.size() != 3) {
      throw CLI::ValidationError("--three-way", "expected three variable names");
    }
    const auto sub = ctab::marginalize(t, names);
    const double value = ctab::threeway_odds_ratio(sub);
    if (out.as_json) {
      out.doc["variables"] = names;
      out.doc["value"] = value;
    } else {
      std::cout << "three-way odds-ratio " << names[0] << ' ' << names[1] << ' '
                << names[2] << ": " << fmt6(value) << '\n';
    }
    return exit_ok;
  }
  const auto names = split_csv(args.vars_csv);
  if (names.size() != 2) {
    throw CLI::ValidationError("--vars", "expected two variable names");
  }
  const auto sub = ctab::marginalize(t, names);
  const auto& a = sub.variables()[sub.variable_index(names[0])];
  const auto& b = sub.variables()[sub.variable_index(names[1])];
  if (a.states.size() == 2 && b.states.size() == 2) {
    const double value = ctab::pairwise_odds_ratio(sub);
    if (out.as_json) {
      out.doc["variables"] = names;
      out.doc["value"] = value;
    } else {
      std::cout << "odds-ratio " << names[0] << ' ' << names[1] << ": "
                << fmt6(value) << '\n';
    }
    return exit_ok;
  }
  const auto ratios = ctab::local_odds_ratios(sub, names[0], names[1]);
  auto arr = json::array();
  for (std::size_t i = 1; i < a.states.size(); ++i) {
    for (std::size_t j = 1; j < b.states.size(); ++j) {
      const double value = ratios[i - 1][j - 1];
      if (out.as_json) {
        arr.push_back({{"a_state", a.states[i]}, {"b_state", b.states[j]},
                       {"value", value}});
      } else {
        std::cout << "odds-ratio " << names[0] << '[' << a.states[i] << "] "
                  << names[1] << '[' << b.states[j] << "]: " << fmt6(value)
                  << '\n';
      }
    }
  }
  if (out.as_json) {
    out.doc["variables"] = names;
    out.doc["ratios"] = arr;
  }
  return exit_ok;
}

int cmd_ipf(const Args& args, Output& out) {
  const auto t = load_table(args.kb, out);
  const auto ev = build_evidence(t, args);

  ctab::MarginalTargets targets;
  for (const auto& [name, value] : ev.entries) {
    if (const auto* soft = std::get_if<ctab::SoftEvidence>(&value)) {
      targets[name] = soft->distribution;
    }
  }
  if (targets.empty()) {
    throw ctab::error(ctab::errc::no_soft_evidence,
                      "ipf needs at least one --soft target");
  }

  ctab::Assignment hard;
  for (const auto& [name, value] : ev.entries) {
    if (const auto* h = std::get_if<ctab::HardEvidence>(&value)) {
      hard[name] = h->state;
    }
  }
  const auto conditioned = ctab::condition(t, hard);

  std::vector<std::string> vars = split_csv(args.vars_csv);
  if (vars.empty()) {
    for (const auto& [name, dist] : targets) vars.push_back(name);
  }
  const auto sub = ctab::marginalize(conditioned, vars);
  const auto [fitted, report] = ctab::ipf_adjust(sub, targets, args.config);
  print_table_cells(fitted, out);
  print_ipf_report(report, out);
  return report.converged ? exit_ok : exit_data_error;
}

int cmd_query(const Args& args, Output& out) {
  const auto t = load_table(args.kb, out);
  const auto ev = build_evidence(t, args);
  const ctab::QueryResult result =
      args.independent ? ctab::posterior_independent(t, ev, args.target)
                       : ctab::posterior(t, ev, args.target, args.config);

  const auto& states = t.variables()[t.variable_index(args.target)].states;
  if (out.as_json) {
    out.doc["method"] = ctab::query_method_name(result.method);
    json posterior = json::object();
    for (std::size_t s = 0; s < states.size(); ++s) {
      posterior[states[s]] = result.posterior[s];
    }
    out.doc["posterior"] = posterior;
    if (result.ipf) out.doc["ipf"] = ipf_json(*result.ipf);
  } else {
    std::cout << args.target << ':';
    for (std::size_t s = 0; s < states.size(); ++s) {
      std::cout << (s == 0 ? " " : "  ") << states[s] << ' '
                << fmt6(result.posterior[s]);
    }
    std::cout << '\n';
  }
  if (result.ipf && !result.ipf->converged) {
    std::cerr << "error: fitting did not converge within "
              << args.config.max_cycles << " cycles (residual "
              << fmt6e(result.ipf->max_residual) << ")\n";
    return exit_data_error;
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint probability tables with hard and soft evidence"};
  app.require_subcommand(1);

  Args args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("kb", args.kb, "knowledge-base file")->required();
    cmd->add_flag("--json", args.as_json, "emit JSON instead of text");
  };
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--tol", args.config.tolerance, "convergence tolerance");
    cmd->add_option("--max-cycles", args.config.max_cycles, "fitting cycle limit");
  };

  auto* validate = app.add_subcommand("validate", "check a KB file");
  add_common(validate);

  auto* marg = app.add_subcommand("marginalize", "sum onto a subset of variables");
  add_common(marg);
  marg->add_option("--vars", args.vars_csv, "comma-separated variables to keep")
      ->required();

  auto* cond = app.add_subcommand("condition", "condition on hard evidence");
  add_common(cond);
  cond->add_option("--hard", args.hard, "hard evidence var=state")->required();

  auto* odds = app.add_subcommand("odds-ratio", "cross-product ratios");
  add_common(odds);
  odds->add_option("--vars", args.vars_csv, "two variables a,b");
  odds->add_option("--three-way", args.threeway_csv, "three variables a,b,c");

  auto* ipf = app.add_subcommand("ipf", "fit a subtable to new marginals");
  add_common(ipf);
  add_config(ipf);
  ipf->add_option("--vars", args.vars_csv, "subtable variables (default: soft variables)");
  ipf->add_option("--soft", args.soft, "target marginal var=state:p,state:p[,...]");
  ipf->add_option("--hard", args.hard, "hard evidence var=state");

  auto* query = app.add_subcommand("query", "posterior of a target variable");
  add_common(query);
  add_config(query);
  query->add_option("--target", args.target, "query variable")->required();
  query->add_option("--soft", args.soft, "soft evidence var=state:p,state:p[,...]");
  query->add_option("--hard", args.hard, "hard evidence var=state");
  query->add_flag("--independent", args.independent,
                  "use the independence product instead of odds-ratio fitting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  if (!args.vars_csv.empty() && !args.threeway_csv.empty() &&
      odds->parsed()) {
    std::cerr << "error: --vars and --three-way are mutually exclusive\n";
    return exit_usage;
  }
  if (odds->parsed() && args.vars_csv.empty() && args.threeway_csv.empty()) {
    std::cerr << "error: odds-ratio needs --vars or --three-way\n";
    return exit_usage;
  }

  Output out;
  out.as_json = args.as_json;
  out.doc["diagnostics"] = json::array();

  int code = exit_ok;
  try {
    if (validate->parsed()) {
      code = cmd_validate(args, out);
    } else if (marg->parsed()) {
      code = cmd_marginalize(args, out);
    } else if (cond->parsed()) {
      code = cmd_condition(args, out);
    } else if (odds->parsed()) {
      code = cmd_odds_ratio(args, out);
    } else if (ipf->parsed()) {
      code = cmd_ipf(args, out);
    } else if (query->parsed()) {
      code = cmd_query(args, out);
    }
  } catch (const KbInvalid&) {
    out.flush();
    return exit_kb_error;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const ctab::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    out.flush();
    return exit_code_for(e);
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_kb_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  out.flush();
  return code;
}
