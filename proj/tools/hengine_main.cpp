// hengine: load a transformation system and a model, run a unit or rule,
// count matches, or validate files.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hengine/error.hpp"
#include "hengine/exec.hpp"
#include "hengine/matcher.hpp"
#include "hengine/parse.hpp"
#include "hengine/print.hpp"

namespace {

using namespace hengine;

constexpr int kExitSuccess = 0;
constexpr int kExitFailed = 1;   // unit failure or runtime error
constexpr int kExitBadInput = 2; // unreadable, unparseable, or unresolvable input

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void report(const std::string& path, const Error& e) {
  std::cerr << path;
  if (e.line() > 0) std::cerr << ":" << e.line() << ":" << e.column();
  std::cerr << ": " << error_code_name(e.code()) << ": " << e.what() << "\n";
}

TransformationSystem load_system_file(const std::string& path) {
  try {
    return parse_system(read_file(path));
  } catch (const Error& e) {
    report(path, e);
    throw CLI::RuntimeError(kExitBadInput);
  }
}

InstanceGraph load_model_file(const std::string& path, const TransformationSystem& sys) {
  if (path.empty()) return InstanceGraph(sys.types);
  try {
    return parse_model(read_file(path), sys.types);
  } catch (const Error& e) {
    report(path, e);
    throw CLI::RuntimeError(kExitBadInput);
  }
}

/// --param name=value with the value written as an expression literal.
std::map<std::string, ParamValue> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, ParamValue> out;
  for (const std::string& p : raw) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "--param expects name=value, got '" << p << "'\n";
      throw CLI::RuntimeError(kExitBadInput);
    }
    std::string name = p.substr(0, eq);
    std::string text = p.substr(eq + 1);
    try {
      EvalEnv env{};
      out[name] = eval_expr(*parse_expr(text), env);
    } catch (const Error& e) {
      std::cerr << "--param " << name << ": " << e.what() << "\n";
      throw CLI::RuntimeError(kExitBadInput);
    }
  }
  return out;
}

struct RunOptions {
  std::string system_path;
  std::string model_path;
  std::string unit;
  std::vector<std::string> params;
  bool injective = true;
  std::string dangling = "forbid";
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 100000;
  std::string out_path;
  bool strip = false;
};

int cmd_run(const RunOptions& opt) {
  TransformationSystem sys = load_system_file(opt.system_path);
  InstanceGraph graph = load_model_file(opt.model_path, sys);

  const Unit* unit = sys.find_unit(opt.unit);
  Unit wrapper{"", {}, {}, RuleCallU{}};
  if (!unit) {
    const Rule* rule = sys.find_rule(opt.unit);
    if (!rule) {
      std::cerr << "no unit or rule named '" << opt.unit << "'\n";
      return kExitBadInput;
    }
    wrapper = rule_call_unit(*rule);
    unit = &wrapper;
  }

  std::map<std::string, ParamValue> ins = parse_params(opt.params);
  try {
    bind_parameters(*unit, ins);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitBadInput;
  }

  ExecContext ctx(graph, sys, opt.seed);
  ctx.mode.injective = opt.injective;
  ctx.dangling = opt.dangling == "cascade" ? DeleteMode::CascadeLinks : DeleteMode::ForbidDangling;
  ctx.max_steps = opt.max_steps;

  ExecResult result;
  try {
    result = execute(*unit, ctx, ins);
  } catch (const Error& e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitFailed;
  }
  if (!result.success) {
    std::cerr << "unit " << unit->name << " was not applicable\n";
    return kExitFailed;
  }

  if (opt.strip) strip_traces(graph);
  for (const ParamDecl& p : unit->params) {
    auto it = result.out_values.find(p.name);
    if (it == result.out_values.end()) continue;
    std::cout << p.name << " = " << param_value_text(it->second, graph) << "\n";
  }
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << opt.out_path << "\n";
      return kExitFailed;
    }
    out << print_model(graph);
  }
  return kExitSuccess;
}

struct MatchOptions {
  std::string system_path;
  std::string model_path;
  std::string rule;
  bool injective = true;
};

int cmd_match(const MatchOptions& opt) {
  TransformationSystem sys = load_system_file(opt.system_path);
  InstanceGraph graph = load_model_file(opt.model_path, sys);
  const Rule* rule = sys.find_rule(opt.rule);
  if (!rule) {
    std::cerr << "no rule named '" << opt.rule << "'\n";
    return kExitBadInput;
  }
  MatchMode mode{opt.injective};
  std::cout << count_matches(rule->lhs, rule->condition.get(), graph, mode) << "\n";
  return kExitSuccess;
}

int cmd_validate(const std::string& path, const std::string& system_path) {
  bool is_model = path.size() >= 4 && path.substr(path.size() - 4) == ".gim";
  if (!is_model) {
    try {
      parse_system(read_file(path));
    } catch (const Error& e) {
      report(path, e);
      return kExitBadInput;
    }
    std::cout << path << ": ok\n";
    return kExitSuccess;
  }
  if (system_path.empty()) {
    std::cerr << "validating a model file needs --system for the metamodels\n";
    return kExitBadInput;
  }
  TransformationSystem sys = load_system_file(system_path);
  std::vector<Violation> violations;
  try {
    parse_model(read_file(path), sys.types, &violations);
  } catch (const Error& e) {
    report(path, e);
    return kExitBadInput;
  }
  if (!violations.empty()) {
    for (const Violation& v : violations) std::cout << path << ": " << v.message << "\n";
    return kExitFailed;
  }
  std::cout << path << ": ok\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed-graph transformation engine"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "execute a transformation unit or rule");
  run_cmd->add_option("--system", run.system_path, "system file (.gts)")->required();
  run_cmd->add_option("--model", run.model_path, "input model (.gim); empty model if absent");
  run_cmd->add_option("--unit", run.unit, "unit or rule to execute")->required();
  run_cmd->add_option("--param", run.params, "parameter binding name=value (value is a literal)");
  run_cmd->add_flag("--injective,!--no-injective", run.injective,
                    "require distinct variables to match distinct objects (default)");
  run_cmd->add_option("--dangling", run.dangling, "forbid|cascade: deleting a still-linked object")
      ->check(CLI::IsMember({"forbid", "cascade"}));
  run_cmd->add_option("--seed", run.seed, "seed for independent-unit child order");
  run_cmd->add_option("--max-steps", run.max_steps, "execution step budget");
  run_cmd->add_option("--out", run.out_path, "write the resulting model here");
  run_cmd->add_flag("--strip-traces", run.strip, "drop Trace objects before reporting/writing");

  MatchOptions match;
  CLI::App* match_cmd = app.add_subcommand("match", "count matches of a rule's pattern");
  match_cmd->add_option("--system", match.system_path, "system file (.gts)")->required();
  match_cmd->add_option("--model", match.model_path, "input model (.gim); empty model if absent");
  match_cmd->add_option("--rule", match.rule, "rule whose pattern is counted")->required();
  match_cmd->add_flag("--injective,!--no-injective", match.injective,
                      "require distinct variables to match distinct objects (default)");

  std::string validate_path;
  std::string validate_system;
  CLI::App* validate_cmd = app.add_subcommand("validate", "check a .gts or .gim file");
  validate_cmd->add_option("path", validate_path, "file to check")->required();
  validate_cmd->add_option("--system", validate_system, "system supplying metamodels for .gim");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run);
    if (match_cmd->parsed()) return cmd_match(match);
    return cmd_validate(validate_path, validate_system);
  } catch (const CLI::RuntimeError& e) {
    return e.get_exit_code();
  } catch (const Error& e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitFailed;
  }
}
