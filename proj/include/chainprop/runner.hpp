#pragma once

// Binds the bundled suites to the checkers: property selection, report
// formatting, generator statistics and exit codes.

#include <cstdint>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainprop/bat/suite.hpp"
#include "chainprop/check.hpp"
#include "chainprop/dexter/suite.hpp"
#include "chainprop/itoken/suite.hpp"
#include "chainprop/variant.hpp"

namespace chainprop {

enum class Expect { none, pass, fail };

inline const char* to_string(Expect e) {
  switch (e) {
    case Expect::none: return "none";
    case Expect::pass: return "pass";
    case Expect::fail: return "fail";
  }
  return "?";
}

struct RunConfig {
  std::string suite;
  std::optional<std::uint64_t> seed;  // drawn from the OS when absent
  std::size_t num_tests = 10000;
  std::size_t max_blocks = 7;
  std::size_t max_actions_per_block = 2;
  SchedulingPolicy policy = SchedulingPolicy::DepthFirst;
  std::optional<Variant> variant;
  Expect expect = Expect::none;
  std::string property;  // empty selects the suite default
};

struct RunOutput {
  int exit_code = 0;
  std::string report;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_mismatch = 1;
inline constexpr int exit_usage = 2;

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuiteInfo {
  std::string name;
  std::vector<std::string> properties;  // first is the default
  bool has_variants;
};

inline const std::vector<SuiteInfo>& suites() {
  static const std::vector<SuiteInfo> all = [] {
    std::vector<std::string> bat_props;
    for (const auto& [name, _] : bat::property_names()) bat_props.push_back(name);
    bat_props.insert(bat_props.end(), {"triples", "supply_invariant", "all"});
    return std::vector<SuiteInfo>{
        {"dexter", {"no_profit_from_splitting", "token_pool_consistent"}, true},
        {"itoken", {"sum_balances"}, true},
        {"bat", bat_props, false},
    };
  }();
  return all;
}

inline const SuiteInfo& find_suite(const std::string& name) {
  for (const auto& s : suites()) {
    if (s.name == name) return s;
  }
  throw usage_error("unknown suite '" + name + "'");
}

inline std::string list_suites() {
  std::string out;
  for (const auto& s : suites()) {
    out += s.name + ":";
    for (const auto& p : s.properties) out += " " + p;
    out += "\n";
  }
  return out;
}

namespace runner_detail {

struct Resolved {
  const SuiteInfo* suite;
  std::string property;
  Variant variant;
  std::uint64_t seed;
  TraceGenConfig gen;
};

inline Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  r.suite = &find_suite(cfg.suite);
  r.property = cfg.property.empty() ? r.suite->properties.front() : cfg.property;
  bool known = false;
  for (const auto& p : r.suite->properties) known = known || p == r.property;
  if (!known) throw usage_error("suite '" + cfg.suite + "' has no property '" + r.property + "'");
  if (!r.suite->has_variants && cfg.variant == Variant::fixed) {
    throw usage_error("suite '" + cfg.suite + "' has no fixed variant");
  }
  if (r.property == "all" && cfg.expect != Expect::none) {
    throw usage_error("--expect cannot be combined with --property all");
  }
  if (cfg.num_tests == 0) throw usage_error("num_tests must be positive");
  r.variant = cfg.variant.value_or(Variant::buggy);
  r.seed = cfg.seed ? *cfg.seed : (std::uint64_t{std::random_device{}()} << 32) ^ std::random_device{}();
  r.gen.max_blocks = cfg.max_blocks;
  r.gen.max_actions_per_block = cfg.max_actions_per_block;
  r.gen.policy = cfg.policy;
  r.gen.num_tests = cfg.num_tests;
  r.gen.seed = r.seed;
  return r;
}

inline std::string header(const Resolved& r, const RunConfig& cfg) {
  std::ostringstream os;
  os << "suite: " << r.suite->name << "\n";
  os << "variant: " << (r.suite->has_variants ? to_string(r.variant) : "n/a") << "\n";
  os << "policy: " << to_string(cfg.policy) << "\n";
  os << "seed: " << r.seed << "\n";
  os << "num_tests: " << cfg.num_tests << "\n";
  os << "max_blocks: " << cfg.max_blocks << "\n";
  os << "max_actions_per_block: " << cfg.max_actions_per_block << "\n";
  return os.str();
}

inline std::vector<std::pair<std::string, CheckResult>> checks(const Resolved& r) {
  using Results = std::vector<std::pair<std::string, CheckResult>>;
  const auto& name = r.suite->name;
  const auto& cfg = r.gen;
  if (name == "dexter") {
    const auto setup = dexter::make_setup(r.variant);
    if (r.property == "token_pool_consistent") {
      return Results{{r.property, for_all_chain_states(dexter::token_pool_consistent(), setup, cfg)}};
    }
    return Results{{r.property, check_traces(dexter::no_profit_from_splitting(), setup, cfg)}};
  }
  if (name == "itoken") return Results{{r.property, itoken::check_sum_balances(r.variant, cfg)}};

  Results out;
  auto add_triples = [&] {
    for (const auto& t : bat::triples()) {
      out.emplace_back("triple " + t.name, check_hoare(t.spec, bat::bat_addr, bat::make_setup(), cfg));
    }
  };
  auto add_invariant = [&] {
    out.emplace_back("supply_invariant", check_traces(bat::supply_invariant(), bat::make_setup(), cfg));
  };
  if (r.property == "triples") {
    add_triples();
  } else if (r.property == "supply_invariant") {
    add_invariant();
  } else if (r.property == "all") {
    for (const auto& [pname, p] : bat::property_names()) out.emplace_back(pname, bat::check_property(p, cfg));
    add_triples();
    add_invariant();
  } else {
    for (const auto& [pname, p] : bat::property_names()) {
      if (pname == r.property) out.emplace_back(pname, bat::check_property(p, cfg));
    }
  }
  return out;
}

}  // namespace runner_detail

inline RunOutput run(const RunConfig& cfg) {
  runner_detail::Resolved r;
  try {
    r = runner_detail::resolve(cfg);
  } catch (const usage_error& e) {
    return {exit_usage, std::string("usage error: ") + e.what() + "\n"};
  }
  std::string report = runner_detail::header(r, cfg);
  bool all_ok = true;
  for (const auto& [name, result] : runner_detail::checks(r)) {
    report += "\n[" + name + "]\n" + render(result) + "\n";
    if (cfg.expect == Expect::none) {
      all_ok = all_ok && !std::holds_alternative<Errored>(result);
      continue;
    }
    const ExpectVerdict v = cfg.expect == Expect::fail ? expect_failure(result) : expect_success(result);
    report += std::string("expect ") + to_string(cfg.expect) + ": " + (v.ok ? "ok" : "MISMATCH") + " (" + v.message +
              ")\n";
    all_ok = all_ok && v.ok;
  }
  return {all_ok ? exit_ok : exit_mismatch, report};
}

inline LabelFn suite_labeler(const std::string& suite) {
  if (suite == "bat") return bat::entrypoint_label;
  if (suite == "itoken") {
    return [](const CallObservation& o) -> std::string {
      if (!o.msg || !holds<itoken::ITokenMsg>(*o.msg)) return "other";
      static constexpr const char* names[] = {"transfer_from", "mint", "burn"};
      return names[deserialize<itoken::ITokenMsg>(*o.msg).index()];
    };
  }
  return [](const CallObservation& o) -> std::string {
    if (o.msg && holds<dexter::TokensToTez>(*o.msg)) return "tokens_to_tez";
    if (o.msg && holds<dexter::TokenTransfer>(*o.msg)) return "token_transfer";
    return "other";
  };
}

inline TraceSetup suite_setup(const std::string& suite, Variant variant) {
  if (suite == "bat") return bat::make_setup();
  if (suite == "itoken") return itoken::make_setup(variant);
  return dexter::make_setup(variant);
}

inline std::string render(const ClassifyReport& rep) {
  std::ostringstream os;
  os << "traces: " << rep.traces << "\n";
  os << std::left << std::setw(20) << "label" << std::right << std::setw(10) << "accepted" << std::setw(10)
     << "rejected" << "\n";
  for (const auto& [label, c] : rep.labels) {
    os << std::left << std::setw(20) << label << std::right << std::setw(10) << c.accepted << std::setw(10)
       << c.rejected << "\n";
  }
  os << "executed calls: " << rep.executed_calls << "\n";
  os << "rejected calls: " << rep.rejected_calls << "\n";
  os << "discards: " << rep.discards << "\n";
  return os.str();
}

inline RunOutput stats(const RunConfig& cfg) {
  runner_detail::Resolved r;
  try {
    RunConfig plain = cfg;
    plain.expect = Expect::none;
    plain.property.clear();
    r = runner_detail::resolve(plain);
  } catch (const usage_error& e) {
    return {exit_usage, std::string("usage error: ") + e.what() + "\n"};
  }
  const ClassifyReport rep = classify(suite_labeler(r.suite->name), suite_setup(r.suite->name, r.variant), r.gen);
  return {exit_ok, runner_detail::header(r, cfg) + "\n" + render(rep)};
}

}  // namespace chainprop
