#pragma once

// Property checkers over generated execution traces, counterexample
// shrinking, generator statistics and negative testing.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chainprop/chain.hpp"
#include "chainprop/gen.hpp"
#include "chainprop/trace_format.hpp"
#include "chainprop/tracegen.hpp"

namespace chainprop {

// ---------------------------------------------------------------------------
// Results

struct Passed {
  std::size_t tests = 0;
  std::size_t discards = 0;
  std::size_t checked = 0;  // observations a Hoare triple actually evaluated
  std::optional<ChainTrace> witness;
};

struct Failed {
  std::size_t tests = 0;
  std::size_t shrinks = 0;
  std::optional<ChainTrace> original;
  std::optional<ChainTrace> shrunk;
  std::string detail;
};

struct GaveUp {
  std::size_t tests = 0;
  std::size_t discards = 0;
};

// The property could not be evaluated (e.g. codec failure during observation).
struct Errored {
  std::size_t tests = 0;
  std::string detail;
};

using CheckResult = std::variant<Passed, Failed, GaveUp, Errored>;

inline bool is_passed(const CheckResult& r) { return std::holds_alternative<Passed>(r); }
inline bool is_failed(const CheckResult& r) { return std::holds_alternative<Failed>(r); }

inline std::string render(const CheckResult& r) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Passed>) {
          std::string out = "+++ Passed " + std::to_string(v.tests) + " tests (" + std::to_string(v.discards) +
                            " discards)";
          if (v.witness) out += "\nWitness:\n" + render(*v.witness);
          return out;
        } else if constexpr (std::is_same_v<V, Failed>) {
          std::string out = "*** Failed after " + std::to_string(v.tests) + " tests and " +
                            std::to_string(v.shrinks) + " shrinks:";
          if (v.shrunk) out += "\n" + render(*v.shrunk);
          if (!v.detail.empty()) out += "\n" + v.detail;
          return out;
        } else if constexpr (std::is_same_v<V, GaveUp>) {
          return "*** Gave up after " + std::to_string(v.discards) + " discards";
        } else {
          return "*** Error after " + std::to_string(v.tests) + " tests: " + v.detail;
        }
      },
      r);
}

struct ExpectVerdict {
  bool ok = false;
  std::string message;
};

// Negative test: passes iff the property check failed.
inline ExpectVerdict expect_failure(const CheckResult& r) {
  if (is_failed(r)) return {true, "property failed as expected"};
  if (is_passed(r)) return {false, "property unexpectedly held"};
  if (const auto* g = std::get_if<GaveUp>(&r)) {
    return {false, "gave up after " + std::to_string(g->discards) + " discards"};
  }
  return {false, "error: " + std::get<Errored>(r).detail};
}

inline ExpectVerdict expect_success(const CheckResult& r) {
  if (is_passed(r)) return {true, "property held as expected"};
  if (is_failed(r)) return {false, "property unexpectedly failed"};
  if (const auto* g = std::get_if<GaveUp>(&r)) {
    return {false, "gave up after " + std::to_string(g->discards) + " discards"};
  }
  return {false, "error: " + std::get<Errored>(r).detail};
}

// ---------------------------------------------------------------------------
// Trace properties

struct Outcome {
  enum class Kind { holds, violated, invalid };
  Kind kind = Kind::holds;
  std::string detail;
  std::size_t checked = 0;

  static Outcome holds(std::size_t checked = 0) { return {Kind::holds, {}, checked}; }
  static Outcome violated(std::string d) { return {Kind::violated, std::move(d), 0}; }
  static Outcome invalid(std::string d) { return {Kind::invalid, std::move(d), 0}; }
};

// Evaluates a property on a whole trace, replaying it as needed. May throw
// codec_error.
using TraceProperty = std::function<Outcome(const ChainTrace&)>;

// ---------------------------------------------------------------------------
// Shrinking

// Single-step reductions, in preference order: drop a block, drop an action,
// shrink an amount or a message field. Deployment bodies are left intact.
inline std::vector<ChainTrace> shrink_candidates(const ChainTrace& t) {
  std::vector<ChainTrace> out;
  for (std::size_t b = 0; b < t.blocks.size(); ++b) {
    ChainTrace c = t;
    c.blocks.erase(c.blocks.begin() + static_cast<std::ptrdiff_t>(b));
    renumber_blocks(c);
    out.push_back(std::move(c));
  }
  for (std::size_t b = 0; b < t.blocks.size(); ++b) {
    for (std::size_t a = 0; a < t.blocks[b].actions.size(); ++a) {
      ChainTrace c = t;
      auto& acts = c.blocks[b].actions;
      acts.erase(acts.begin() + static_cast<std::ptrdiff_t>(a));
      out.push_back(std::move(c));
    }
  }
  for (std::size_t b = 0; b < t.blocks.size(); ++b) {
    for (std::size_t a = 0; a < t.blocks[b].actions.size(); ++a) {
      const ActionBody& body = t.blocks[b].actions[a].body;
      auto with_body = [&](ActionBody nb) {
        ChainTrace c = t;
        c.blocks[b].actions[a].body = std::move(nb);
        out.push_back(std::move(c));
      };
      std::visit(
          [&](const auto& v) {
            using B = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<B, act::Deploy>) return;  // deployments are part of the setup
            for (Amount smaller : Codec<Amount>::shrink(v.amount)) {
              B nv = v;
              nv.amount = smaller;
              with_body(nv);
            }
            if constexpr (std::is_same_v<B, act::Call>) {
              for (auto& m : shrink(v.msg)) {
                B nv = v;
                nv.msg = std::move(m);
                with_body(nv);
              }
            }
          },
          body);
    }
  }
  return out;
}

// Greedy descent to a fixed point: the result is 1-minimal with respect to
// shrink_candidates. `violates` must be false for traces that do not replay.
inline ChainTrace shrink_trace(ChainTrace trace, const std::function<bool(const ChainTrace&)>& violates,
                               std::size_t* steps = nullptr) {
  std::size_t n = 0;
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto& c : shrink_candidates(trace)) {
      if (violates(c)) {
        trace = std::move(c);
        ++n;
        progress = true;
        break;
      }
    }
  }
  if (steps) *steps = n;
  return trace;
}

inline bool is_one_minimal(const ChainTrace& t, const std::function<bool(const ChainTrace&)>& violates) {
  for (const auto& c : shrink_candidates(t)) {
    if (violates(c)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Core loop

inline Rng next_case(Rng& master) { return master.split(); }

inline CheckResult check_traces(const TraceProperty& prop, const TraceSetup& setup, const TraceGenConfig& cfg) {
  const auto gen = gen_trace(setup, cfg);
  Rng master(cfg.seed);
  std::size_t discards = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < cfg.num_tests; ++i) {
    Rng rng = next_case(master);
    GeneratedTrace gt = gen(rng, cfg.size);
    discards += gt.discards;
    try {
      Outcome o = prop(gt.trace);
      if (o.kind == Outcome::Kind::invalid) {
        return Errored{i + 1, "generated trace does not replay: " + o.detail};
      }
      if (o.kind == Outcome::Kind::holds) {
        checked += o.checked;
        continue;
      }
      auto violates = [&](const ChainTrace& t) { return prop(t).kind == Outcome::Kind::violated; };
      std::size_t steps = 0;
      ChainTrace shrunk = shrink_trace(gt.trace, violates, &steps);
      std::string detail = prop(shrunk).detail;
      return Failed{i + 1, steps, std::move(gt.trace), std::move(shrunk), std::move(detail)};
    } catch (const codec_error& e) {
      return Errored{i + 1, std::string("codec failure: ") + e.what()};
    }
  }
  return Passed{cfg.num_tests, discards, checked, std::nullopt};
}

// ---------------------------------------------------------------------------
// Hoare triples: {{pre}} contract.receive {{post}}

struct HoareSpec {
  std::function<bool(const CallObservation&)> applies;  // typed msg present and pre holds
  std::function<bool(const CallObservation&)> post;
  std::function<std::string(const CallObservation&)> describe;
};

template <class State, class Msg>
using HoarePre = std::function<bool(const State&, const Msg&)>;

template <class State, class Msg>
using HoarePost = std::function<bool(const ChainState&, const ContractCallContext&, const State&, const Msg&,
                                     const std::optional<std::pair<State, std::vector<ActionBody>>>&)>;

template <class State, class Msg>
HoareSpec hoare(HoarePre<State, Msg> pre, HoarePost<State, Msg> post) {
  HoareSpec h;
  h.applies = [pre](const CallObservation& o) {
    if (!o.msg) return false;
    return pre(deserialize<State>(o.old_state), deserialize<Msg>(*o.msg));
  };
  h.post = [post](const CallObservation& o) {
    std::optional<std::pair<State, std::vector<ActionBody>>> res;
    if (o.result) res.emplace(deserialize<State>(o.result->state), o.result->actions);
    return post(o.chain, o.ctx, deserialize<State>(o.old_state), deserialize<Msg>(*o.msg), res);
  };
  h.describe = [](const CallObservation& o) {
    return "post-condition violated by call from " + to_string(o.ctx.from) + " to " + to_string(o.ctx.self) +
           " with message " + show(*o.msg) + " at height " + std::to_string(o.chain.height);
  };
  return h;
}

inline TraceProperty hoare_property(HoareSpec spec, Address contract) {
  return [spec = std::move(spec), contract](const ChainTrace& t) {
    std::size_t checked = 0;
    std::optional<std::string> failure;
    ReplayHooks hooks;
    hooks.on_call = [&](const CallObservation& o) {
      if (failure || o.ctx.self != contract) return;
      if (!spec.applies(o)) return;
      ++checked;
      if (!spec.post(o)) failure = spec.describe(o);
    };
    hooks.on_block_end = [&](std::size_t, const ChainState&) { return !failure; };
    auto r = replay(t, &hooks);
    if (!r) return Outcome::invalid(describe(r.error()));
    if (failure) return Outcome::violated(*failure);
    return Outcome::holds(checked);
  };
}

inline CheckResult check_hoare(const HoareSpec& spec, Address contract, const TraceSetup& setup,
                               const TraceGenConfig& cfg) {
  return check_traces(hoare_property(spec, contract), setup, cfg);
}

// ---------------------------------------------------------------------------
// All-states predicate, evaluated after every block.

struct StateCheck {
  bool ok = true;
  std::string detail;
  StateCheck(bool v) : ok(v) {}  // NOLINT(google-explicit-constructor)
  StateCheck(bool v, std::string d) : ok(v), detail(std::move(d)) {}
};

using StateProperty = std::function<StateCheck(const ChainState&)>;

inline TraceProperty all_states_property(StateProperty prop) {
  return [prop = std::move(prop)](const ChainTrace& t) {
    std::optional<std::string> failure;
    ReplayHooks hooks;
    hooks.on_block_end = [&](std::size_t i, const ChainState& s) {
      StateCheck c = prop(s);
      if (!c.ok) {
        failure = "violated after block " + std::to_string(t.blocks[i].height) +
                  (c.detail.empty() ? std::string() : ": " + c.detail);
      }
      return c.ok;
    };
    auto r = replay(t, &hooks);
    if (!r) return Outcome::invalid(describe(r.error()));
    if (failure) return Outcome::violated(*failure);
    return Outcome::holds();
  };
}

inline CheckResult for_all_chain_states(StateProperty prop, const TraceSetup& setup, const TraceGenConfig& cfg) {
  return check_traces(all_states_property(std::move(prop)), setup, cfg);
}

// ---------------------------------------------------------------------------
// Reachability (start ~~> goal): existential over generated traces.

inline std::optional<std::size_t> first_block_reaching(const ChainTrace& t,
                                                       const std::function<bool(const ChainState&)>& goal) {
  std::optional<std::size_t> hit;
  ReplayHooks hooks;
  hooks.on_block_end = [&](std::size_t i, const ChainState& s) {
    if (goal(s)) hit = i;
    return !hit;
  };
  auto r = replay(t, &hooks);
  if (!r) return std::nullopt;
  return hit;
}

inline CheckResult check_reachable(const ChainState& start, const std::function<bool(const ChainState&)>& goal,
                                   const std::vector<CallGenerator>& call_gens, const TraceGenConfig& cfg) {
  try {
    if (goal(start)) return Passed{0, 0, 0, ChainTrace{start, {}, cfg.policy}};
    const TraceSetup setup{start, {}, call_gens};
    const auto gen = gen_trace(setup, cfg);
    Rng master(cfg.seed);
    std::size_t discards = 0;
    for (std::size_t i = 0; i < cfg.num_tests; ++i) {
      Rng rng = next_case(master);
      GeneratedTrace gt = gen(rng, cfg.size);
      discards += gt.discards;
      auto hit = first_block_reaching(gt.trace, goal);
      if (!hit) continue;
      ChainTrace witness = gt.trace;
      witness.blocks.resize(*hit + 1);
      witness = shrink_trace(witness, [&](const ChainTrace& c) { return first_block_reaching(c, goal).has_value(); });
      return Passed{i + 1, discards, 0, std::move(witness)};
    }
    return Failed{cfg.num_tests, 0, std::nullopt, std::nullopt,
                  "goal not reached in " + std::to_string(cfg.num_tests) + " traces"};
  } catch (const codec_error& e) {
    return Errored{0, std::string("codec failure: ") + e.what()};
  }
}

// ---------------------------------------------------------------------------
// forAll over generated setups.

template <class S>
CheckResult for_all(const Gen<S>& setup_gen, const std::function<std::optional<ChainState>(const S&)>& build,
                    const std::function<CheckResult(const ChainState&, std::uint64_t seed)>& inner,
                    const std::function<std::string(const S&)>& show_setup, const TraceGenConfig& cfg) {
  Rng master(cfg.seed);
  std::size_t tests = 0;
  std::size_t discards = 0;
  const std::size_t max_discards = 10 * cfg.num_tests;
  while (tests < cfg.num_tests) {
    if (discards >= max_discards) return GaveUp{tests, discards};
    Rng rng = next_case(master);
    S s = setup_gen(rng, cfg.size);
    const std::uint64_t inner_seed = rng.next_u64();
    auto chain = build(s);
    if (!chain) {
      ++discards;
      continue;
    }
    CheckResult r = inner(*chain, inner_seed);
    if (auto* f = std::get_if<Failed>(&r)) {
      Failed out = std::move(*f);
      out.tests = tests + 1;
      out.detail = "setup: " + show_setup(s) + (out.detail.empty() ? std::string() : "\n" + out.detail);
      return out;
    }
    if (auto* e = std::get_if<Errored>(&r)) {
      return Errored{tests + 1, "setup: " + show_setup(s) + ": " + e->detail};
    }
    if (std::holds_alternative<GaveUp>(r)) {
      ++discards;
      continue;
    }
    ++tests;
  }
  return Passed{tests, discards, 0, std::nullopt};
}

// ---------------------------------------------------------------------------
// Statistics

struct LabelCount {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  friend bool operator==(const LabelCount&, const LabelCount&) = default;
};

struct ClassifyReport {
  std::map<std::string, LabelCount> labels;
  std::size_t traces = 0;
  std::size_t executed_calls = 0;
  std::size_t rejected_calls = 0;
  std::size_t discards = 0;
};

using LabelFn = std::function<std::string(const CallObservation&)>;

// Labels every executed contract call of every generated trace; external calls
// dropped during block regeneration are labelled against the pre-block state
// and counted as rejected.
inline ClassifyReport classify(const LabelFn& label, const TraceSetup& setup, const TraceGenConfig& cfg) {
  ClassifyReport report;
  const auto gen = gen_trace(setup, cfg);
  Rng master(cfg.seed);
  for (std::size_t i = 0; i < cfg.num_tests; ++i) {
    Rng rng = next_case(master);
    GeneratedTrace gt = gen(rng, cfg.size);
    ++report.traces;
    report.discards += gt.discards;
    std::vector<ChainState> before;
    ReplayHooks hooks;
    hooks.on_call = [&](const CallObservation& o) {
      ++report.executed_calls;
      ++report.labels[label(o)].accepted;
    };
    hooks.on_block_begin = [&](std::size_t, const ChainState& s) { before.push_back(s); };
    replay(gt.trace, &hooks);
    for (const auto& rc : gt.rejected) {
      const auto* call = std::get_if<act::Call>(&rc.action.body);
      if (!call || rc.block_index >= before.size()) continue;
      const ChainState& chain = before[rc.block_index];
      auto it = chain.contracts.find(call->to);
      if (it == chain.contracts.end()) continue;
      const ContractCallContext ctx{rc.action.origin, rc.action.from, call->to, call->amount};
      const std::optional<Serialized> msg = call->msg;
      ++report.rejected_calls;
      ++report.labels[label(CallObservation{chain, ctx, it->second.state, msg, nullptr})].rejected;
    }
  }
  return report;
}

}  // namespace chainprop
