#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainprop/chain.hpp"
#include "chainprop/gen.hpp"

namespace chainprop {

struct TraceGenConfig {
  std::size_t max_blocks = 7;
  std::size_t max_actions_per_block = 2;
  std::size_t retries_per_block = 10;
  SchedulingPolicy policy = SchedulingPolicy::DepthFirst;
  std::size_t num_tests = 10000;
  std::uint64_t seed = 0;
  std::size_t size = 30;
};

// Proposes at most one external action given the pre-block chain state.
// An absent proposal means the generator declines in this state.
struct CallGenerator {
  std::string name;
  std::uint64_t weight = 1;
  std::function<Gen<std::optional<Action>>(const ChainState&)> propose;
};

template <class Msg>
struct Proposal {
  Address sender;
  Amount amount;
  Msg msg;
};

template <class Msg>
std::optional<Proposal<Msg>> proposal(Address sender, Amount amount, Msg msg) {
  return Proposal<Msg>{sender, amount, std::move(msg)};
}

// Builds a CallGenerator for a typed contract at `contract`. `f` is called as
// f(chain, state) and returns Gen<std::optional<Proposal<Msg>>>; it is not
// consulted while nothing is deployed at `contract`.
template <class State, class Msg, class F>
CallGenerator call_generator(std::string name, Address contract, std::uint64_t weight, F f) {
  CallGenerator cg;
  cg.name = std::move(name);
  cg.weight = weight;
  cg.propose = [contract, f = std::move(f)](const ChainState& chain) -> Gen<std::optional<Action>> {
    auto st = contract_state<State>(chain, contract);
    if (!st) return gen_return(std::optional<Action>{});
    Gen<std::optional<Proposal<Msg>>> g = f(chain, *st);
    return g.map([contract](std::optional<Proposal<Msg>> p) -> std::optional<Action> {
      if (!p) return std::nullopt;
      return Action(p->sender, call_body(contract, p->amount, p->msg));
    });
  };
  return cg;
}

// Initial chain, the actions of the deployment block (may be empty), and the
// call generators used to populate subsequent blocks.
struct TraceSetup {
  ChainState genesis;
  std::vector<Action> deploy;
  std::vector<CallGenerator> call_gens;
};

struct RejectedCall {
  std::size_t block_index;
  Action action;
};

struct GeneratedTrace {
  ChainTrace trace;
  std::size_t discards = 0;
  std::vector<RejectedCall> rejected;
};

// Every produced trace replays successfully. Throws std::invalid_argument when
// the deployment block fails.
inline Gen<GeneratedTrace> gen_trace(const TraceSetup& setup, const TraceGenConfig& cfg) {
  ChainState after_deploy = setup.genesis;
  if (!setup.deploy.empty()) {
    auto deployed = add_block(setup.genesis, setup.deploy, cfg.policy);
    if (!deployed) throw std::invalid_argument("deployment block failed: " + describe(deployed.error()));
    after_deploy = std::move(deployed).value();
  }
  std::vector<std::uint64_t> weights;
  std::uint64_t total_weight = 0;
  for (const auto& cg : setup.call_gens) {
    if (cg.weight == 0) throw std::invalid_argument("call generator '" + cg.name + "' has zero weight");
    weights.push_back(cg.weight);
    total_weight += cg.weight;
  }

  return Gen<GeneratedTrace>([setup, cfg, after_deploy, weights, total_weight](Rng& rng, std::size_t size) {
    GeneratedTrace out;
    out.trace.genesis = setup.genesis;
    out.trace.policy = cfg.policy;
    ChainState state = setup.genesis;
    if (!setup.deploy.empty()) {
      out.trace.blocks.push_back(Block{state.height + 1, setup.deploy});
      state = after_deploy;
    }

    std::vector<Action> actions;
    for (std::size_t b = 0; b < cfg.max_blocks; ++b) {
      const std::size_t block_index = out.trace.blocks.size();
      bool accepted = false;
      for (std::size_t attempt = 0; attempt <= cfg.retries_per_block; ++attempt) {
        actions.clear();
        if (total_weight != 0 && cfg.max_actions_per_block != 0) {
          const std::size_t k = 1 + rng.below(cfg.max_actions_per_block);
          for (std::size_t j = 0; j < k; ++j) {
            const auto& cg = setup.call_gens[pick_weighted(rng, weights, total_weight)];
            if (auto a = cg.propose(state)(rng, size)) actions.push_back(std::move(*a));
          }
        }
        auto next = add_block(state, actions, cfg.policy);
        if (next) {
          state = std::move(next).value();
          accepted = true;
          break;
        }
        ++out.discards;
        if (auto idx = next.error().action_index; idx && *idx < actions.size()) {
          out.rejected.push_back({block_index, actions[*idx]});
        }
      }
      if (!accepted) {
        // Keep the longest prefix of the last attempt that still executes.
        while (true) {
          actions.pop_back();
          auto next = add_block(state, actions, cfg.policy);
          if (next) {
            state = std::move(next).value();
            break;
          }
        }
      }
      out.trace.blocks.push_back(Block{state.height, actions});
    }
    return out;
  });
}

}  // namespace chainprop
