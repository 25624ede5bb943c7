#pragma once

// Executable semantics for interacting contracts: accounts, actions, atomic
// blocks under a depth-first or breadth-first scheduling policy, and
// replayable traces.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chainprop/address.hpp"
#include "chainprop/amount.hpp"
#include "chainprop/codec.hpp"
#include "chainprop/result.hpp"

namespace chainprop {

struct ContractCallContext {
  Address origin;  // external initiator of the top-level action
  Address from;    // immediate sender
  Address self;
  Amount amount;  // currency attached to this call

  friend bool operator==(const ContractCallContext&, const ContractCallContext&) = default;
};

struct ContractBehavior;
using BehaviorPtr = std::shared_ptr<const ContractBehavior>;

namespace act {

struct Transfer {
  Address to;
  Amount amount;
  friend bool operator==(const Transfer&, const Transfer&) = default;
};

struct Call {
  Address to;
  Amount amount;
  Serialized msg;
  friend bool operator==(const Call&, const Call&) = default;
};

struct Deploy {
  BehaviorPtr behavior;
  Serialized setup;
  Amount amount;
  friend bool operator==(const Deploy&, const Deploy&) = default;
};

}  // namespace act

using ActionBody = std::variant<act::Transfer, act::Call, act::Deploy>;

inline ActionBody transfer_body(Address to, Amount amount) { return act::Transfer{to, amount}; }

template <class Msg>
ActionBody call_body(Address to, Amount amount, const Msg& msg) {
  return act::Call{to, amount, serialize(msg)};
}

template <class Setup>
ActionBody deploy_body(BehaviorPtr behavior, const Setup& setup, Amount amount) {
  return act::Deploy{std::move(behavior), serialize(setup), amount};
}

struct Action {
  Address from;
  ActionBody body;
  Address origin;

  Action(Address from_addr, ActionBody b) : from(from_addr), body(std::move(b)), origin(from_addr) {}
  Action(Address from_addr, ActionBody b, Address origin_addr)
      : from(from_addr), body(std::move(b)), origin(origin_addr) {}

  friend bool operator==(const Action&, const Action&) = default;
};

struct ReceiveOutput {
  Serialized state;
  std::vector<ActionBody> actions;
};

struct ChainState;

// A contract: two pure functions over serialized setup/state/msg.
// Returning nullopt rejects the call.
struct ContractBehavior {
  using InitFn = std::function<std::optional<Serialized>(const ChainState&, const ContractCallContext&,
                                                         const Serialized& setup)>;
  using ReceiveFn = std::function<std::optional<ReceiveOutput>(
      const ChainState&, const ContractCallContext&, const Serialized& state,
      const std::optional<Serialized>& msg)>;

  std::string name;
  InitFn init;
  ReceiveFn receive;
};

struct DeployedContract {
  BehaviorPtr behavior;
  Serialized state;
  friend bool operator==(const DeployedContract&, const DeployedContract&) = default;
};

// The world: what contracts see (read-only) during execution.
struct ChainState {
  std::uint64_t height = 0;
  std::map<Address, Amount> balances;
  std::map<Address, DeployedContract> contracts;
  std::uint64_t next_contract_id = contract_base_id;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

using ChainInfo = ChainState;

enum class SchedulingPolicy { DepthFirst, BreadthFirst };

inline const char* to_string(SchedulingPolicy p) {
  return p == SchedulingPolicy::DepthFirst ? "dfs" : "bfs";
}

struct Block {
  std::uint64_t height = 0;
  std::vector<Action> actions;
  friend bool operator==(const Block&, const Block&) = default;
};

struct ChainTrace {
  ChainState genesis;
  std::vector<Block> blocks;
  SchedulingPolicy policy = SchedulingPolicy::DepthFirst;
  friend bool operator==(const ChainTrace&, const ChainTrace&) = default;
};

struct CallObservation {
  const ChainState& chain;  // as seen by receive, attached amount already moved
  const ContractCallContext& ctx;
  const Serialized& old_state;
  const std::optional<Serialized>& msg;
  const ReceiveOutput* result;  // nullptr when receive rejected the call
};

using CallObserver = std::function<void(const CallObservation&)>;

inline constexpr std::size_t max_actions_per_block_execution = 1024;

// ---------------------------------------------------------------------------
// Typed contract adapter

template <class Setup, class State, class Msg>
struct ContractSpec {
  using setup_type = Setup;
  using state_type = State;
  using msg_type = Msg;
  using receive_result = std::optional<std::pair<State, std::vector<ActionBody>>>;

  std::string name;
  std::function<std::optional<State>(const ChainState&, const ContractCallContext&, const Setup&)> init;
  std::function<receive_result(const ChainState&, const ContractCallContext&, const State&,
                               const std::optional<Msg>&)>
      receive;
};

template <class Setup, class State, class Msg>
BehaviorPtr make_contract(ContractSpec<Setup, State, Msg> spec) {
  auto shared = std::make_shared<const ContractSpec<Setup, State, Msg>>(std::move(spec));
  ContractBehavior b;
  b.name = shared->name;
  b.init = [shared](const ChainState& chain, const ContractCallContext& ctx,
                    const Serialized& setup) -> std::optional<Serialized> {
    auto st = shared->init(chain, ctx, deserialize<Setup>(setup));
    if (!st) return std::nullopt;
    return serialize(*st);
  };
  b.receive = [shared](const ChainState& chain, const ContractCallContext& ctx, const Serialized& state,
                       const std::optional<Serialized>& msg) -> std::optional<ReceiveOutput> {
    std::optional<Msg> typed_msg;
    if (msg) typed_msg = deserialize<Msg>(*msg);
    auto out = shared->receive(chain, ctx, deserialize<State>(state), typed_msg);
    if (!out) return std::nullopt;
    return ReceiveOutput{serialize(out->first), std::move(out->second)};
  };
  return std::make_shared<const ContractBehavior>(std::move(b));
}

// ---------------------------------------------------------------------------
// Queries

inline Amount account_balance(const ChainState& s, Address a) {
  auto it = s.balances.find(a);
  return it == s.balances.end() ? Amount{} : it->second;
}

inline Amount total_balance(const ChainState& s) {
  Amount sum;
  for (const auto& [_, v] : s.balances) sum += v;
  return sum;
}

// nullopt when nothing is deployed at `a`; throws codec_error when the stored
// state is not a T.
template <class T>
std::optional<T> contract_state(const ChainState& s, Address a) {
  auto it = s.contracts.find(a);
  if (it == s.contracts.end()) return std::nullopt;
  return deserialize<T>(it->second.state);
}

inline bool is_deployed(const ChainState& s, Address a) { return s.contracts.contains(a); }

// ---------------------------------------------------------------------------
// Genesis and scheduling

inline Result<ChainState> genesis(const std::map<Address, Amount>& initial_balances) {
  ChainState s;
  for (const auto& [addr, amount] : initial_balances) {
    if (is_contract(addr)) {
      return Failure{"genesis balance for contract address " + to_string(addr)};
    }
    s.balances[addr] = amount;
  }
  return s;
}

template <class Queue>
void schedule_into(Queue& queue, std::vector<typename Queue::value_type> emitted, SchedulingPolicy policy) {
  if (policy == SchedulingPolicy::DepthFirst) {
    queue.insert(queue.begin(), std::make_move_iterator(emitted.begin()),
                 std::make_move_iterator(emitted.end()));
  } else {
    queue.insert(queue.end(), std::make_move_iterator(emitted.begin()), std::make_move_iterator(emitted.end()));
  }
}

inline std::vector<Action> schedule(std::vector<Action> queue, std::vector<Action> emitted,
                                    SchedulingPolicy policy) {
  schedule_into(queue, std::move(emitted), policy);
  return queue;
}

// ---------------------------------------------------------------------------
// Execution

namespace detail {

inline std::optional<Failure> move_funds(ChainState& s, Address from, Address to, Amount amount) {
  auto& src = s.balances[from];
  auto debited = src.checked_sub(amount);
  if (!debited) {
    return Failure{"insufficient balance: " + to_string(from) + " has " + to_string(src) + ", needs " +
                   to_string(amount)};
  }
  src = *debited;
  auto& dst = s.balances[to];
  auto credited = dst.checked_add(amount);
  if (!credited) return Failure{"balance overflow at " + to_string(to)};
  dst = *credited;
  return std::nullopt;
}

inline std::optional<Failure> invoke_receive(ChainState& s, const Action& action, Address to, Amount amount,
                                             const std::optional<Serialized>& msg, std::vector<Action>& emitted,
                                             const CallObserver* observer) {
  const auto& deployed = s.contracts.at(to);
  const BehaviorPtr behavior = deployed.behavior;
  const Serialized old_state = deployed.state;
  const ContractCallContext ctx{action.origin, action.from, to, amount};
  std::optional<ReceiveOutput> out;
  try {
    out = behavior->receive(s, ctx, old_state, msg);
  } catch (const codec_error& e) {
    return Failure{std::string("codec failure in ") + behavior->name + ": " + e.what()};
  }
  if (observer && *observer) (*observer)(CallObservation{s, ctx, old_state, msg, out ? &*out : nullptr});
  if (!out) return Failure{behavior->name + " rejected call from " + to_string(action.from)};
  s.contracts[to].state = std::move(out->state);
  for (auto& body : out->actions) emitted.emplace_back(to, std::move(body), action.origin);
  return std::nullopt;
}

// Mutates `s`; on failure `s` is left partially updated and must be discarded.
inline std::optional<Failure> execute_in_place(ChainState& s, const Action& action, std::vector<Action>& emitted,
                                               const CallObserver* observer) {
  return std::visit(
      [&](const auto& body) -> std::optional<Failure> {
        using B = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<B, act::Transfer>) {
          if (auto f = move_funds(s, action.from, body.to, body.amount)) return f;
          if (is_deployed(s, body.to)) {
            return invoke_receive(s, action, body.to, body.amount, std::nullopt, emitted, observer);
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<B, act::Call>) {
          if (!is_deployed(s, body.to)) return Failure{"call to non-deployed address " + to_string(body.to)};
          if (auto f = move_funds(s, action.from, body.to, body.amount)) return f;
          return invoke_receive(s, action, body.to, body.amount, std::optional<Serialized>(body.msg), emitted,
                                observer);
        } else {
          if (!body.behavior) return Failure{"deploy without contract behavior"};
          const Address self{s.next_contract_id++};
          if (auto f = move_funds(s, action.from, self, body.amount)) return f;
          const ContractCallContext ctx{action.origin, action.from, self, body.amount};
          std::optional<Serialized> st;
          try {
            st = body.behavior->init(s, ctx, body.setup);
          } catch (const codec_error& e) {
            return Failure{std::string("codec failure in ") + body.behavior->name + " init: " + e.what()};
          }
          if (!st) return Failure{body.behavior->name + " init rejected"};
          s.contracts[self] = DeployedContract{body.behavior, std::move(*st)};
          return std::nullopt;
        }
      },
      action.body);
}

}  // namespace detail

struct StepOutput {
  ChainState state;
  std::vector<Action> emitted;
};

inline Result<StepOutput> execute_one(const ChainState& state, const Action& action,
                                      const CallObserver* observer = nullptr) {
  StepOutput out{state, {}};
  if (auto f = detail::execute_in_place(out.state, action, out.emitted, observer)) return *f;
  return out;
}

// Executes one block atomically: on failure the input state is untouched.
inline Result<ChainState> add_block(const ChainState& state, std::span<const Action> actions,
                                    SchedulingPolicy policy, const CallObserver* observer = nullptr) {
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (is_contract(actions[i].from)) {
      return Failure{"external action from contract address " + to_string(actions[i].from), i, std::nullopt};
    }
  }
  ChainState work = state;
  work.height += 1;

  struct Pending {
    Action action;
    std::size_t top;
  };
  std::deque<Pending> queue;
  for (std::size_t i = 0; i < actions.size(); ++i) queue.push_back({actions[i], i});

  std::size_t steps = 0;
  std::vector<Action> emitted;
  while (!queue.empty()) {
    if (++steps > max_actions_per_block_execution) {
      return Failure{"action limit exceeded", queue.front().top, std::nullopt};
    }
    Pending next = std::move(queue.front());
    queue.pop_front();
    emitted.clear();
    if (auto f = detail::execute_in_place(work, next.action, emitted, observer)) {
      f->action_index = next.top;
      return *f;
    }
    std::vector<Pending> wrapped;
    wrapped.reserve(emitted.size());
    for (auto& a : emitted) wrapped.push_back({std::move(a), next.top});
    schedule_into(queue, std::move(wrapped), policy);
  }
  return work;
}

inline Result<ChainState> add_block(const ChainState& state, const std::vector<Action>& actions,
                                    SchedulingPolicy policy, const CallObserver* observer = nullptr) {
  return add_block(state, std::span<const Action>(actions), policy, observer);
}

struct ReplayHooks {
  CallObserver on_call;
  std::function<void(std::size_t block_index, const ChainState& before)> on_block_begin;
  // Return false to stop the replay early.
  std::function<bool(std::size_t block_index, const ChainState& after)> on_block_end;
};

inline Result<ChainState> replay(const ChainTrace& trace, const ReplayHooks* hooks = nullptr) {
  ChainState s = trace.genesis;
  const CallObserver* observer = hooks && hooks->on_call ? &hooks->on_call : nullptr;
  for (std::size_t i = 0; i < trace.blocks.size(); ++i) {
    const auto& block = trace.blocks[i];
    if (block.height != s.height + 1) {
      return Failure{"block height " + std::to_string(block.height) + " does not follow " +
                         std::to_string(s.height),
                     std::nullopt, i};
    }
    if (hooks && hooks->on_block_begin) hooks->on_block_begin(i, s);
    auto next = add_block(s, block.actions, trace.policy, observer);
    if (!next) {
      Failure f = next.error();
      f.block_index = i;
      return f;
    }
    s = std::move(next).value();
    if (hooks && hooks->on_block_end && !hooks->on_block_end(i, s)) break;
  }
  return s;
}

// Heights follow the genesis height consecutively.
inline void renumber_blocks(ChainTrace& trace) {
  std::uint64_t h = trace.genesis.height;
  for (auto& b : trace.blocks) b.height = ++h;
}

}  // namespace chainprop
