#pragma once

// A small contract for exercising the execution layer: it counts calls and,
// depending on the message, forwards currency, calls another contract,
// deploys a copy of itself or rejects.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chainprop/chain.hpp"
#include "chainprop/gen.hpp"

namespace relay {

using namespace chainprop;

struct Ping {};
struct Forward {
  Address to;
  Amount amount;
};
struct Poke {
  Address target;
};
struct Spawn {};
struct Reject {};
// Calls `target` with a Bounce back to the sender, forever.
struct Bounce {
  Address target;
};

using Msg = std::variant<Ping, Forward, Poke, Spawn, Reject, Bounce>;

}  // namespace relay

namespace chainprop {

template <>
struct Codec<relay::Ping> {
  static constexpr std::string_view name = "relay.ping";
  static void write(ByteWriter&, const relay::Ping&) {}
  static relay::Ping read(ByteReader&) { return {}; }
  static std::string show(const relay::Ping&) { return "ping"; }
};

template <>
struct Codec<relay::Forward> {
  static constexpr std::string_view name = "relay.forward";
  static void write(ByteWriter& w, const relay::Forward& m) { w(m.to, m.amount); }
  static relay::Forward read(ByteReader& r) {
    relay::Forward m;
    m.to = r.get<Address>();
    m.amount = r.get<Amount>();
    return m;
  }
  static std::string show(const relay::Forward& m) { return "forward " + to_string(m.to) + " " + to_string(m.amount); }
};

template <>
struct Codec<relay::Poke> {
  static constexpr std::string_view name = "relay.poke";
  static void write(ByteWriter& w, const relay::Poke& m) { w(m.target); }
  static relay::Poke read(ByteReader& r) { return {r.get<Address>()}; }
  static std::string show(const relay::Poke& m) { return "poke " + to_string(m.target); }
};

template <>
struct Codec<relay::Spawn> {
  static constexpr std::string_view name = "relay.spawn";
  static void write(ByteWriter&, const relay::Spawn&) {}
  static relay::Spawn read(ByteReader&) { return {}; }
  static std::string show(const relay::Spawn&) { return "spawn"; }
};

template <>
struct Codec<relay::Reject> {
  static constexpr std::string_view name = "relay.reject";
  static void write(ByteWriter&, const relay::Reject&) {}
  static relay::Reject read(ByteReader&) { return {}; }
  static std::string show(const relay::Reject&) { return "reject"; }
};

template <>
struct Codec<relay::Bounce> {
  static constexpr std::string_view name = "relay.bounce";
  static void write(ByteWriter& w, const relay::Bounce& m) { w(m.target); }
  static relay::Bounce read(ByteReader& r) { return {r.get<Address>()}; }
  static std::string show(const relay::Bounce& m) { return "bounce " + to_string(m.target); }
};

}  // namespace chainprop

namespace relay {

inline BehaviorPtr contract();

inline ContractSpec<std::uint64_t, std::uint64_t, Msg> spec() {
  ContractSpec<std::uint64_t, std::uint64_t, Msg> s;
  s.name = "relay";
  s.init = [](const ChainState&, const ContractCallContext&, const std::uint64_t& start) -> std::optional<std::uint64_t> {
    return start;
  };
  s.receive = [](const ChainState&, const ContractCallContext& ctx, const std::uint64_t& calls,
                 const std::optional<Msg>& msg) -> std::optional<std::pair<std::uint64_t, std::vector<ActionBody>>> {
    std::vector<ActionBody> out;
    if (msg) {
      if (std::holds_alternative<Reject>(*msg)) return std::nullopt;
      if (const auto* f = std::get_if<Forward>(&*msg)) out.push_back(transfer_body(f->to, f->amount));
      if (const auto* p = std::get_if<Poke>(&*msg)) out.push_back(call_body(p->target, Amount{}, Msg{Ping{}}));
      if (std::holds_alternative<Spawn>(*msg)) out.push_back(deploy_body(contract(), std::uint64_t{0}, Amount{}));
      if (const auto* b = std::get_if<Bounce>(&*msg)) out.push_back(call_body(b->target, Amount{}, Msg{Bounce{ctx.self}}));
    }
    return std::pair{calls + 1, std::move(out)};
  };
  return s;
}

inline BehaviorPtr contract() {
  static const BehaviorPtr c = make_contract(spec());
  return c;
}

inline const std::vector<Address> users{Address{1}, Address{2}, Address{3}, Address{4}};

// Genesis funding the users; block 1 deploys two relays at 128 and 129.
inline ChainState deployed_world() {
  ChainState g = genesis({{Address{1}, 1000}, {Address{2}, 1000}, {Address{3}, 1000}, {Address{4}, 1000}}).value();
  std::vector<Action> deploy{Action(Address{1}, deploy_body(contract(), std::uint64_t{0}, Amount{50})),
                             Action(Address{2}, deploy_body(contract(), std::uint64_t{0}, Amount{50}))};
  return add_block(g, deploy, SchedulingPolicy::DepthFirst).value();
}

// Addresses that may appear as targets, including ones never deployed.
inline Gen<Address> gen_target() {
  return gen_elements(std::vector<Address>{Address{1}, Address{2}, Address{3}, Address{4}, Address{128},
                                           Address{129}, Address{130}});
}

inline Gen<Msg> gen_msg(bool emitting) {
  std::vector<std::pair<std::uint64_t, Gen<Msg>>> branches;
  branches.push_back({4, gen_return(Msg{Ping{}})});
  branches.push_back({1, gen_return(Msg{Reject{}})});
  if (emitting) {
    branches.push_back({2, gen_target().bind([](Address to) {
                          return gen_choose<std::uint64_t>(0, 80).map(
                              [to](std::uint64_t a) { return Msg{Forward{to, a}}; });
                        })});
    branches.push_back({2, gen_target().map([](Address t) { return Msg{Poke{t}}; })});
    branches.push_back({1, gen_return(Msg{Spawn{}})});
  }
  return gen_frequency(std::move(branches));
}

// Random external action; `emitting` controls whether calls may emit.
inline Gen<Action> gen_action(bool emitting) {
  return gen_elements(users).bind([emitting](Address from) {
    return gen_target().bind([from, emitting](Address to) {
      return gen_choose<std::uint64_t>(0, 400).bind([from, to, emitting](std::uint64_t amount) {
        return gen_bool().bind([from, to, amount, emitting](bool as_call) {
          if (!as_call || !is_contract(to)) return gen_return(Action(from, transfer_body(to, amount)));
          return gen_msg(emitting).map(
              [from, to, amount](Msg m) { return Action(from, call_body(to, amount, m)); });
        });
      });
    });
  });
}

inline Gen<std::vector<Action>> gen_block(bool emitting) {
  return gen_choose<std::size_t>(0, 5).bind([emitting](std::size_t n) {
    return Gen<std::vector<Action>>([n, emitting](Rng& r, std::size_t size) {
      std::vector<Action> out;
      for (std::size_t i = 0; i < n; ++i) out.push_back(gen_action(emitting)(r, size));
      return out;
    });
  });
}

}  // namespace relay

// Randomized checks of the execution semantics. Each returns an empty string
// when `cases` random blocks uphold the property, else a description of the
// first counterexample.
namespace semantics {

using namespace chainprop;

struct Case {
  ChainState state;
  std::vector<Action> block;
  SchedulingPolicy policy;
};

// A random reachable pre-state (a few successful random blocks on top of the
// deployed world) and one further random block.
inline Gen<Case> gen_case(bool emitting) {
  return Gen<Case>([emitting](Rng& r, std::size_t size) {
    ChainState s = relay::deployed_world();
    const std::size_t warmup = r.below(4);
    for (std::size_t i = 0; i < warmup; ++i) {
      if (auto next = add_block(s, relay::gen_block(true)(r, size), SchedulingPolicy::DepthFirst)) s = *next;
    }
    const auto policy = r.below(2) == 0 ? SchedulingPolicy::DepthFirst : SchedulingPolicy::BreadthFirst;
    return Case{s, relay::gen_block(emitting)(r, size), policy};
  });
}

template <class F>
std::string for_cases(std::size_t cases, std::uint64_t seed, bool emitting, F check) {
  Rng master(seed);
  const auto gen = gen_case(emitting);
  for (std::size_t i = 0; i < cases; ++i) {
    Rng r = master.split();
    Case c = gen(r, 30);
    std::string err = check(c);
    if (!err.empty()) return "case " + std::to_string(i) + ": " + err;
  }
  return {};
}

inline std::string conservation(std::size_t cases, std::uint64_t seed) {
  return for_cases(cases, seed, true, [](const Case& c) -> std::string {
    auto next = add_block(c.state, c.block, c.policy);
    if (next && total_balance(*next) != total_balance(c.state)) return "total balance changed";
    return {};
  });
}

// Appending a rejecting call makes the whole block fail, whatever succeeded
// before it, and the input state is left as it was.
inline std::string atomicity(std::size_t cases, std::uint64_t seed) {
  return for_cases(cases, seed, true, [](const Case& c) -> std::string {
    const ChainState before = c.state;
    std::vector<Action> poisoned = c.block;
    poisoned.emplace_back(relay::users[0], call_body(Address{128}, Amount{}, relay::Msg{relay::Reject{}}));
    auto next = add_block(c.state, poisoned, c.policy);
    if (next) return "block with a rejecting call succeeded";
    if (!(c.state == before)) return "input state modified";
    return {};
  });
}

inline std::string determinism(std::size_t cases, std::uint64_t seed) {
  return for_cases(cases, seed, true, [](const Case& c) -> std::string {
    ChainTrace t{c.state, {Block{c.state.height + 1, c.block}}, c.policy};
    auto a = replay(t);
    auto b = replay(t);
    if (a.ok() != b.ok()) return "replay outcome differs";
    if (a.ok() && !(*a == *b)) return "replay states differ";
    return {};
  });
}

inline std::string policy_agreement(std::size_t cases, std::uint64_t seed) {
  return for_cases(cases, seed, false, [](const Case& c) -> std::string {
    auto dfs = add_block(c.state, c.block, SchedulingPolicy::DepthFirst);
    auto bfs = add_block(c.state, c.block, SchedulingPolicy::BreadthFirst);
    if (dfs.ok() != bfs.ok()) return "policies disagree on success";
    if (dfs.ok() && !(*dfs == *bfs)) return "policies disagree on the final state";
    return {};
  });
}

// Every deployment, external or emitted, receives an address never used before.
inline std::string fresh_addresses(std::size_t cases, std::uint64_t seed) {
  return for_cases(cases, seed, true, [](const Case& c) -> std::string {
    std::vector<Action> block = c.block;
    block.emplace_back(relay::users[1], call_body(Address{129}, Amount{}, relay::Msg{relay::Spawn{}}));
    block.emplace_back(relay::users[2], deploy_body(relay::contract(), std::uint64_t{0}, Amount{}));
    std::vector<Address> seen;
    auto next = add_block(c.state, block, c.policy);
    if (!next) return {};
    for (const auto& [addr, _] : next->contracts) {
      if (c.state.contracts.contains(addr)) continue;
      if (addr.id < c.state.next_contract_id) return "reused address " + to_string(addr);
      seen.push_back(addr);
    }
    if (seen.size() != next->next_contract_id - c.state.next_contract_id) return "allocation count mismatch";
    return {};
  });
}

}  // namespace semantics
