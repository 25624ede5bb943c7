#pragma once

// Minimal fungible token the exchange pulls from. A transfer is authorized
// when the caller is the `from` account or the designated operator.

#include <map>
#include <string>

#include "chainprop/chain.hpp"

namespace chainprop::dexter {

struct TokenSetup {
  std::map<Address, Amount> balances;
  Address operator_addr;
};

struct TokenState {
  std::map<Address, Amount> balances;
  Address operator_addr;
  friend bool operator==(const TokenState&, const TokenState&) = default;
};

struct TokenTransfer {
  Address from;
  Address to;
  Amount value;
};

inline Amount token_balance(const TokenState& s, Address a) {
  auto it = s.balances.find(a);
  return it == s.balances.end() ? Amount{} : it->second;
}

inline Amount token_supply(const TokenState& s) {
  Amount sum;
  for (const auto& [_, v] : s.balances) sum += v;
  return sum;
}

}  // namespace chainprop::dexter

namespace chainprop {

template <>
struct Codec<dexter::TokenSetup> {
  static constexpr std::string_view name = "token.Setup";
  static void write(ByteWriter& w, const dexter::TokenSetup& s) { w(s.balances, s.operator_addr); }
  static dexter::TokenSetup read(ByteReader& r) {
    dexter::TokenSetup s;
    s.balances = r.get<std::map<Address, Amount>>();
    s.operator_addr = r.get<Address>();
    return s;
  }
  static std::string show(const dexter::TokenSetup& s) {
    return "TokenSetup{balances:=" + show_value(s.balances) + ";operator:=" + to_string(s.operator_addr) + "}";
  }
};

template <>
struct Codec<dexter::TokenState> {
  static constexpr std::string_view name = "token.State";
  static void write(ByteWriter& w, const dexter::TokenState& s) { w(s.balances, s.operator_addr); }
  static dexter::TokenState read(ByteReader& r) {
    dexter::TokenState s;
    s.balances = r.get<std::map<Address, Amount>>();
    s.operator_addr = r.get<Address>();
    return s;
  }
  static std::string show(const dexter::TokenState& s) {
    return "TokenState{balances:=" + show_value(s.balances) + "}";
  }
};

template <>
struct Codec<dexter::TokenTransfer> {
  static constexpr std::string_view name = "token.Msg";
  static void write(ByteWriter& w, const dexter::TokenTransfer& m) { w(m.from, m.to, m.value); }
  static dexter::TokenTransfer read(ByteReader& r) {
    dexter::TokenTransfer m;
    m.from = r.get<Address>();
    m.to = r.get<Address>();
    m.value = r.get<Amount>();
    return m;
  }
  static std::string show(const dexter::TokenTransfer& m) {
    return "transfer " + to_string(m.from) + " " + to_string(m.to) + " " + to_string(m.value);
  }
  static std::vector<dexter::TokenTransfer> shrink(const dexter::TokenTransfer& m) {
    std::vector<dexter::TokenTransfer> out;
    for (Amount v : Codec<Amount>::shrink(m.value)) out.push_back({m.from, m.to, v});
    return out;
  }
};

}  // namespace chainprop

namespace chainprop::dexter {

inline ContractSpec<TokenSetup, TokenState, TokenTransfer> token_spec() {
  ContractSpec<TokenSetup, TokenState, TokenTransfer> spec;
  spec.name = "token";
  spec.init = [](const ChainState&, const ContractCallContext&, const TokenSetup& setup) -> std::optional<TokenState> {
    return TokenState{setup.balances, setup.operator_addr};
  };
  spec.receive = [](const ChainState&, const ContractCallContext& ctx, const TokenState& state,
                    const std::optional<TokenTransfer>& msg) -> decltype(spec)::receive_result {
    if (!msg || !ctx.amount.is_zero()) return std::nullopt;
    if (ctx.from != msg->from && ctx.from != state.operator_addr) return std::nullopt;
    TokenState next = state;
    auto src = token_balance(next, msg->from).checked_sub(msg->value);
    if (!src) return std::nullopt;
    next.balances[msg->from] = *src;
    auto dst = token_balance(next, msg->to).checked_add(msg->value);
    if (!dst) return std::nullopt;
    next.balances[msg->to] = *dst;
    return std::pair{std::move(next), std::vector<ActionBody>{}};
  };
  return spec;
}

inline BehaviorPtr token_contract() {
  static const BehaviorPtr c = make_contract(token_spec());
  return c;
}

}  // namespace chainprop::dexter
