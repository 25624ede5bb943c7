#pragma once

// Interest-token transfer logic with the original statement ordering:
//
//   balanceFrom = balances[from];
//   balanceTo   = balances[to];
//   balances[from] = balanceFrom - amount;
//   balances[to]   = balanceTo + amount;
//
// Both reads precede both writes, so a transfer with from == to credits the
// stale balance and mints `amount` tokens. The fixed variant reads
// balances[to] after the subtraction has been written.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chainprop/chain.hpp"
#include "chainprop/variant.hpp"

namespace chainprop::itoken {

struct ITokenSetup {
  std::map<Address, Amount> balances;
};

struct ITokenState {
  std::map<Address, Amount> balances;
  friend bool operator==(const ITokenState&, const ITokenState&) = default;
};

struct TransferFrom {
  Address from;
  Address to;
  Amount amount;
};

struct Mint {
  Amount amount;
};

struct Burn {
  Amount amount;
};

using ITokenMsg = std::variant<TransferFrom, Mint, Burn>;

inline Amount balance_of(const ITokenState& s, Address a) {
  auto it = s.balances.find(a);
  return it == s.balances.end() ? Amount{} : it->second;
}

inline Amount balances_sum(const ITokenState& s) {
  Amount sum;
  for (const auto& [_, v] : s.balances) sum += v;
  return sum;
}

}  // namespace chainprop::itoken

namespace chainprop {

template <>
struct Codec<itoken::ITokenSetup> {
  static constexpr std::string_view name = "itoken.Setup";
  static void write(ByteWriter& w, const itoken::ITokenSetup& s) { w(s.balances); }
  static itoken::ITokenSetup read(ByteReader& r) { return {r.get<std::map<Address, Amount>>()}; }
  static std::string show(const itoken::ITokenSetup& s) { return "Setup{balances:=" + show_value(s.balances) + "}"; }
};

template <>
struct Codec<itoken::ITokenState> {
  static constexpr std::string_view name = "itoken.State";
  static void write(ByteWriter& w, const itoken::ITokenState& s) { w(s.balances); }
  static itoken::ITokenState read(ByteReader& r) { return {r.get<std::map<Address, Amount>>()}; }
  static std::string show(const itoken::ITokenState& s) { return "State{balances:=" + show_value(s.balances) + "}"; }
};

template <>
struct Codec<itoken::TransferFrom> {
  static constexpr std::string_view name = "itoken.transfer_from";
  static void write(ByteWriter& w, const itoken::TransferFrom& m) { w(m.from, m.to, m.amount); }
  static itoken::TransferFrom read(ByteReader& r) {
    itoken::TransferFrom m;
    m.from = r.get<Address>();
    m.to = r.get<Address>();
    m.amount = r.get<Amount>();
    return m;
  }
  static std::string show(const itoken::TransferFrom& m) {
    return "transfer_from " + to_string(m.from) + " " + to_string(m.to) + " " + to_string(m.amount);
  }
  static std::vector<itoken::TransferFrom> shrink(const itoken::TransferFrom& m) {
    std::vector<itoken::TransferFrom> out;
    for (Amount a : Codec<Amount>::shrink(m.amount)) out.push_back({m.from, m.to, a});
    return out;
  }
};

template <>
struct Codec<itoken::Mint> {
  static constexpr std::string_view name = "itoken.mint";
  static void write(ByteWriter& w, const itoken::Mint& m) { w(m.amount); }
  static itoken::Mint read(ByteReader& r) { return {r.get<Amount>()}; }
  static std::string show(const itoken::Mint& m) { return "mint " + to_string(m.amount); }
  static std::vector<itoken::Mint> shrink(const itoken::Mint& m) {
    std::vector<itoken::Mint> out;
    for (Amount a : Codec<Amount>::shrink(m.amount)) out.push_back({a});
    return out;
  }
};

template <>
struct Codec<itoken::Burn> {
  static constexpr std::string_view name = "itoken.burn";
  static void write(ByteWriter& w, const itoken::Burn& m) { w(m.amount); }
  static itoken::Burn read(ByteReader& r) { return {r.get<Amount>()}; }
  static std::string show(const itoken::Burn& m) { return "burn " + to_string(m.amount); }
  static std::vector<itoken::Burn> shrink(const itoken::Burn& m) {
    std::vector<itoken::Burn> out;
    for (Amount a : Codec<Amount>::shrink(m.amount)) out.push_back({a});
    return out;
  }
};

}  // namespace chainprop

namespace chainprop::itoken {

using ReceiveResult = std::optional<std::pair<ITokenState, std::vector<ActionBody>>>;

inline std::optional<ITokenState> transfer_from(const ITokenState& state, const TransferFrom& m, Variant variant) {
  ITokenState next = state;
  if (variant == Variant::buggy) {
    const Amount balance_from = balance_of(next, m.from);
    const Amount balance_to = balance_of(next, m.to);
    auto debited = balance_from.checked_sub(m.amount);
    if (!debited) return std::nullopt;
    next.balances[m.from] = *debited;
    auto credited = balance_to.checked_add(m.amount);
    if (!credited) return std::nullopt;
    next.balances[m.to] = *credited;
  } else {
    const Amount balance_from = balance_of(next, m.from);
    auto debited = balance_from.checked_sub(m.amount);
    if (!debited) return std::nullopt;
    next.balances[m.from] = *debited;
    const Amount balance_to = balance_of(next, m.to);
    auto credited = balance_to.checked_add(m.amount);
    if (!credited) return std::nullopt;
    next.balances[m.to] = *credited;
  }
  return next;
}

inline ReceiveResult itoken_receive(const ContractCallContext& ctx, const ITokenState& state,
                                    const std::optional<ITokenMsg>& msg, Variant variant) {
  if (!msg || !ctx.amount.is_zero()) return std::nullopt;
  std::optional<ITokenState> next = std::visit(
      [&](const auto& m) -> std::optional<ITokenState> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, TransferFrom>) {
          return transfer_from(state, m, variant);
        } else if constexpr (std::is_same_v<M, Mint>) {
          ITokenState s = state;
          auto credited = balance_of(s, ctx.from).checked_add(m.amount);
          if (!credited) return std::nullopt;
          s.balances[ctx.from] = *credited;
          return s;
        } else {
          ITokenState s = state;
          auto debited = balance_of(s, ctx.from).checked_sub(m.amount);
          if (!debited) return std::nullopt;
          s.balances[ctx.from] = *debited;
          return s;
        }
      },
      *msg);
  if (!next) return std::nullopt;
  return std::pair{std::move(*next), std::vector<ActionBody>{}};
}

inline ContractSpec<ITokenSetup, ITokenState, ITokenMsg> itoken_spec(Variant variant) {
  ContractSpec<ITokenSetup, ITokenState, ITokenMsg> spec;
  spec.name = variant == Variant::buggy ? "itoken" : "itoken_fixed";
  spec.init = [](const ChainState&, const ContractCallContext&, const ITokenSetup& s) -> std::optional<ITokenState> {
    return ITokenState{s.balances};
  };
  spec.receive = [variant](const ChainState&, const ContractCallContext& ctx, const ITokenState& state,
                           const std::optional<ITokenMsg>& msg) { return itoken_receive(ctx, state, msg, variant); };
  return spec;
}

inline BehaviorPtr itoken_contract(Variant variant) {
  static const BehaviorPtr buggy = make_contract(itoken_spec(Variant::buggy));
  static const BehaviorPtr fixed = make_contract(itoken_spec(Variant::fixed));
  return variant == Variant::buggy ? buggy : fixed;
}

inline bool msg_is_not_mint_or_burn(const ITokenState&, const ITokenMsg& msg) {
  return std::holds_alternative<TransferFrom>(msg);
}

// True when the call was rejected ("nothing changed").
inline bool sum_balances_unchanged(const ChainState&, const ContractCallContext&, const ITokenState& old_state,
                                   const ITokenMsg&, const ReceiveResult& result) {
  if (!result) return true;
  return balances_sum(old_state) == balances_sum(result->first);
}

}  // namespace chainprop::itoken
