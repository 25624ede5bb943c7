#pragma once

// Constant-product token -> currency exchange. Only the trade entrypoint is
// modelled.
//
// The buggy variant tracks its token reserve in state but reads its currency
// reserve from its live balance. Under breadth-first scheduling a second trade
// in the same block executes before the first trade's payout leaves the
// contract, so it is priced against a stale (too large) currency reserve. The
// fixed variant tracks both reserves in state.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainprop/chain.hpp"
#include "chainprop/dexter/token.hpp"

namespace chainprop::dexter {

struct DexterSetup {
  Address token_addr;
  Amount initial_token_pool;
};

struct DexterState {
  Amount token_pool;
  Address token_addr;
  friend bool operator==(const DexterState&, const DexterState&) = default;
};

struct FixedDexterState {
  Amount token_pool;
  Amount tez_pool;
  Address token_addr;
  friend bool operator==(const FixedDexterState&, const FixedDexterState&) = default;
};

struct TokensToTez {
  Amount tokens_sold;
  Amount min_tez_out;
};

using DexterMsg = TokensToTez;

// floor(tokens_sold * 997 * tez_reserve / (token_reserve * 1000 + tokens_sold * 997)).
// nullopt for an empty token pool or on overflow.
inline std::optional<Amount> get_input_price(Amount tokens_sold, Amount token_reserve, Amount tez_reserve) {
  if (token_reserve.is_zero()) return std::nullopt;
  auto sold_fee = tokens_sold.checked_mul(997);
  if (!sold_fee) return std::nullopt;
  auto num = sold_fee->checked_mul(tez_reserve);
  auto reserve_scaled = token_reserve.checked_mul(1000);
  if (!num || !reserve_scaled) return std::nullopt;
  auto den = reserve_scaled->checked_add(*sold_fee);
  if (!den) return std::nullopt;
  return *num / *den;
}

}  // namespace chainprop::dexter

namespace chainprop {

template <>
struct Codec<dexter::DexterSetup> {
  static constexpr std::string_view name = "dexter.Setup";
  static void write(ByteWriter& w, const dexter::DexterSetup& s) { w(s.token_addr, s.initial_token_pool); }
  static dexter::DexterSetup read(ByteReader& r) {
    dexter::DexterSetup s;
    s.token_addr = r.get<Address>();
    s.initial_token_pool = r.get<Amount>();
    return s;
  }
  static std::string show(const dexter::DexterSetup& s) {
    return "Setup{token:=" + to_string(s.token_addr) + ";token_pool:=" + to_string(s.initial_token_pool) + "}";
  }
};

template <>
struct Codec<dexter::DexterState> {
  static constexpr std::string_view name = "dexter.State";
  static void write(ByteWriter& w, const dexter::DexterState& s) { w(s.token_pool, s.token_addr); }
  static dexter::DexterState read(ByteReader& r) {
    dexter::DexterState s;
    s.token_pool = r.get<Amount>();
    s.token_addr = r.get<Address>();
    return s;
  }
  static std::string show(const dexter::DexterState& s) {
    return "State{token_pool:=" + to_string(s.token_pool) + "}";
  }
};

template <>
struct Codec<dexter::FixedDexterState> {
  static constexpr std::string_view name = "dexter_fixed.State";
  static void write(ByteWriter& w, const dexter::FixedDexterState& s) { w(s.token_pool, s.tez_pool, s.token_addr); }
  static dexter::FixedDexterState read(ByteReader& r) {
    dexter::FixedDexterState s;
    s.token_pool = r.get<Amount>();
    s.tez_pool = r.get<Amount>();
    s.token_addr = r.get<Address>();
    return s;
  }
  static std::string show(const dexter::FixedDexterState& s) {
    return "State{token_pool:=" + to_string(s.token_pool) + ";tez_pool:=" + to_string(s.tez_pool) + "}";
  }
};

template <>
struct Codec<dexter::TokensToTez> {
  static constexpr std::string_view name = "dexter.Msg";
  static void write(ByteWriter& w, const dexter::TokensToTez& m) { w(m.tokens_sold, m.min_tez_out); }
  static dexter::TokensToTez read(ByteReader& r) {
    dexter::TokensToTez m;
    m.tokens_sold = r.get<Amount>();
    m.min_tez_out = r.get<Amount>();
    return m;
  }
  static std::string show(const dexter::TokensToTez& m) {
    return "tokens_to_tez " + to_string(m.tokens_sold) + " " + to_string(m.min_tez_out);
  }
  static std::vector<dexter::TokensToTez> shrink(const dexter::TokensToTez& m) {
    std::vector<dexter::TokensToTez> out;
    for (Amount v : Codec<Amount>::shrink(m.tokens_sold)) out.push_back({v, m.min_tez_out});
    for (Amount v : Codec<Amount>::shrink(m.min_tez_out)) out.push_back({m.tokens_sold, v});
    return out;
  }
};

}  // namespace chainprop

namespace chainprop::dexter {

namespace detail {

// Shared trade logic: prices against (token_reserve, tez_reserve), emits the
// token pull followed by the payout.
inline std::optional<std::pair<Amount, std::vector<ActionBody>>> trade(const ContractCallContext& ctx,
                                                                       Address token_addr, const TokensToTez& m,
                                                                       Amount token_reserve, Amount tez_reserve) {
  if (!ctx.amount.is_zero() || m.tokens_sold.is_zero()) return std::nullopt;
  auto payout = get_input_price(m.tokens_sold, token_reserve, tez_reserve);
  if (!payout || *payout < m.min_tez_out) return std::nullopt;
  std::vector<ActionBody> emitted;
  emitted.push_back(call_body(token_addr, Amount{}, TokenTransfer{ctx.from, ctx.self, m.tokens_sold}));
  emitted.push_back(transfer_body(ctx.from, *payout));
  return std::pair{*payout, std::move(emitted)};
}

}  // namespace detail

inline ContractSpec<DexterSetup, DexterState, DexterMsg> dexter_spec() {
  ContractSpec<DexterSetup, DexterState, DexterMsg> spec;
  spec.name = "dexter";
  spec.init = [](const ChainState&, const ContractCallContext& ctx, const DexterSetup& s) -> std::optional<DexterState> {
    if (ctx.amount.is_zero() || s.initial_token_pool.is_zero()) return std::nullopt;
    return DexterState{s.initial_token_pool, s.token_addr};
  };
  spec.receive = [](const ChainState& chain, const ContractCallContext& ctx, const DexterState& state,
                    const std::optional<DexterMsg>& msg) -> decltype(spec)::receive_result {
    if (!msg) return std::nullopt;
    // Currency reserve read from the live balance.
    auto t = detail::trade(ctx, state.token_addr, *msg, state.token_pool, account_balance(chain, ctx.self));
    if (!t) return std::nullopt;
    DexterState next = state;
    next.token_pool = state.token_pool + msg->tokens_sold;
    return std::pair{next, std::move(t->second)};
  };
  return spec;
}

inline ContractSpec<DexterSetup, FixedDexterState, DexterMsg> dexter_fixed_spec() {
  ContractSpec<DexterSetup, FixedDexterState, DexterMsg> spec;
  spec.name = "dexter_fixed";
  spec.init = [](const ChainState&, const ContractCallContext& ctx,
                 const DexterSetup& s) -> std::optional<FixedDexterState> {
    if (ctx.amount.is_zero() || s.initial_token_pool.is_zero()) return std::nullopt;
    return FixedDexterState{s.initial_token_pool, ctx.amount, s.token_addr};
  };
  spec.receive = [](const ChainState&, const ContractCallContext& ctx, const FixedDexterState& state,
                    const std::optional<DexterMsg>& msg) -> decltype(spec)::receive_result {
    if (!msg) return std::nullopt;
    auto t = detail::trade(ctx, state.token_addr, *msg, state.token_pool, state.tez_pool);
    if (!t) return std::nullopt;
    FixedDexterState next = state;
    next.token_pool = state.token_pool + msg->tokens_sold;
    next.tez_pool = state.tez_pool - t->first;
    return std::pair{next, std::move(t->second)};
  };
  return spec;
}

inline BehaviorPtr dexter_contract() {
  static const BehaviorPtr c = make_contract(dexter_spec());
  return c;
}

inline BehaviorPtr dexter_fixed_contract() {
  static const BehaviorPtr c = make_contract(dexter_fixed_spec());
  return c;
}

}  // namespace chainprop::dexter
