#pragma once

// Trade-splitting property for the exchange: within one block, the currency a
// trader receives from all of their trades must not exceed the payout of one
// trade of the summed tokens against the block-start reserves.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainprop/check.hpp"
#include "chainprop/dexter/exchange.hpp"
#include "chainprop/variant.hpp"

namespace chainprop::dexter {

inline constexpr Address liquidity_provider{10};
inline constexpr Address trader_a{11};
inline constexpr Address trader_b{12};
inline constexpr Address token_addr{contract_base_id};
inline constexpr Address exchange_addr{contract_base_id + 1};

struct PoolConfig {
  Amount token_pool = 10000;
  Amount tez_pool = 10000;
  Amount trader_tokens = 2000;
};

inline TraceSetup make_setup(Variant variant, const PoolConfig& pools = {}) {
  TraceSetup setup;
  setup.genesis = genesis({{liquidity_provider, pools.tez_pool}}).value();
  TokenSetup token;
  token.balances = {{exchange_addr, pools.token_pool}, {trader_a, pools.trader_tokens}, {trader_b, pools.trader_tokens}};
  token.operator_addr = exchange_addr;
  setup.deploy.emplace_back(liquidity_provider, deploy_body(token_contract(), token, Amount{}));
  const BehaviorPtr exchange = variant == Variant::buggy ? dexter_contract() : dexter_fixed_contract();
  setup.deploy.emplace_back(liquidity_provider,
                            deploy_body(exchange, DexterSetup{token_addr, pools.token_pool}, pools.tez_pool));

  // Traders sell between one token and their whole balance, no slippage bound.
  auto propose = [](const ChainState& chain) -> Gen<std::optional<Action>> {
    if (!is_deployed(chain, exchange_addr)) return gen_return(std::optional<Action>{});
    const auto token_state = contract_state<TokenState>(chain, token_addr);
    return gen_elements(std::vector<Address>{trader_a, trader_b}).bind([token_state](Address trader) {
      const Amount held = token_state ? token_balance(*token_state, trader) : Amount{};
      if (held.is_zero()) return gen_return(std::optional<Action>{});
      return gen_choose<std::uint64_t>(1, held.to_u64()).map([trader](std::uint64_t n) {
        return std::optional<Action>(Action(trader, call_body(exchange_addr, Amount{}, TokensToTez{n, 0})));
      });
    });
  };
  setup.call_gens.push_back(CallGenerator{"tokens_to_tez", 1, propose});
  return setup;
}

// Block-start reserves of either variant.
struct Reserves {
  Amount tokens;
  Amount tez;
};

inline std::optional<Reserves> reserves_at(const ChainState& chain, Address exchange) {
  auto it = chain.contracts.find(exchange);
  if (it == chain.contracts.end()) return std::nullopt;
  if (holds<FixedDexterState>(it->second.state)) {
    auto s = deserialize<FixedDexterState>(it->second.state);
    return Reserves{s.token_pool, s.tez_pool};
  }
  auto s = deserialize<DexterState>(it->second.state);
  return Reserves{s.token_pool, account_balance(chain, exchange)};
}

struct TraderBlockTotals {
  Amount tokens_sold;
  Amount tez_received;
  std::size_t trades = 0;
};

// Per-trader totals over one block.
struct BlockTrades {
  std::optional<Reserves> start;
  std::map<Address, TraderBlockTotals> traders;
};

// Empty string when every trader's split trades are no better than a single
// trade; otherwise a description of the first violation.
inline std::string splitting_violation(const BlockTrades& block) {
  if (!block.start) return {};
  for (const auto& [trader, totals] : block.traders) {
    auto single = get_input_price(totals.tokens_sold, block.start->tokens, block.start->tez);
    if (!single) continue;
    if (totals.tez_received > *single) {
      return "trader " + to_string(trader) + " sold " + to_string(totals.tokens_sold) + " tokens in " +
             std::to_string(totals.trades) + " trades for " + to_string(totals.tez_received) +
             " tez; a single trade pays " + to_string(*single) + " (reserves " + to_string(block.start->tokens) +
             " tokens, " + to_string(block.start->tez) + " tez)";
    }
  }
  return {};
}

inline void record_trade(BlockTrades& block, const CallObservation& o, Address exchange) {
  if (o.ctx.self != exchange || !o.msg || !o.result) return;
  const auto m = deserialize<TokensToTez>(*o.msg);
  auto& totals = block.traders[o.ctx.from];
  totals.tokens_sold += m.tokens_sold;
  ++totals.trades;
  for (const auto& body : o.result->actions) {
    if (const auto* t = std::get_if<act::Transfer>(&body); t && t->to == o.ctx.from) totals.tez_received += t->amount;
  }
}

inline TraceProperty no_profit_from_splitting(Address exchange = exchange_addr) {
  return [exchange](const ChainTrace& t) {
    BlockTrades block;
    std::string failure;
    ReplayHooks hooks;
    hooks.on_block_begin = [&](std::size_t, const ChainState& before) {
      block = BlockTrades{reserves_at(before, exchange), {}};
    };
    hooks.on_call = [&](const CallObservation& o) { record_trade(block, o, exchange); };
    hooks.on_block_end = [&](std::size_t i, const ChainState&) {
      failure = splitting_violation(block);
      if (!failure.empty()) failure = "block " + std::to_string(t.blocks[i].height) + ": " + failure;
      return failure.empty();
    };
    auto r = replay(t, &hooks);
    if (!r) return Outcome::invalid(describe(r.error()));
    if (!failure.empty()) return Outcome::violated(failure);
    return Outcome::holds();
  };
}

// token_pool matches the exchange's token balance at every block boundary.
inline StateProperty token_pool_consistent(Address exchange = exchange_addr, Address token = token_addr) {
  return [exchange, token](const ChainState& s) -> StateCheck {
    auto r = reserves_at(s, exchange);
    auto ts = contract_state<TokenState>(s, token);
    if (!r || !ts) return true;
    const Amount held = token_balance(*ts, exchange);
    if (r->tokens == held) return true;
    return {false, "token_pool " + to_string(r->tokens) + " != token balance " + to_string(held)};
  };
}

inline CheckResult check_no_profit(Variant variant, const TraceGenConfig& cfg) {
  return check_traces(no_profit_from_splitting(), make_setup(variant), cfg);
}

}  // namespace chainprop::dexter
