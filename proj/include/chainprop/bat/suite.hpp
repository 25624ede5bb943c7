#pragma once

// Generators and the safety properties of the crowdsale token:
//   funding_final     once finalized, always finalized
//   funding_possible  every deployment can reach the finalized state
//   no_owner_refund   the owner's free tokens are never redeemed
//   refund_guarantee  the balance covers every token not held by the owner
//   no_frozen_funds   a scripted drain always empties the contract

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainprop/bat/bat.hpp"
#include "chainprop/check.hpp"

namespace chainprop::bat {

inline constexpr Address bat_addr{contract_base_id};
inline constexpr Address deployer{10};
inline constexpr Address owner{17};
// Users that may buy tokens; the owner only holds free tokens.
inline const std::vector<Address> buyers{Address{10}, Address{11}, Address{12}, Address{13},
                                         Address{14}, Address{15}, Address{16}};
inline const std::vector<Address> all_users{Address{10}, Address{11}, Address{12}, Address{13},
                                            Address{14}, Address{15}, Address{16}, Address{17}};

inline BatSetup default_setup() {
  BatSetup s;
  s.fund_addr = owner;
  s.bat_fund_addr = owner;
  s.funding_start = 1;
  s.funding_end = 4;
  s.token_exchange_rate = 2;
  s.token_creation_cap = 400;
  s.token_creation_min = 250;
  s.bat_fund = 100;
  return s;
}

inline constexpr std::uint64_t default_buyer_currency = 60;

struct GenWeights {
  std::uint64_t valid = 3;
  std::uint64_t invalid = 1;
};

// ---------------------------------------------------------------------------
// Call generators. Valid variants return absent when no valid call exists in
// the next block; invalid variants draw arbitrary senders and parameters.

using Call = std::optional<Proposal<BatMsg>>;

namespace detail {

inline Gen<Call> none() { return gen_return(Call{}); }

inline std::vector<Address> holders(const BatState& s) {
  std::vector<Address> out;
  for (const auto& [a, v] : s.balances) {
    if (!v.is_zero()) out.push_back(a);
  }
  return out;
}

inline Gen<Address> any_user() { return gen_elements(all_users); }

inline Gen<std::uint64_t> upto(Amount bound) { return gen_choose<std::uint64_t>(0, bound.to_u64()); }

}  // namespace detail

inline Gen<Call> gCreateTokens(const ChainState& chain, const BatState& s) {
  const std::uint64_t next = chain.height + 1;
  if (s.is_finalized || !in_funding_window(s, next) || s.setup.token_exchange_rate == 0) return detail::none();
  if (s.total_supply >= s.setup.token_creation_cap) return detail::none();
  const Amount room = (s.setup.token_creation_cap - s.total_supply) / s.setup.token_exchange_rate;
  std::vector<Address> funded;
  for (Address a : buyers) {
    if (!account_balance(chain, a).is_zero()) funded.push_back(a);
  }
  if (room.is_zero() || funded.empty()) return detail::none();
  return gen_elements(funded).bind([chain, room](Address sender) {
    const std::uint64_t most = std::min(account_balance(chain, sender), room).to_u64();
    return gen_frequency<std::uint64_t>({{3, gen_choose<std::uint64_t>(1, most)}, {1, gen_return(most)}})
        .map([sender](std::uint64_t a) { return proposal<BatMsg>(sender, a, CreateTokens{}); });
  });
}

inline Gen<Call> gCreateTokensInvalid(const ChainState& chain, const BatState&) {
  return detail::any_user().bind([chain](Address sender) {
    return detail::upto(account_balance(chain, sender)).map([sender](std::uint64_t a) {
      return proposal<BatMsg>(sender, a, CreateTokens{});
    });
  });
}

inline Gen<Call> gFinalize(const ChainState& chain, const BatState& s) {
  if (!can_finalize(s, chain.height + 1)) return detail::none();
  return gen_return(proposal<BatMsg>(s.setup.fund_addr, Amount{}, Finalize{}));
}

inline Gen<Call> gFinalizeInvalid(const ChainState&, const BatState&) {
  return detail::any_user().map([](Address sender) { return proposal<BatMsg>(sender, Amount{}, Finalize{}); });
}

inline Gen<Call> gRefund(const ChainState& chain, const BatState& s) {
  if (!refunds_open(s, chain.height + 1)) return detail::none();
  std::vector<Address> eligible;
  for (Address a : detail::holders(s)) {
    if (a != s.setup.bat_fund_addr) eligible.push_back(a);
  }
  if (eligible.empty()) return detail::none();
  return gen_elements(eligible).map([](Address sender) { return proposal<BatMsg>(sender, Amount{}, Refund{}); });
}

inline Gen<Call> gRefundInvalid(const ChainState&, const BatState&) {
  return detail::any_user().map([](Address sender) { return proposal<BatMsg>(sender, Amount{}, Refund{}); });
}

inline Gen<Call> gTransfer(const ChainState&, const BatState& s) {
  auto from = detail::holders(s);
  if (from.empty()) return detail::none();
  return gen_elements(from).bind([s](Address sender) {
    return detail::any_user().bind([s, sender](Address to) {
      return gen_choose<std::uint64_t>(1, balance_of(s, sender).to_u64()).map([sender, to](std::uint64_t v) {
        return proposal<BatMsg>(sender, Amount{}, Transfer{to, v});
      });
    });
  });
}

inline Gen<Call> gTransferInvalid(const ChainState&, const BatState&) {
  return detail::any_user().bind([](Address sender) {
    return detail::any_user().bind([sender](Address to) {
      return gen_choose<std::uint64_t>(0, 200).map(
          [sender, to](std::uint64_t v) { return proposal<BatMsg>(sender, Amount{}, Transfer{to, v}); });
    });
  });
}

inline Gen<Call> gTransferFrom(const ChainState&, const BatState& s) {
  std::vector<std::pair<Address, Address>> usable;
  for (const auto& [key, v] : s.allowances) {
    if (!v.is_zero() && !balance_of(s, key.first).is_zero()) usable.push_back(key);
  }
  if (usable.empty()) return detail::none();
  return gen_elements(usable).bind([s](std::pair<Address, Address> key) {
    const Amount most = std::min(allowance_of(s, key.first, key.second), balance_of(s, key.first));
    return detail::any_user().bind([key, most](Address to) {
      return gen_choose<std::uint64_t>(1, most.to_u64()).map([key, to](std::uint64_t v) {
        return proposal<BatMsg>(key.second, Amount{}, TransferFrom{key.first, to, v});
      });
    });
  });
}

inline Gen<Call> gTransferFromInvalid(const ChainState&, const BatState&) {
  return detail::any_user().bind([](Address sender) {
    return detail::any_user().bind([sender](Address from) {
      return detail::any_user().bind([sender, from](Address to) {
        return gen_choose<std::uint64_t>(0, 200).map([sender, from, to](std::uint64_t v) {
          return proposal<BatMsg>(sender, Amount{}, TransferFrom{from, to, v});
        });
      });
    });
  });
}

inline Gen<Call> gApprove(const ChainState&, const BatState& s) {
  auto from = detail::holders(s);
  if (from.empty()) return detail::none();
  return gen_elements(from).bind([s](Address sender) {
    return detail::any_user().bind([s, sender](Address spender) {
      return gen_choose<std::uint64_t>(1, balance_of(s, sender).to_u64()).map([sender, spender](std::uint64_t v) {
        return proposal<BatMsg>(sender, Amount{}, Approve{spender, v});
      });
    });
  });
}

// Any approval is valid, so the invalid dual sometimes attaches currency.
inline Gen<Call> gApproveInvalid(const ChainState& chain, const BatState&) {
  return detail::any_user().bind([chain](Address sender) {
    const Amount held = account_balance(chain, sender);
    auto attached = gen_frequency<std::uint64_t>({{1, gen_return(std::uint64_t{0})}, {1, detail::upto(held)}});
    return attached.bind([sender](std::uint64_t amount) {
      return detail::any_user().bind([sender, amount](Address spender) {
        return gen_choose<std::uint64_t>(0, 200).map([sender, amount, spender](std::uint64_t v) {
          return proposal<BatMsg>(sender, amount, Approve{spender, v});
        });
      });
    });
  });
}

// All duals merged into one call generator by gen_frequency.
inline CallGenerator call_generator(GenWeights w = {}) {
  return chainprop::call_generator<BatState, BatMsg>(
      "bat", bat_addr, 1, [w](const ChainState& chain, const BatState& s) {
        return gen_frequency<Call>({
            {w.valid, gCreateTokens(chain, s)},
            {w.invalid, gCreateTokensInvalid(chain, s)},
            {w.valid, gFinalize(chain, s)},
            {w.invalid, gFinalizeInvalid(chain, s)},
            {w.valid, gRefund(chain, s)},
            {w.invalid, gRefundInvalid(chain, s)},
            {w.valid, gTransfer(chain, s)},
            {w.invalid, gTransferInvalid(chain, s)},
            {w.valid, gTransferFrom(chain, s)},
            {w.invalid, gTransferFromInvalid(chain, s)},
            {w.valid, gApprove(chain, s)},
            {w.invalid, gApproveInvalid(chain, s)},
        });
      });
}

// Buyers each hold `buyer_currency`; the deployment block is block 1.
inline TraceSetup make_setup(const BatSetup& setup = default_setup(), Amount buyer_currency = default_buyer_currency,
                             GenWeights w = {}) {
  TraceSetup t;
  std::map<Address, Amount> initial;
  for (Address a : buyers) initial[a] = buyer_currency;
  t.genesis = genesis(initial).value();
  t.deploy.emplace_back(deployer, deploy_body(bat_contract(), setup, Amount{}));
  t.call_gens.push_back(call_generator(w));
  return t;
}

inline std::string entrypoint_label(const CallObservation& o) {
  if (!o.msg || !holds<BatMsg>(*o.msg)) return "other";
  return entrypoint_name(deserialize<BatMsg>(*o.msg));
}

// ---------------------------------------------------------------------------
// State predicates

inline bool is_finalized(const ChainState& cs) {
  auto s = contract_state<BatState>(cs, bat_addr);
  return s && s->is_finalized;
}

inline StateCheck contract_balance_lower_bound(const ChainState& cs) {
  auto s = contract_state<BatState>(cs, bat_addr);
  if (!s) return true;
  if (s->is_finalized) return true;
  const Amount owner_balance = balance_of(*s, s->setup.fund_addr);
  const Amount contract_balance = account_balance(cs, bat_addr);
  const Amount real = s->total_supply.checked_sub(owner_balance).value_or(Amount{});
  const Amount needed = s->setup.token_exchange_rate == 0 ? Amount{} : real / s->setup.token_exchange_rate;
  if (contract_balance >= needed) return true;
  return {false, "contract balance " + to_string(contract_balance) + " < " + to_string(needed) +
                     " needed to refund " + to_string(real) + " tokens not held by the owner"};
}

inline StateCheck supply_matches_balances(const ChainState& cs) {
  auto s = contract_state<BatState>(cs, bat_addr);
  if (!s || balances_sum(*s) == s->total_supply) return true;
  return {false, "total_supply " + to_string(s->total_supply) + " != sum of balances " + to_string(balances_sum(*s))};
}

// ---------------------------------------------------------------------------
// Scripted drain: finalize now if possible, otherwise after funding_end;
// failing that, every holder refunds in address order. Returns the balance left.

inline Amount drain_residue(ChainState cs, SchedulingPolicy policy) {
  auto s = contract_state<BatState>(cs, bat_addr);
  if (!s) return Amount{};
  auto try_block = [&](std::vector<Action> actions) {
    auto next = add_block(cs, actions, policy);
    if (!next) return false;
    cs = std::move(next).value();
    return true;
  };
  const Action finalize(s->setup.fund_addr, call_body(bat_addr, Amount{}, BatMsg{Finalize{}}));
  if (try_block({finalize})) return account_balance(cs, bat_addr);
  while (cs.height + 1 <= s->setup.funding_end) try_block({});
  if (try_block({finalize})) return account_balance(cs, bat_addr);
  for (Address holder : detail::holders(*contract_state<BatState>(cs, bat_addr))) {
    try_block({Action(holder, call_body(bat_addr, Amount{}, BatMsg{Refund{}}))});
  }
  return account_balance(cs, bat_addr);
}

inline StateProperty drainable(SchedulingPolicy policy) {
  return [policy](const ChainState& cs) -> StateCheck {
    const Amount left = drain_residue(cs, policy);
    if (left.is_zero()) return true;
    return {false, "draining leaves " + to_string(left) + " frozen in the contract"};
  };
}

// ---------------------------------------------------------------------------
// Properties

inline TraceProperty funding_final() {
  return [](const ChainTrace& t) {
    std::optional<std::string> failure;
    bool finalized = false;
    ReplayHooks hooks;
    hooks.on_block_end = [&](std::size_t i, const ChainState& s) {
      const bool now = is_finalized(s);
      if (finalized && !now) failure = "finalization reverted in block " + std::to_string(t.blocks[i].height);
      finalized = now;
      return !failure;
    };
    auto r = replay(t, &hooks);
    if (!r) return Outcome::invalid(describe(r.error()));
    if (failure) return Outcome::violated(*failure);
    return Outcome::holds();
  };
}

// Tokens are tracked in two classes per holder, free (the owner's initial
// allotment) and funded (bought with currency); transfers move free tokens
// first. A refund that pays for free tokens violates the property.
inline TraceProperty no_owner_refund() {
  return [](const ChainTrace& t) {
    struct Holding {
      Amount free;
      Amount funded;
    };
    std::map<Address, Holding> held;
    bool initialised = false;
    std::optional<std::string> failure;
    auto move = [&](Address from, Address to, Amount v) {
      Holding& src = held[from];
      const Amount free = std::min(src.free, v);
      src.free -= free;
      src.funded -= v - free;
      held[to].free += free;
      held[to].funded += v - free;
    };
    ReplayHooks hooks;
    hooks.on_call = [&](const CallObservation& o) {
      if (failure || o.ctx.self != bat_addr || !o.result || !o.msg) return;
      const auto old = deserialize<BatState>(o.old_state);
      if (!initialised) {
        held[old.setup.bat_fund_addr].free = old.setup.bat_fund;
        initialised = true;
      }
      const BatMsg msg = deserialize<BatMsg>(*o.msg);
      if (std::holds_alternative<CreateTokens>(msg)) {
        held[o.ctx.from].funded += o.ctx.amount * old.setup.token_exchange_rate;
      } else if (const auto* m = std::get_if<Transfer>(&msg)) {
        move(o.ctx.from, m->to, m->value);
      } else if (const auto* m = std::get_if<TransferFrom>(&msg)) {
        move(m->from, m->to, m->value);
      } else if (std::holds_alternative<Refund>(msg)) {
        const Holding h = held[o.ctx.from];
        const std::uint64_t rate = old.setup.token_exchange_rate;
        const Amount paid = (h.free + h.funded) / rate;
        if (!h.free.is_zero() && paid > h.funded / rate) {
          failure = "refund to " + to_string(o.ctx.from) + " paid " + to_string(paid) + " for " +
                    to_string(h.free) + " free and " + to_string(h.funded) + " funded tokens at rate " +
                    std::to_string(rate);
        }
        held[o.ctx.from] = Holding{};
      }
    };
    hooks.on_block_end = [&](std::size_t, const ChainState&) { return !failure; };
    auto r = replay(t, &hooks);
    if (!r) return Outcome::invalid(describe(r.error()));
    if (failure) return Outcome::violated(*failure);
    return Outcome::holds();
  };
}

inline TraceProperty refund_guarantee() { return all_states_property(contract_balance_lower_bound); }

inline TraceProperty no_frozen_funds(SchedulingPolicy policy) { return all_states_property(drainable(policy)); }

inline TraceProperty supply_invariant() { return all_states_property(supply_matches_balances); }

// ---------------------------------------------------------------------------
// Functional correctness, one triple per entrypoint. Each post-condition
// states that the call is accepted exactly when its guards hold and, if so,
// describes the resulting state and emitted actions.

template <class M>
bool msg_is(const BatState&, const BatMsg& m) {
  return std::holds_alternative<M>(m);
}

using Post = HoarePost<BatState, BatMsg>;

inline bool no_other_changes(const BatState& a, const BatState& b) {
  return a.is_finalized == b.is_finalized && a.setup == b.setup;
}

inline bool create_tokens_post(const ChainState& chain, const ContractCallContext& ctx, const BatState& old,
                               const BatMsg&, const ReceiveResult& r) {
  const auto tokens = ctx.amount.checked_mul(old.setup.token_exchange_rate);
  const auto supply = tokens ? old.total_supply.checked_add(*tokens) : std::nullopt;
  const bool guards = !old.is_finalized && in_funding_window(old, chain.height) && !ctx.amount.is_zero() && supply &&
                      *supply <= old.setup.token_creation_cap;
  if (r.has_value() != guards) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  return acts.empty() && s.total_supply == *supply &&
         balance_of(s, ctx.from) == balance_of(old, ctx.from) + *tokens && s.allowances == old.allowances &&
         no_other_changes(old, s);
}

inline bool finalize_post(const ChainState& chain, const ContractCallContext& ctx, const BatState& old,
                          const BatMsg&, const ReceiveResult& r) {
  const bool guards = ctx.amount.is_zero() && ctx.from == old.setup.fund_addr && can_finalize(old, chain.height);
  if (r.has_value() != guards) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  if (acts.size() != 1) return false;
  const auto* t = std::get_if<act::Transfer>(&acts[0]);
  return t && t->to == old.setup.fund_addr && t->amount == account_balance(chain, ctx.self) && s.is_finalized &&
         s.balances == old.balances && s.total_supply == old.total_supply;
}

inline bool refund_post(const ChainState& chain, const ContractCallContext& ctx, const BatState& old, const BatMsg&,
                        const ReceiveResult& r) {
  const Amount held = balance_of(old, ctx.from);
  const bool guards = ctx.amount.is_zero() && refunds_open(old, chain.height) && ctx.from != old.setup.bat_fund_addr &&
                      !held.is_zero();
  if (r.has_value() != guards) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  if (acts.size() != 1) return false;
  const auto* t = std::get_if<act::Transfer>(&acts[0]);
  return t && t->to == ctx.from && t->amount == held / old.setup.token_exchange_rate &&
         balance_of(s, ctx.from).is_zero() && s.total_supply + held == old.total_supply && no_other_changes(old, s);
}

inline bool transfer_post(const ChainState&, const ContractCallContext& ctx, const BatState& old, const BatMsg& msg,
                          const ReceiveResult& r) {
  const auto& m = std::get<Transfer>(msg);
  const bool guards = ctx.amount.is_zero() && balance_of(old, ctx.from) >= m.value;
  if (r.has_value() != guards) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  if (!acts.empty() || balances_sum(s) != balances_sum(old) || s.total_supply != old.total_supply) return false;
  if (m.to == ctx.from) return balance_of(s, ctx.from) == balance_of(old, ctx.from);
  return balance_of(s, ctx.from) + m.value == balance_of(old, ctx.from) &&
         balance_of(s, m.to) == balance_of(old, m.to) + m.value;
}

inline bool transfer_from_post(const ChainState&, const ContractCallContext& ctx, const BatState& old,
                               const BatMsg& msg, const ReceiveResult& r) {
  const auto& m = std::get<TransferFrom>(msg);
  const Amount allowed = allowance_of(old, m.from, ctx.from);
  const bool guards = ctx.amount.is_zero() && allowed >= m.value && balance_of(old, m.from) >= m.value;
  if (r.has_value() != guards) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  if (!acts.empty() || balances_sum(s) != balances_sum(old) || s.total_supply != old.total_supply) return false;
  if (allowance_of(s, m.from, ctx.from) + m.value != allowed) return false;
  if (m.to == m.from) return balance_of(s, m.from) == balance_of(old, m.from);
  return balance_of(s, m.from) + m.value == balance_of(old, m.from) &&
         balance_of(s, m.to) == balance_of(old, m.to) + m.value;
}

inline bool approve_post(const ChainState&, const ContractCallContext& ctx, const BatState& old, const BatMsg& msg,
                         const ReceiveResult& r) {
  const auto& m = std::get<Approve>(msg);
  if (r.has_value() != ctx.amount.is_zero()) return false;
  if (!r) return true;
  const auto& [s, acts] = *r;
  return acts.empty() && allowance_of(s, ctx.from, m.spender) == m.value && s.balances == old.balances &&
         s.total_supply == old.total_supply && no_other_changes(old, s);
}

struct NamedTriple {
  std::string name;
  HoareSpec spec;
};

inline std::vector<NamedTriple> triples() {
  return {
      {"create_tokens", hoare<BatState, BatMsg>(msg_is<CreateTokens>, Post(create_tokens_post))},
      {"finalize", hoare<BatState, BatMsg>(msg_is<Finalize>, Post(finalize_post))},
      {"refund", hoare<BatState, BatMsg>(msg_is<Refund>, Post(refund_post))},
      {"transfer", hoare<BatState, BatMsg>(msg_is<Transfer>, Post(transfer_post))},
      {"transfer_from", hoare<BatState, BatMsg>(msg_is<TransferFrom>, Post(transfer_from_post))},
      {"approve", hoare<BatState, BatMsg>(msg_is<Approve>, Post(approve_post))},
  };
}

// ---------------------------------------------------------------------------
// Deployment configurations for funding_possible.

inline Gen<BatSetup> gBATSetup() {
  return gen_choose<std::uint64_t>(0, 12).bind([](std::uint64_t start) {
    return gen_choose<std::uint64_t>(0, 12).bind([start](std::uint64_t end) {
      return gen_choose<std::uint64_t>(1, 5).bind([start, end](std::uint64_t rate) {
        return gen_choose<std::uint64_t>(0, 1000).bind([start, end, rate](std::uint64_t cap) {
          auto min = gen_frequency<std::uint64_t>({{3, gen_choose<std::uint64_t>(0, cap)},
                                                    {1, gen_choose<std::uint64_t>(0, 1000)}});
          return min.bind([start, end, rate, cap](std::uint64_t min_tokens) {
            return gen_choose<std::uint64_t>(0, 100).map([=](std::uint64_t fund) {
              BatSetup s;
              s.fund_addr = owner;
              s.bat_fund_addr = owner;
              s.funding_start = start;
              s.funding_end = end;
              s.token_exchange_rate = rate;
              s.token_creation_cap = cap;
              s.token_creation_min = min_tokens;
              s.bat_fund = fund;
              return s;
            });
          });
        });
      });
    });
  });
}

// Each buyer alone holds enough currency to buy up to the cap.
inline Amount currency_for(const BatSetup& s) {
  const std::uint64_t rate = std::max<std::uint64_t>(s.token_exchange_rate, 1);
  return (s.token_creation_cap + Amount{rate - 1}) / rate;
}

// Chain right after deployment in block 1.
inline std::optional<ChainState> build_init_cb(const BatSetup& s) {
  const TraceSetup t = make_setup(s, currency_for(s));
  auto deployed = add_block(t.genesis, t.deploy, SchedulingPolicy::DepthFirst);
  if (!deployed) return std::nullopt;
  return std::move(deployed).value();
}

struct ReachConfig {
  std::size_t traces = 200;
  std::size_t max_blocks = 16;
};

inline CheckResult reach_finalized(const ChainState& start, std::uint64_t seed, const TraceGenConfig& outer,
                                   ReachConfig rc = {}) {
  TraceGenConfig cfg = outer;
  cfg.num_tests = rc.traces;
  cfg.max_blocks = rc.max_blocks;
  cfg.seed = seed;
  return check_reachable(start, is_finalized, {call_generator()}, cfg);
}

inline CheckResult check_funding_possible(const TraceGenConfig& cfg, ReachConfig rc = {}) {
  return for_all<BatSetup>(
      gBATSetup(), build_init_cb,
      [cfg, rc](const ChainState& cs, std::uint64_t seed) { return reach_finalized(cs, seed, cfg, rc); },
      [](const BatSetup& s) { return Codec<BatSetup>::show(s); }, cfg);
}

// Why a deployment cannot be funded, judged from the parameters alone.
enum class FundingClass {
  fundable,
  window_closed,  // no block after deployment lies in the funding window
  min_above_cap,  // the minimum exceeds the cap, so neither finalize route opens
  granularity,    // no whole purchase lands the supply in [min, cap]
};

inline const char* class_name(FundingClass c) {
  switch (c) {
    case FundingClass::fundable: return "fundable";
    case FundingClass::window_closed: return "window_closed";
    case FundingClass::min_above_cap: return "min_above_cap";
    case FundingClass::granularity: return "granularity";
  }
  return "?";
}

inline FundingClass classify_setup(const BatSetup& s, std::uint64_t deploy_height = 1) {
  if (s.bat_fund >= s.token_creation_min) return FundingClass::fundable;
  if (std::max(s.funding_start, deploy_height + 1) > s.funding_end) return FundingClass::window_closed;
  if (s.token_creation_min > s.token_creation_cap) return FundingClass::min_above_cap;
  const Amount rate = s.token_exchange_rate;
  const Amount missing = s.token_creation_min - s.bat_fund;
  const Amount units = (missing + rate - Amount{1}) / rate;
  if (s.bat_fund + units * rate > s.token_creation_cap) return FundingClass::granularity;
  return FundingClass::fundable;
}

struct UnfundableSetup {
  BatSetup setup;
  FundingClass cls;
  CheckResult result;
};

// Runs the funding_possible check over `setups` generated configurations and
// collects every one whose search failed.
inline std::vector<UnfundableSetup> sweep_funding_possible(std::size_t setups, const TraceGenConfig& cfg,
                                                           ReachConfig rc = {}) {
  std::vector<UnfundableSetup> out;
  const auto gen = gBATSetup();
  Rng master(cfg.seed);
  for (std::size_t i = 0; i < setups; ++i) {
    Rng rng = next_case(master);
    BatSetup s = gen(rng, cfg.size);
    const std::uint64_t seed = rng.next_u64();
    auto cs = build_init_cb(s);
    if (!cs) continue;
    CheckResult r = reach_finalized(*cs, seed, cfg, rc);
    if (is_failed(r)) out.push_back({s, classify_setup(s), std::move(r)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Entry points used by the runner.

enum class Property { funding_final, funding_possible, no_owner_refund, refund_guarantee, no_frozen_funds };

inline const std::vector<std::pair<std::string, Property>>& property_names() {
  static const std::vector<std::pair<std::string, Property>> names{
      {"funding_final", Property::funding_final},       {"funding_possible", Property::funding_possible},
      {"no_owner_refund", Property::no_owner_refund},   {"refund_guarantee", Property::refund_guarantee},
      {"no_frozen_funds", Property::no_frozen_funds},
  };
  return names;
}

inline CheckResult check_property(Property p, const TraceGenConfig& cfg) {
  switch (p) {
    case Property::funding_final: return check_traces(funding_final(), make_setup(), cfg);
    case Property::funding_possible: return check_funding_possible(cfg);
    case Property::no_owner_refund: return check_traces(no_owner_refund(), make_setup(), cfg);
    case Property::refund_guarantee: return check_traces(refund_guarantee(), make_setup(), cfg);
    case Property::no_frozen_funds: return check_traces(no_frozen_funds(cfg.policy), make_setup(), cfg);
  }
  return Errored{0, "unknown property"};
}

}  // namespace chainprop::bat
