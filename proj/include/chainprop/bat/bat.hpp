#pragma once

// Crowdsale combined with an ERC-20 style token. During the funding window
// users buy tokens at a fixed rate; afterwards the owner finalizes (if the
// minimum was reached) and receives the whole balance, or holders refund by
// burning their tokens. The owner's free tokens count toward the supply.
//
// Deployment parameters are deliberately not validated.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chainprop/chain.hpp"

namespace chainprop::bat {

struct BatSetup {
  Address fund_addr;      // receives the raised currency on finalize
  Address bat_fund_addr;  // holds the free tokens; may not refund
  std::uint64_t funding_start = 0;
  std::uint64_t funding_end = 0;
  std::uint64_t token_exchange_rate = 1;
  Amount token_creation_cap;
  Amount token_creation_min;
  Amount bat_fund;

  friend bool operator==(const BatSetup&, const BatSetup&) = default;
};

struct BatState {
  std::map<Address, Amount> balances;
  std::map<std::pair<Address, Address>, Amount> allowances;  // (owner, spender)
  Amount total_supply;
  bool is_finalized = false;
  BatSetup setup;

  friend bool operator==(const BatState&, const BatState&) = default;
};

struct CreateTokens {};
struct Finalize {};
struct Refund {};
struct Transfer {
  Address to;
  Amount value;
};
struct TransferFrom {
  Address from;
  Address to;
  Amount value;
};
struct Approve {
  Address spender;
  Amount value;
};

using BatMsg = std::variant<CreateTokens, Finalize, Refund, Transfer, TransferFrom, Approve>;

inline const char* entrypoint_name(const BatMsg& m) {
  static constexpr const char* names[] = {"create_tokens", "finalize", "refund", "transfer", "transfer_from", "approve"};
  return names[m.index()];
}

inline Amount balance_of(const BatState& s, Address a) {
  auto it = s.balances.find(a);
  return it == s.balances.end() ? Amount{} : it->second;
}

inline Amount allowance_of(const BatState& s, Address owner, Address spender) {
  auto it = s.allowances.find({owner, spender});
  return it == s.allowances.end() ? Amount{} : it->second;
}

inline Amount balances_sum(const BatState& s) {
  Amount sum;
  for (const auto& [_, v] : s.balances) sum += v;
  return sum;
}

}  // namespace chainprop::bat

namespace chainprop {

template <>
struct Codec<bat::BatSetup> {
  static constexpr std::string_view name = "bat.Setup";
  static void write(ByteWriter& w, const bat::BatSetup& s) {
    w(s.fund_addr, s.bat_fund_addr, s.funding_start, s.funding_end, s.token_exchange_rate, s.token_creation_cap,
      s.token_creation_min, s.bat_fund);
  }
  static bat::BatSetup read(ByteReader& r) {
    bat::BatSetup s;
    s.fund_addr = r.get<Address>();
    s.bat_fund_addr = r.get<Address>();
    s.funding_start = r.get<std::uint64_t>();
    s.funding_end = r.get<std::uint64_t>();
    s.token_exchange_rate = r.get<std::uint64_t>();
    s.token_creation_cap = r.get<Amount>();
    s.token_creation_min = r.get<Amount>();
    s.bat_fund = r.get<Amount>();
    return s;
  }
  static std::string show(const bat::BatSetup& s) {
    return "Setup{owner:=" + to_string(s.fund_addr) + ";bat_fund_addr:=" + to_string(s.bat_fund_addr) +
           ";funding_start:=" + std::to_string(s.funding_start) + ";funding_end:=" + std::to_string(s.funding_end) +
           ";rate:=" + std::to_string(s.token_exchange_rate) + ";cap:=" + to_string(s.token_creation_cap) +
           ";min:=" + to_string(s.token_creation_min) + ";bat_fund:=" + to_string(s.bat_fund) + "}";
  }
};

template <>
struct Codec<bat::BatState> {
  static constexpr std::string_view name = "bat.State";
  static void write(ByteWriter& w, const bat::BatState& s) {
    w(s.balances, s.allowances, s.total_supply, s.is_finalized, s.setup);
  }
  static bat::BatState read(ByteReader& r) {
    bat::BatState s;
    s.balances = r.get<std::map<Address, Amount>>();
    s.allowances = r.get<std::map<std::pair<Address, Address>, Amount>>();
    s.total_supply = r.get<Amount>();
    s.is_finalized = r.get<bool>();
    s.setup = r.get<bat::BatSetup>();
    return s;
  }
  static std::string show(const bat::BatState& s) {
    return "State{balances:=" + show_value(s.balances) + ";total_supply:=" + to_string(s.total_supply) +
           ";is_finalized:=" + show_value(s.is_finalized) + "}";
  }
};

template <>
struct Codec<bat::CreateTokens> {
  static constexpr std::string_view name = "bat.create_tokens";
  static void write(ByteWriter&, const bat::CreateTokens&) {}
  static bat::CreateTokens read(ByteReader&) { return {}; }
  static std::string show(const bat::CreateTokens&) { return "create_tokens"; }
};

template <>
struct Codec<bat::Finalize> {
  static constexpr std::string_view name = "bat.finalize";
  static void write(ByteWriter&, const bat::Finalize&) {}
  static bat::Finalize read(ByteReader&) { return {}; }
  static std::string show(const bat::Finalize&) { return "finalize"; }
};

template <>
struct Codec<bat::Refund> {
  static constexpr std::string_view name = "bat.refund";
  static void write(ByteWriter&, const bat::Refund&) {}
  static bat::Refund read(ByteReader&) { return {}; }
  static std::string show(const bat::Refund&) { return "refund"; }
};

template <>
struct Codec<bat::Transfer> {
  static constexpr std::string_view name = "bat.transfer";
  static void write(ByteWriter& w, const bat::Transfer& m) { w(m.to, m.value); }
  static bat::Transfer read(ByteReader& r) {
    bat::Transfer m;
    m.to = r.get<Address>();
    m.value = r.get<Amount>();
    return m;
  }
  static std::string show(const bat::Transfer& m) { return "transfer " + to_string(m.to) + " " + to_string(m.value); }
  static std::vector<bat::Transfer> shrink(const bat::Transfer& m) {
    std::vector<bat::Transfer> out;
    for (Amount v : Codec<Amount>::shrink(m.value)) out.push_back({m.to, v});
    return out;
  }
};

template <>
struct Codec<bat::TransferFrom> {
  static constexpr std::string_view name = "bat.transfer_from";
  static void write(ByteWriter& w, const bat::TransferFrom& m) { w(m.from, m.to, m.value); }
  static bat::TransferFrom read(ByteReader& r) {
    bat::TransferFrom m;
    m.from = r.get<Address>();
    m.to = r.get<Address>();
    m.value = r.get<Amount>();
    return m;
  }
  static std::string show(const bat::TransferFrom& m) {
    return "transfer_from " + to_string(m.from) + " " + to_string(m.to) + " " + to_string(m.value);
  }
  static std::vector<bat::TransferFrom> shrink(const bat::TransferFrom& m) {
    std::vector<bat::TransferFrom> out;
    for (Amount v : Codec<Amount>::shrink(m.value)) out.push_back({m.from, m.to, v});
    return out;
  }
};

template <>
struct Codec<bat::Approve> {
  static constexpr std::string_view name = "bat.approve";
  static void write(ByteWriter& w, const bat::Approve& m) { w(m.spender, m.value); }
  static bat::Approve read(ByteReader& r) {
    bat::Approve m;
    m.spender = r.get<Address>();
    m.value = r.get<Amount>();
    return m;
  }
  static std::string show(const bat::Approve& m) {
    return "approve " + to_string(m.spender) + " " + to_string(m.value);
  }
  static std::vector<bat::Approve> shrink(const bat::Approve& m) {
    std::vector<bat::Approve> out;
    for (Amount v : Codec<Amount>::shrink(m.value)) out.push_back({m.spender, v});
    return out;
  }
};

}  // namespace chainprop

namespace chainprop::bat {

using ReceiveResult = std::optional<std::pair<BatState, std::vector<ActionBody>>>;

inline bool in_funding_window(const BatState& s, std::uint64_t height) {
  return s.setup.funding_start <= height && height <= s.setup.funding_end;
}

inline bool can_finalize(const BatState& s, std::uint64_t height) {
  return !s.is_finalized && s.total_supply >= s.setup.token_creation_min &&
         (height > s.setup.funding_end || s.total_supply == s.setup.token_creation_cap);
}

inline bool refunds_open(const BatState& s, std::uint64_t height) {
  return !s.is_finalized && height > s.setup.funding_end && s.total_supply < s.setup.token_creation_min;
}

namespace detail {

inline ReceiveResult accept(BatState s, std::vector<ActionBody> emitted = {}) {
  return std::pair{std::move(s), std::move(emitted)};
}

inline bool move_tokens(BatState& s, Address from, Address to, Amount value) {
  auto debited = balance_of(s, from).checked_sub(value);
  if (!debited) return false;
  s.balances[from] = *debited;
  auto credited = balance_of(s, to).checked_add(value);
  if (!credited) return false;
  s.balances[to] = *credited;
  return true;
}

}  // namespace detail

inline ReceiveResult bat_receive(const ChainState& chain, const ContractCallContext& ctx, const BatState& state,
                                 const std::optional<BatMsg>& msg) {
  if (!msg) return std::nullopt;
  const std::uint64_t height = chain.height;
  const bool payable = std::holds_alternative<CreateTokens>(*msg);
  if (!payable && !ctx.amount.is_zero()) return std::nullopt;

  return std::visit(
      [&](const auto& m) -> ReceiveResult {
        using M = std::decay_t<decltype(m)>;
        BatState s = state;
        if constexpr (std::is_same_v<M, CreateTokens>) {
          if (s.is_finalized || !in_funding_window(s, height) || ctx.amount.is_zero()) return std::nullopt;
          auto tokens = ctx.amount.checked_mul(s.setup.token_exchange_rate);
          if (!tokens) return std::nullopt;
          auto supply = s.total_supply.checked_add(*tokens);
          if (!supply || *supply > s.setup.token_creation_cap) return std::nullopt;
          s.total_supply = *supply;
          s.balances[ctx.from] = balance_of(s, ctx.from) + *tokens;
          return detail::accept(std::move(s));
        } else if constexpr (std::is_same_v<M, Finalize>) {
          if (ctx.from != s.setup.fund_addr || !can_finalize(s, height)) return std::nullopt;
          s.is_finalized = true;
          return detail::accept(std::move(s), {transfer_body(s.setup.fund_addr, account_balance(chain, ctx.self))});
        } else if constexpr (std::is_same_v<M, Refund>) {
          if (!refunds_open(s, height) || ctx.from == s.setup.bat_fund_addr) return std::nullopt;
          const Amount held = balance_of(s, ctx.from);
          if (held.is_zero() || s.setup.token_exchange_rate == 0) return std::nullopt;
          s.balances[ctx.from] = Amount{};
          s.total_supply = s.total_supply - held;
          return detail::accept(std::move(s), {transfer_body(ctx.from, held / s.setup.token_exchange_rate)});
        } else if constexpr (std::is_same_v<M, Transfer>) {
          if (!detail::move_tokens(s, ctx.from, m.to, m.value)) return std::nullopt;
          return detail::accept(std::move(s));
        } else if constexpr (std::is_same_v<M, TransferFrom>) {
          auto remaining = allowance_of(s, m.from, ctx.from).checked_sub(m.value);
          if (!remaining) return std::nullopt;
          if (!detail::move_tokens(s, m.from, m.to, m.value)) return std::nullopt;
          s.allowances[{m.from, ctx.from}] = *remaining;
          return detail::accept(std::move(s));
        } else {
          s.allowances[{ctx.from, m.spender}] = m.value;
          return detail::accept(std::move(s));
        }
      },
      *msg);
}

inline ContractSpec<BatSetup, BatState, BatMsg> bat_spec() {
  ContractSpec<BatSetup, BatState, BatMsg> spec;
  spec.name = "bat";
  spec.init = [](const ChainState&, const ContractCallContext&, const BatSetup& setup) -> std::optional<BatState> {
    BatState s;
    s.balances[setup.bat_fund_addr] = setup.bat_fund;
    s.total_supply = setup.bat_fund;
    s.setup = setup;
    return s;
  };
  spec.receive = bat_receive;
  return spec;
}

inline BehaviorPtr bat_contract() {
  static const BehaviorPtr c = make_contract(bat_spec());
  return c;
}

}  // namespace chainprop::bat
