#pragma once

#include <optional>
#include <vector>

#include "chainprop/check.hpp"
#include "chainprop/itoken/itoken.hpp"

namespace chainprop::itoken {

inline constexpr Address itoken_addr{contract_base_id};
inline const std::vector<Address> users{Address{10}, Address{11}, Address{12}, Address{13}};
inline constexpr std::uint64_t initial_user_tokens = 100;

inline Gen<Address> gen_user() { return gen_elements(users); }

inline std::vector<CallGenerator> call_generators() {
  std::vector<CallGenerator> gens;
  // from, to and sender are drawn independently; amount never exceeds `from`'s balance.
  gens.push_back(call_generator<ITokenState, ITokenMsg>(
      "transfer_from", itoken_addr, 3, [](const ChainState&, const ITokenState& s) {
        return gen_user().bind([s](Address sender) {
          return gen_user().bind([s, sender](Address from) {
            return gen_user().bind([s, sender, from](Address to) {
              return gen_choose<std::uint64_t>(0, balance_of(s, from).to_u64()).map([sender, from, to](std::uint64_t a) {
                return proposal<ITokenMsg>(sender, Amount{}, TransferFrom{from, to, a});
              });
            });
          });
        });
      }));
  gens.push_back(call_generator<ITokenState, ITokenMsg>(
      "mint", itoken_addr, 1, [](const ChainState&, const ITokenState&) {
        return gen_user().bind([](Address sender) {
          return gen_choose<std::uint64_t>(0, 50).map([sender](std::uint64_t a) {
            return proposal<ITokenMsg>(sender, Amount{}, Mint{a});
          });
        });
      }));
  gens.push_back(call_generator<ITokenState, ITokenMsg>(
      "burn", itoken_addr, 1, [](const ChainState&, const ITokenState& s) {
        return gen_user().bind([s](Address sender) {
          return gen_choose<std::uint64_t>(0, balance_of(s, sender).to_u64()).map([sender](std::uint64_t a) {
            return proposal<ITokenMsg>(sender, Amount{}, Burn{a});
          });
        });
      }));
  return gens;
}

inline TraceSetup make_setup(Variant variant) {
  TraceSetup setup;
  std::map<Address, Amount> initial;
  for (Address u : users) initial[u] = initial_user_tokens;
  setup.genesis = genesis({}).value();
  setup.deploy.emplace_back(users.front(), deploy_body(itoken_contract(variant), ITokenSetup{initial}, Amount{}));
  setup.call_gens = call_generators();
  return setup;
}

inline HoareSpec sum_balances_triple() {
  return hoare<ITokenState, ITokenMsg>(msg_is_not_mint_or_burn, sum_balances_unchanged);
}

inline CheckResult check_sum_balances(Variant variant, const TraceGenConfig& cfg) {
  return check_hoare(sum_balances_triple(), itoken_addr, make_setup(variant), cfg);
}

}  // namespace chainprop::itoken
