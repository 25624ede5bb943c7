#include <gtest/gtest.h>

#include <set>

#include "chainprop/bat/suite.hpp"

using namespace chainprop;
using namespace chainprop::bat;

namespace {

const Address buyer{14};

TraceGenConfig cfg(std::size_t tests, std::uint64_t seed) {
  TraceGenConfig c;
  c.num_tests = tests;
  c.seed = seed;
  return c;
}

ChainState deployed(const BatSetup& s = default_setup()) {
  const TraceSetup t = make_setup(s);
  return add_block(t.genesis, t.deploy, SchedulingPolicy::DepthFirst).value();
}

Action call(Address from, BatMsg m, Amount attached = Amount{}) {
  return Action(from, call_body(bat_addr, attached, m));
}

Result<ChainState> step(const ChainState& s, std::vector<Action> actions) {
  return add_block(s, actions, SchedulingPolicy::DepthFirst);
}

BatState state(const ChainState& s) { return *contract_state<BatState>(s, bat_addr); }

BatSetup with_rate(std::uint64_t rate) {
  BatSetup s = default_setup();
  s.token_exchange_rate = rate;
  return s;
}

}  // namespace

TEST(CreateTokens, MintsAtRate) {
  auto next = step(deployed(with_rate(3)), {call(buyer, CreateTokens{}, 5)});
  ASSERT_TRUE(next.ok());
  EXPECT_EQ(balance_of(state(*next), buyer), Amount{15});
  EXPECT_EQ(state(*next).total_supply, Amount{115});
  EXPECT_EQ(account_balance(*next, bat_addr), Amount{5});
  EXPECT_TRUE(contract_balance_lower_bound(*next).ok);
}

TEST(CreateTokens, Guards) {
  const ChainState s = deployed();
  EXPECT_FALSE(step(s, {call(buyer, CreateTokens{}, 151)}).ok());  // 100 + 302 > 400
  EXPECT_TRUE(step(s, {call(buyer, CreateTokens{}, 60)}).ok());
  EXPECT_FALSE(step(s, {call(buyer, CreateTokens{}, 0)}).ok());
  ChainState late = s;
  for (int i = 0; i < 3; ++i) late = step(late, {}).value();
  EXPECT_EQ(late.height, 4u);
  EXPECT_FALSE(step(late, {call(buyer, CreateTokens{}, 1)}).ok());
}

TEST(CreateTokens, CapByTwoBuyers) {
  const ChainState s = deployed();
  auto next = step(s, {call(Address{10}, CreateTokens{}, 60), call(Address{11}, CreateTokens{}, 60),
                       call(Address{12}, CreateTokens{}, 30)});
  ASSERT_TRUE(next.ok());
  EXPECT_EQ(state(*next).total_supply, Amount{400});
  EXPECT_FALSE(step(*next, {call(Address{13}, CreateTokens{}, 1)}).ok());
}

TEST(Finalize, Guards) {
  const ChainState s = deployed();
  auto funded = step(s, {call(Address{10}, CreateTokens{}, 60), call(Address{11}, CreateTokens{}, 60),
                         call(Address{12}, CreateTokens{}, 30)});
  ASSERT_TRUE(funded.ok());
  EXPECT_FALSE(step(*funded, {call(buyer, Finalize{})}).ok());
  // Cap reached before funding_end.
  auto fin = step(*funded, {call(owner, Finalize{})});
  ASSERT_TRUE(fin.ok());
  EXPECT_TRUE(is_finalized(*fin));
  EXPECT_EQ(account_balance(*fin, owner), Amount{150});
  EXPECT_EQ(account_balance(*fin, bat_addr), Amount{0});
  EXPECT_FALSE(step(*fin, {call(owner, Finalize{})}).ok());
  EXPECT_FALSE(step(s, {call(owner, Finalize{})}).ok());
  EXPECT_FALSE(step(*funded, {call(owner, Finalize{}, 1)}).ok());
}

TEST(Finalize, AfterEndWithMinimum) {
  ChainState s = step(deployed(), {call(Address{10}, CreateTokens{}, 60), call(Address{11}, CreateTokens{}, 20)}).value();
  EXPECT_EQ(state(s).total_supply, Amount{260});
  EXPECT_FALSE(step(s, {call(owner, Finalize{})}).ok());
  while (s.height < 4) s = step(s, {}).value();
  EXPECT_TRUE(step(s, {call(owner, Finalize{})}).ok());
}

TEST(Refund, PaysAtRate) {
  BatSetup setup = with_rate(3);
  setup.funding_end = 2;
  auto s = step(deployed(setup), {call(buyer, CreateTokens{}, 5)}).value();
  auto r = step(s, {call(buyer, Refund{})});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(balance_of(state(*r), buyer), Amount{0});
  EXPECT_EQ(account_balance(*r, buyer), Amount{60});
  EXPECT_EQ(state(*r).total_supply, Amount{100});
  EXPECT_FALSE(step(s, {call(owner, Refund{})}).ok());
  EXPECT_FALSE(step(*r, {call(buyer, Refund{})}).ok());
}

TEST(Refund, ClosedBeforeEnd) {
  auto s = step(deployed(), {call(buyer, CreateTokens{}, 5)}).value();
  EXPECT_EQ(s.height, 2u);
  EXPECT_FALSE(step(s, {call(buyer, Refund{})}).ok());
}

TEST(Tokens, OwnerTransfer) {
  auto next = step(deployed(), {call(owner, Transfer{buyer, 16})});
  ASSERT_TRUE(next.ok());
  EXPECT_EQ(balance_of(state(*next), owner), Amount{84});
  EXPECT_EQ(balance_of(state(*next), buyer), Amount{16});
  EXPECT_FALSE(step(deployed(), {call(owner, Transfer{buyer, 101})}).ok());
  EXPECT_TRUE(step(deployed(), {call(owner, Transfer{owner, 100})}).ok());
}

TEST(Tokens, SelfTransferKeepsSupply) {
  auto next = step(deployed(), {call(owner, Transfer{owner, 40})}).value();
  EXPECT_EQ(balance_of(state(next), owner), Amount{100});
  EXPECT_TRUE(supply_matches_balances(next).ok);
}

TEST(Tokens, AllowanceFlow) {
  const ChainState s = deployed();
  EXPECT_FALSE(step(s, {call(buyer, TransferFrom{owner, buyer, 1})}).ok());
  auto approved = step(s, {call(owner, Approve{buyer, 30})}).value();
  EXPECT_EQ(allowance_of(state(approved), owner, buyer), Amount{30});
  auto moved = step(approved, {call(buyer, TransferFrom{owner, Address{11}, 20})});
  ASSERT_TRUE(moved.ok());
  EXPECT_EQ(allowance_of(state(*moved), owner, buyer), Amount{10});
  EXPECT_EQ(balance_of(state(*moved), Address{11}), Amount{20});
  EXPECT_FALSE(step(*moved, {call(buyer, TransferFrom{owner, buyer, 11})}).ok());
  EXPECT_FALSE(step(approved, {call(buyer, Approve{owner, 1}, 1)}).ok());
}

TEST(LowerBound, Examples) {
  EXPECT_TRUE(contract_balance_lower_bound(deployed()).ok);
  auto moved = step(deployed(with_rate(1)), {call(owner, Transfer{buyer, 16})}).value();
  const auto c = contract_balance_lower_bound(moved);
  EXPECT_FALSE(c.ok);
  EXPECT_EQ(c.detail, "contract balance 0 < 16 needed to refund 16 tokens not held by the owner");
}

TEST(Generators, Finalize) {
  BatState s = state(deployed());
  ChainState chain = deployed();
  EXPECT_FALSE(sample(gFinalize(chain, s), 1).has_value());
  s.total_supply = s.setup.token_creation_cap;
  const auto p = sample(gFinalize(chain, s), 1);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->sender, s.setup.fund_addr);
  EXPECT_TRUE(std::holds_alternative<Finalize>(p->msg));
  std::set<Address> senders;
  Rng r(2);
  for (int i = 0; i < 500; ++i) {
    const auto q = gFinalizeInvalid(chain, s)(r, 30);
    ASSERT_TRUE(q.has_value());
    EXPECT_TRUE(std::holds_alternative<Finalize>(q->msg));
    senders.insert(q->sender);
  }
  EXPECT_EQ(senders.size(), all_users.size());
}

TEST(Generators, ValidCallsAreAccepted) {
  // Proposals from the valid generators are accepted by the contract in the
  // next block. The block itself may still fail: a refund for transferred
  // free tokens can exceed the contract's balance.
  Rng master(4);
  const auto gen = gen_trace(make_setup(), cfg(1, 0));
  std::size_t tried = 0;
  for (int i = 0; i < 200; ++i) {
    Rng r = master.split();
    const auto chain = replay(gen(r, 30).trace).value();
    const BatState s = state(chain);
    for (auto g : {gCreateTokens, gFinalize, gRefund, gTransfer, gTransferFrom, gApprove}) {
      Rng rr = r.split();
      if (auto p = g(chain, s)(rr, 30)) {
        ++tried;
        ChainState next_block = chain;
        ++next_block.height;
        const ContractCallContext ctx{p->sender, p->sender, bat_addr, p->amount};
        EXPECT_TRUE(bat_receive(next_block, ctx, s, p->msg).has_value()) << show(serialize(p->msg));
      }
    }
  }
  EXPECT_GT(tried, 200u);
}

TEST(Classifier, Examples) {
  BatSetup s = default_setup();
  EXPECT_EQ(classify_setup(s), FundingClass::fundable);
  s.funding_end = 1;
  EXPECT_EQ(classify_setup(s), FundingClass::window_closed);
  s = default_setup();
  s.token_creation_min = 500;
  EXPECT_EQ(classify_setup(s), FundingClass::min_above_cap);
  s = default_setup();
  s.bat_fund = 0;
  s.token_exchange_rate = 5;
  s.token_creation_min = 3;
  s.token_creation_cap = 4;
  EXPECT_EQ(classify_setup(s), FundingClass::granularity);
  s.bat_fund = 3;
  s.funding_end = 0;
  EXPECT_EQ(classify_setup(s), FundingClass::fundable);  // already funded at deployment
}

TEST(Drain, FreshDeploymentDrains) { EXPECT_EQ(drain_residue(deployed(), SchedulingPolicy::DepthFirst), Amount{0}); }

TEST(Drain, FreeTokensFreezeCurrency) {
  auto s = step(deployed(), {call(owner, Transfer{Address{10}, 2}), call(Address{10}, CreateTokens{}, 10)}).value();
  EXPECT_EQ(drain_residue(s, SchedulingPolicy::DepthFirst), Amount{10});
}

TEST(Properties, FundingFinalVacuousOnOneBlock) {
  const TraceSetup t = make_setup();
  EXPECT_EQ(funding_final()(ChainTrace{t.genesis, {Block{1, t.deploy}}, SchedulingPolicy::DepthFirst}).kind,
            Outcome::Kind::holds);
}

TEST(Properties, ExpiredWindowUnreachable) {
  BatSetup s = default_setup();
  s.funding_start = 0;
  s.funding_end = 0;
  const auto cs = build_init_cb(s);
  ASSERT_TRUE(cs);
  EXPECT_TRUE(is_failed(reach_finalized(*cs, 1, cfg(1, 0))));
  EXPECT_EQ(classify_setup(s), FundingClass::window_closed);
}

TEST(Properties, FavourableSetupReachable) {
  const auto cs = build_init_cb(default_setup());
  ASSERT_TRUE(cs);
  const auto r = reach_finalized(*cs, 3, cfg(1, 0));
  ASSERT_TRUE(is_passed(r)) << render(r);
  const auto& w = std::get<Passed>(r).witness;
  ASSERT_TRUE(w);
  EXPECT_TRUE(is_finalized(replay(*w).value()));
}

TEST(Properties, OnlyFirstHolds) {
  const auto c = cfg(2000, 42);
  EXPECT_TRUE(is_passed(check_property(Property::funding_final, c)));
  for (auto p : {Property::no_owner_refund, Property::refund_guarantee, Property::no_frozen_funds}) {
    EXPECT_TRUE(is_failed(check_property(p, c)));
  }
  EXPECT_TRUE(is_failed(check_property(Property::funding_possible, cfg(200, 42))));
}

TEST(Properties, RefundGuaranteeShape) {
  const auto r = check_property(Property::refund_guarantee, cfg(10000, 42));
  ASSERT_TRUE(is_failed(r));
  const auto& t = *std::get<Failed>(r).shrunk;
  ASSERT_EQ(t.blocks.size(), 2u);
  ASSERT_EQ(t.blocks[1].actions.size(), 1u);
  const auto& a = t.blocks[1].actions[0];
  EXPECT_EQ(a.from, owner);
  EXPECT_TRUE(std::holds_alternative<Transfer>(deserialize<BatMsg>(std::get<act::Call>(a.body).msg)));
}

TEST(Triples, Hold) {
  for (const auto& t : triples()) {
    EXPECT_TRUE(is_passed(check_hoare(t.spec, bat_addr, make_setup(), cfg(1000, 7)))) << t.name;
  }
}

TEST(Triples, CatchBrokenContract) {
  // A contract minting one token too many per purchase breaks the
  // create_tokens triple.
  static const BehaviorPtr greedy = [] {
    auto spec = bat_spec();
    spec.receive = [](const ChainState& chain, const ContractCallContext& ctx, const BatState& s,
                      const std::optional<BatMsg>& m) -> ReceiveResult {
      auto r = bat_receive(chain, ctx, s, m);
      if (r && m && std::holds_alternative<CreateTokens>(*m)) r->first.balances[ctx.from] += 1;
      return r;
    };
    return make_contract(spec);
  }();
  TraceSetup t = make_setup();
  t.deploy = {Action(deployer, deploy_body(greedy, default_setup(), Amount{}))};
  const auto all = triples();
  const auto& create = all.front();
  ASSERT_EQ(create.name, "create_tokens");
  EXPECT_TRUE(is_failed(check_hoare(create.spec, bat_addr, t, cfg(1000, 7))));
}

TEST(Stats, EveryEntrypointSeenBothWays) {
  const auto rep = classify(entrypoint_label, make_setup(), cfg(2000, 42));
  for (const char* name : {"create_tokens", "finalize", "refund", "transfer", "transfer_from", "approve"}) {
    ASSERT_TRUE(rep.labels.contains(name)) << name;
    EXPECT_GT(rep.labels.at(name).accepted, 0u) << name;
    EXPECT_GT(rep.labels.at(name).rejected, 0u) << name;
  }
}
