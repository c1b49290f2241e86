#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace carbon_ledger;
using namespace carbon_ledger::testing;

namespace {

const Date kDay = Date::parse("2022-11-01");
const ConsensusParams kPoW{ConsensusKind::PoW};
const ConsensusParams kPoS{ConsensusKind::PoS};

// 200 kWh day with transaction weight 1/2 => transaction pool 100 kWh.
NetworkDay l1_day() { return pow_day(kDay, kwh("200"), "1", "1", "1000", 100); }

Layer2Day rollup(const char* share, const char* infra_kwh, const char* internal_tx_share = "0.5") {
  Layer2Day l2;
  l2.l2_id = "rollup";
  l2.date = kDay;
  l2.l1_fee_share = frac(share);
  l2.infra_energy = kwh(infra_kwh);
  l2.internal_params = kPoS;
  l2.internal_day = pos_day(kDay, Energy(), internal_tx_share, "5000", 40);
  return l2;
}

Portfolio l2_portfolio() {
  Portfolio p;
  p.network_id = "rollup";
  p.holdings = {holding("a", kDay, Decimal(1000)), holding("b", kDay, Decimal(4000))};
  p.transactions = {tx_count_record("a", kDay, 10), tx_count_record("b", kDay, 30)};
  return p;
}

}  // namespace

TEST(Layer2Footprint, Examples) {
  const NetworkDay d = l1_day();
  const auto w = method_weights(d, kPoW);
  ASSERT_EQ(transaction_pool(d, w), kwh("100"));
  EXPECT_EQ(l2_total_footprint(d, w, rollup("0.2", "30")), kwh("50"));
  EXPECT_EQ(l2_total_footprint(d, w, rollup("0", "30")), kwh("30"));
  EXPECT_EQ(l2_total_footprint(d, w, rollup("1", "0")), transaction_pool(d, w));

  Layer2Day late = rollup("0.2", "30");
  late.date = kDay.next();
  EXPECT_THROW(l2_total_footprint(d, w, late), AllocationError);
}

TEST(Layer2Footprint, MonotoneInShareAndInfra) {
  Gen g(61);
  for (int i = 0; i < 300; ++i) {
    const NetworkDay d = g.day(ConsensusKind::PoW, kDay);
    const auto w = method_weights(d, kPoW);
    Layer2Day a = rollup("0", "0");
    a.l1_fee_share = g.fraction();
    a.infra_energy = Energy(g.decimal(100000, 3));
    Layer2Day b = a;
    if (g.coin()) {
      b.l1_fee_share = Fraction(a.l1_fee_share.value() +
                                (Decimal(1) - a.l1_fee_share.value()) * g.fraction().value());
    } else {
      b.infra_energy = a.infra_energy + Energy(g.decimal(1000, 3));
    }
    ASSERT_LE(l2_total_footprint(d, w, a), l2_total_footprint(d, w, b));
  }
}

TEST(AllocateWithinL2, BoundaryAndZero) {
  const NetworkDay d = l1_day();
  const auto w = method_weights(d, kPoW);
  const Layer2Day l2 = rollup("0.2", "30", "0");
  const Energy total = l2_total_footprint(d, w, l2);
  const auto rs = allocate_within_l2(total, l2, l2_portfolio(), Method::Hybrid, {"ethereum"});
  ASSERT_EQ(rs.size(), 4u);
  Energy held;
  for (const auto& r : rs) {
    EXPECT_EQ(r.scope, "rollup");
    EXPECT_EQ(r.audit.provenance, (std::vector<std::string>{"ethereum", "rollup"}));
    if (r.activity == Activity::Holding) {
      held += r.energy;
    } else {
      EXPECT_TRUE(r.energy.is_zero());
    }
  }
  // Holdings a + b cover the whole L2 supply.
  EXPECT_EQ(held, total);

  for (const auto& r : allocate_within_l2(Energy(), rollup("0", "0"), l2_portfolio(), Method::Hybrid)) {
    EXPECT_TRUE(r.energy.is_zero());
  }
}

TEST(AllocateWithinL2, MatchesEngineOnSyntheticDay) {
  const NetworkDay d = l1_day();
  const auto w = method_weights(d, kPoW);
  const Layer2Day l2 = rollup("0.35", "12.5", "0.3");
  const Energy total = l2_total_footprint(d, w, l2);
  for (auto method : {Method::Hybrid, Method::HoldingBased, Method::TransactionBased}) {
    const auto rs = allocate_within_l2(total, l2, l2_portfolio(), method);
    const std::vector<NetworkDay> days{synthetic_l2_day(total, l2)};
    const auto direct = allocate_portfolio(days, l2.internal_params, l2_portfolio(), method, {"rollup", 1});
    ASSERT_EQ(rs.size(), direct.results.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
      EXPECT_EQ(rs[i].entity_id, direct.results[i].entity_id);
      EXPECT_EQ(rs[i].date, direct.results[i].date);
      EXPECT_EQ(rs[i].method, direct.results[i].method);
      EXPECT_EQ(rs[i].activity, direct.results[i].activity);
      EXPECT_EQ(rs[i].scope, direct.results[i].scope);
      EXPECT_EQ(rs[i].energy, direct.results[i].energy);
      EXPECT_EQ(rs[i].audit.replay(), direct.results[i].audit.replay());
      EXPECT_EQ(rs[i].audit.basis, direct.results[i].audit.basis);
    }
  }
}

TEST(Layer2Property, ConservationAcrossLayers) {
  Gen g(67);
  for (int i = 0; i < 300; ++i) {
    const ConsensusKind kind = g.coin() ? ConsensusKind::PoW : ConsensusKind::PoS;
    const ConsensusParams params{kind};
    NetworkDay d = g.day(kind, kDay);
    if (d.tx_count == 0) continue;
    const auto w = method_weights(d, params);

    Layer2Day l2 = rollup("0", "0");
    l2.l1_fee_share = g.fraction();
    l2.infra_energy = Energy(g.decimal(10000, 3));
    const Energy inherited = l2_inherited(d, w, l2);

    // The rest of the L1 transaction pool goes to non-L2 transactions,
    // charged by count over the non-L2 remainder.
    const Pool rest = activity_pool(d, w, Activity::Transaction, Method::Hybrid)
                          .scaled("non_l2_share", Decimal(1) - l2.l1_fee_share.value());
    Energy non_l2;
    const std::uint64_t n = std::min<std::uint64_t>(d.tx_count, 5);
    for (auto c : g.partition_count(d.tx_count, n)) {
      non_l2 += rest.energy() * Decimal::ratio(static_cast<std::int64_t>(c), static_cast<std::int64_t>(d.tx_count));
    }
    ASSERT_EQ(inherited + non_l2, transaction_pool(d, w));

    // Inside the L2 the whole footprint is handed out.
    const Energy total = inherited + l2.infra_energy;
    Gen inner(static_cast<std::uint64_t>(i));
    const ConsensusKind inner_kind = inner.coin() ? ConsensusKind::PoW : ConsensusKind::PoS;
    l2.internal_params = {inner_kind};
    l2.internal_day = inner.day(inner_kind, kDay);
    const NetworkDay synthetic = synthetic_l2_day(total, l2);
    Portfolio p;
    p.holdings = full_supply_holdings(inner, synthetic, 3);
    p.transactions = full_day_transactions(inner, synthetic, inner_kind, 3);
    ASSERT_EQ(sum_energy(allocate_within_l2(total, l2, p, Method::Hybrid)), total);
  }
}

TEST(Layer2Property, NestingRepeatsTheStep) {
  // L1 -> L2 -> L3: the L3 footprint is a slice of the L2 transaction pool.
  const NetworkDay d = l1_day();
  const auto w = method_weights(d, kPoW);
  const Layer2Day l2 = rollup("0.2", "30", "0.5");
  const Energy l2_total = l2_total_footprint(d, w, l2);
  const NetworkDay l2_day = synthetic_l2_day(l2_total, l2);
  const auto l2_weights = method_weights(l2_day, l2.internal_params);

  Layer2Day l3 = rollup("0.1", "2", "0");
  l3.l2_id = "app-chain";
  const Energy l3_total = l2_total_footprint(l2_day, l2_weights, l3);
  EXPECT_EQ(l3_total, kwh("4.5"));
  const auto rs = allocate_within_l2(l3_total, l3, [] {
    Portfolio p;
    p.holdings = {holding("z", kDay, Decimal(5000))};
    return p;
  }(), Method::Hybrid, {"ethereum", "rollup"});
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].energy, l3_total);
  EXPECT_EQ(rs[0].audit.provenance, (std::vector<std::string>{"ethereum", "rollup", "app-chain"}));
}
