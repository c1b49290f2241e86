#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace carbon_ledger;
using namespace carbon_ledger::testing;

namespace {

const Date kDay = Date::parse("2021-06-01");
const ConsensusParams kPoW{ConsensusKind::PoW};
const ConsensusParams kPoS{ConsensusKind::PoS};

Energy btc_daily_energy() { return Energy(dec("103570000000000") / Decimal(365)); }

// Bitcoin 2021 averages: revenue split 0.9399 / 0.0601.
NetworkDay btc_day(Date date = kDay) {
  return pow_day(date, btc_daily_energy(), "0.9399", "0.0601", "18716000", 263260);
}

std::string wh_places(const Energy& e, int places) { return e.value().format_fixed(places); }

}  // namespace

TEST(FeeShare, Examples) {
  EXPECT_EQ(fee_share(pow_day(kDay, kwh("1"), "6.25", "0", "100", 0)), frac("0"));
  EXPECT_EQ(fee_share(pow_day(kDay, kwh("1"), "9.5", "0.5", "100", 10)), frac("0.05"));
  EXPECT_EQ(fee_share(btc_day()), frac("0.0601"));
}

TEST(FeeShare, RejectsZeroRevenueAndMissingColumns) {
  try {
    fee_share(pow_day(kDay, kwh("1"), "0", "0", "100", 0));
    FAIL();
  } catch (const AllocationError& e) {
    EXPECT_EQ(e.kind(), AllocationErrorKind::MalformedDay);
  }
  NetworkDay d = pos_day(kDay, kwh("1"), "0.1", "100", 1);
  try {
    fee_share(d);
    FAIL();
  } catch (const AllocationError& e) {
    EXPECT_EQ(e.kind(), AllocationErrorKind::MissingColumn);
  }
}

TEST(MethodWeights, Examples) {
  auto w = method_weights(pow_day(kDay, kwh("1"), "6.25", "0", "1", 0), kPoW);
  EXPECT_EQ(w.holding_weight, Fraction::one());
  EXPECT_EQ(w.transaction_weight, frac("0"));

  w = method_weights(pos_day(kDay, kwh("1"), "0.022", "1", 1), kPoS);
  EXPECT_EQ(w.holding_weight, frac("0.978"));
  EXPECT_EQ(w.transaction_weight, frac("0.022"));
  EXPECT_EQ(w.source, "pos_tx_share");

  w = method_weights(pow_day(kDay, kwh("1"), "3.125", "3.125", "1", 5), kPoW);
  EXPECT_EQ(w.holding_weight, frac("0.5"));
  EXPECT_EQ(w.transaction_weight, frac("0.5"));
  EXPECT_EQ(w.source, "fee_share");

  NetworkDay no_share = pos_day(kDay, kwh("1"), "0", "1", 1);
  no_share.pos_tx_share.reset();
  EXPECT_THROW(method_weights(no_share, kPoS), AllocationError);
}

TEST(Pools, Examples) {
  const auto w10 = MethodWeights::from_transaction_weight(kDay, frac("0"), "fee_share");
  NetworkDay d = pow_day(kDay, kwh("100"), "1", "0", "1", 0);
  EXPECT_EQ(holding_pool(d, w10), kwh("100"));
  EXPECT_EQ(transaction_pool(d, w10), kwh("0"));

  d.energy = Energy(dec("283750000000"));
  const auto w = MethodWeights::from_transaction_weight(kDay, frac("0.0601"), "fee_share");
  EXPECT_EQ(holding_pool(d, w).value().format_fixed(6), oracle::multiply({"283750000000", "0.9399"}, 6));
  EXPECT_EQ(transaction_pool(d, w).value().format_fixed(6), oracle::multiply({"283750000000", "0.0601"}, 6));
  EXPECT_EQ(convert_energy(holding_pool(d, w), EnergyUnit::GWh, 5), "266.7");
  EXPECT_EQ(convert_energy(transaction_pool(d, w), EnergyUnit::GWh, 4), "17.05");

  d.energy = Energy();
  EXPECT_TRUE(holding_pool(d, w).is_zero());
  EXPECT_TRUE(transaction_pool(d, w).is_zero());
}

TEST(AllocateHolding, WholeSupplyTakesWholeDay) {
  const NetworkDay d = btc_day();
  const auto w = method_weights(d, kPoW);
  const auto r = allocate_holding(d, w, holding("whale", kDay, dec("18716000")), Method::HoldingBased);
  EXPECT_EQ(r.energy, d.energy);
  EXPECT_EQ(r.audit.basis, Basis::Supply);
  EXPECT_TRUE(r.audit.weight_source.empty());
}

TEST(AllocateHolding, BitcoinOneCoin) {
  const NetworkDay d = btc_day();
  const auto w = method_weights(d, kPoW);
  const auto pure = allocate_holding(d, w, holding("e", kDay, Decimal(1)), Method::HoldingBased);
  EXPECT_EQ(wh_places(pure.energy, 6), oracle::ratio({"103570000000000"}, {"365", "18716000"}, 6));
  EXPECT_EQ(convert_energy(pure.energy, EnergyUnit::kWh, 4), "15.16");

  const auto hybrid = allocate_holding(d, w, holding("e", kDay, Decimal(1)), Method::Hybrid);
  EXPECT_EQ(hybrid.energy, pure.energy * dec("0.9399"));
  EXPECT_EQ(wh_places(hybrid.energy, 6), oracle::ratio({"103570000000000", "0.9399"}, {"365", "18716000"}, 6));
  EXPECT_EQ(convert_energy(hybrid.energy, EnergyUnit::kWh, 4), "14.25");
  EXPECT_EQ(hybrid.audit.weight_source, "fee_share");
}

TEST(AllocateHolding, LostCoinsShrinkEffectiveSupply) {
  NetworkDay d = pow_day(kDay, kwh("100"), "1", "0", "100", 0);
  d.lost_coin_fraction = frac("0.2");
  const auto w = method_weights(d, kPoW);
  EXPECT_EQ(allocate_holding(d, w, holding("e", kDay, Decimal(8)), Method::HoldingBased).energy, kwh("10"));
  EXPECT_EQ(allocate_holding(d, w, holding("e", kDay, Decimal(80)), Method::HoldingBased).energy, kwh("100"));
}

TEST(AllocateHolding, Guards) {
  const NetworkDay d = btc_day();
  const auto w = method_weights(d, kPoW);
  const auto kind_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const AllocationError& e) {
      return e.kind();
    }
    return AllocationErrorKind::MalformedDay;
  };
  EXPECT_EQ(kind_of([&] { allocate_holding(d, w, holding("e", kDay, dec("18716000.1")), Method::Hybrid); }),
            AllocationErrorKind::ShareOverflow);
  EXPECT_EQ(kind_of([&] { allocate_holding(d, w, holding("e", kDay.next(), Decimal(1)), Method::Hybrid); }),
            AllocationErrorKind::DateMismatch);
  EXPECT_EQ(kind_of([&] { allocate_holding(d, w, holding("e", kDay, Decimal(1)), Method::TransactionBased); }),
            AllocationErrorKind::MethodMismatch);
}

TEST(AllocateTransaction, BitcoinCountAndFee) {
  const NetworkDay d = btc_day();
  const auto w = method_weights(d, kPoW);
  const auto pure = allocate_transaction(d, kPoW, w, tx_count_record("e", kDay, 1), Method::TransactionBased);
  EXPECT_EQ(pure.audit.basis, Basis::Count);
  EXPECT_EQ(wh_places(pure.energy, 6), oracle::ratio({"103570000000000"}, {"365", "263260"}, 6));
  EXPECT_NEAR(to_kwh(pure.energy).to_double(), 1077.83, 1077.83 * 0.0005);

  const auto hybrid = allocate_transaction(d, kPoW, w, tx_fee_record("e", kDay, dec("0.0601") / Decimal(263260)),
                                           Method::Hybrid);
  EXPECT_EQ(hybrid.audit.basis, Basis::Fee);
  EXPECT_EQ(hybrid.energy, pure.energy * dec("0.0601"));
  EXPECT_EQ(convert_energy(hybrid.energy, EnergyUnit::kWh, 4), "64.78");

  const auto all_fees = allocate_transaction(d, kPoW, w, tx_fee_record("e", kDay, dec("0.0601")), Method::Hybrid);
  EXPECT_EQ(all_fees.energy, transaction_pool(d, w));
}

TEST(AllocateTransaction, BasisHierarchy) {
  NetworkDay pow = pow_day(kDay, kwh("1"), "1", "1", "1", 10);
  pow.gas_total = Gas(Decimal(1000));
  TransactionRecord both = tx_fee_record("e", kDay, dec("0.5"));
  both.gas_used = Gas(Decimal(100));
  EXPECT_EQ(choose_transaction_basis(ConsensusKind::PoW, both, day_basis_totals(pow)).basis, Basis::Fee);
  EXPECT_EQ(choose_transaction_basis(ConsensusKind::PoS, both, day_basis_totals(pow)).basis, Basis::Gas);

  // Missing preferred totals fall through to the next basis.
  NetworkDay no_gas = pow;
  no_gas.gas_total.reset();
  EXPECT_EQ(choose_transaction_basis(ConsensusKind::PoS, both, day_basis_totals(no_gas)).basis, Basis::Fee);
  EXPECT_EQ(choose_transaction_basis(ConsensusKind::PoW, tx_count_record("e", kDay, 2), day_basis_totals(pow)).basis,
            Basis::Count);
  // A gas-only record on a day with fees still resolves by gas.
  EXPECT_EQ(choose_transaction_basis(ConsensusKind::PoW, tx_gas_record("e", kDay, Decimal(10)), day_basis_totals(pow))
                .basis,
            Basis::Gas);
  // A record without a count stands for one transaction.
  const auto c = choose_transaction_basis(ConsensusKind::PoW, tx_fee_record("e", kDay, dec("0.1")),
                                          BasisTotals{{}, {}, 4});
  EXPECT_EQ(c.basis, Basis::Count);
  EXPECT_EQ(c.quantity, Decimal(1));
}

TEST(AllocateTransaction, Guards) {
  const auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const AllocationError& e) {
      return e.kind();
    }
    return AllocationErrorKind::MalformedDay;
  };
  TransactionRecord empty;
  empty.entity_id = "e";
  empty.date = kDay;
  EXPECT_EQ(kind_of([&] { choose_transaction_basis(ConsensusKind::PoW, empty, BasisTotals{{}, {}, 5}); }),
            AllocationErrorKind::BasisUnavailable);
  EXPECT_EQ(kind_of([&] {
              choose_transaction_basis(ConsensusKind::PoW, tx_count_record("e", kDay, 1), BasisTotals{{}, {}, 0});
            }),
            AllocationErrorKind::NoTransactions);
  EXPECT_EQ(kind_of([&] {
              choose_transaction_basis(ConsensusKind::PoW, tx_count_record("e", kDay, 6), BasisTotals{{}, {}, 5});
            }),
            AllocationErrorKind::ShareOverflow);
  const NetworkDay d = btc_day();
  const auto w = method_weights(d, kPoW);
  EXPECT_EQ(kind_of([&] {
              allocate_transaction(d, kPoW, w, tx_count_record("e", kDay, 1), Method::HoldingBased);
            }),
            AllocationErrorKind::MethodMismatch);
}

TEST(Summary, AverageOfRatiosAndRatioOfAverages) {
  // Two days with different pools; one coin held on both.
  std::vector<NetworkDay> days{pow_day(kDay, kwh("100"), "1", "0", "10", 0),
                               pow_day(kDay.next(), kwh("300"), "1", "0", "20", 0)};
  Portfolio p;
  p.holdings = {holding("e", kDay, Decimal(1)), holding("e", kDay.next(), Decimal(1))};
  const auto a = allocate_portfolio(days, kPoW, p, Method::HoldingBased, {"bitcoin", 1});
  const SummaryRow* row = a.summary.find("bitcoin", Activity::Holding);
  ASSERT_NE(row, nullptr);
  EXPECT_EQ(row->total, kwh("25"));
  EXPECT_EQ(row->daily_mean, dec("12500"));
  ASSERT_TRUE(row->ratio_of_averages);
  // mean pool 200 kWh x mean quantity 1 / mean supply 15.
  EXPECT_EQ(*row->ratio_of_averages, dec("200000") / Decimal(15));
}

TEST(AllocatePortfolio, EmptyPortfolio) {
  std::vector<NetworkDay> days{btc_day()};
  const auto a = allocate_portfolio(days, kPoW, Portfolio{}, Method::Hybrid, {"bitcoin", 1});
  EXPECT_TRUE(a.results.empty());
  ASSERT_EQ(a.summary.rows.size(), 2u);
  for (const auto& r : a.summary.rows) {
    EXPECT_TRUE(r.total.is_zero());
    EXPECT_TRUE(r.daily_mean.is_zero());
  }
}

TEST(AllocatePortfolio, ConstantYearMeanEqualsSingleDay) {
  std::vector<NetworkDay> days;
  Portfolio p;
  for (int i = 0; i < 365; ++i) {
    days.push_back(btc_day(Date::parse("2021-01-01").plus(i)));
    p.holdings.push_back(holding("e", days.back().date, Decimal(1)));
    p.transactions.push_back(tx_count_record("e", days.back().date, 1));
  }
  const auto single = allocate_holding(days[0], method_weights(days[0], kPoW), p.holdings[0], Method::HoldingBased);
  const auto a = allocate_portfolio(days, kPoW, p, Method::HoldingBased, {"bitcoin", 1});
  EXPECT_EQ(a.results.size(), 365u);
  EXPECT_EQ(a.summary.find("bitcoin", Activity::Holding)->daily_mean, single.energy.value());
  EXPECT_EQ(a.summary.find("bitcoin", Activity::Transaction), nullptr);

  const auto t = allocate_portfolio(days, kPoW, p, Method::TransactionBased, {"bitcoin", 1});
  EXPECT_NEAR(to_kwh(Energy(t.summary.find("bitcoin", Activity::Transaction)->daily_mean)).to_double(), 1077.83,
              1077.83 * 0.0005);
}

TEST(AllocatePortfolio, MissingDaysAreListed) {
  std::vector<NetworkDay> days{btc_day()};
  Portfolio p;
  p.holdings = {holding("e", kDay.plus(3), Decimal(1)), holding("f", kDay.plus(2), Decimal(1))};
  p.transactions = {tx_count_record("e", kDay.plus(3), 1)};
  try {
    allocate_portfolio(days, kPoW, p, Method::Hybrid);
    FAIL();
  } catch (const MissingDayError& e) {
    EXPECT_EQ(e.dates(), (std::vector<Date>{kDay.plus(2), kDay.plus(3)}));
  }
}

TEST(AllocatePortfolio, RejectsUnorderedDays) {
  std::vector<NetworkDay> days{btc_day(kDay.next()), btc_day(kDay)};
  EXPECT_THROW(allocate_portfolio(days, kPoW, Portfolio{}, Method::Hybrid), AllocationError);
}

TEST(AllocatePortfolio, WorkersMatchSequential) {
  Gen g(3);
  std::vector<NetworkDay> days;
  Portfolio p;
  for (int i = 0; i < 120; ++i) {
    days.push_back(g.day(ConsensusKind::PoW, Date::parse("2022-01-01").plus(i)));
    for (auto& h : full_supply_holdings(g, days.back(), 3)) p.holdings.push_back(h);
    for (auto& t : full_day_transactions(g, days.back(), ConsensusKind::PoW, 3)) p.transactions.push_back(t);
  }
  const auto seq = allocate_portfolio(days, kPoW, p, Method::Hybrid, {"x", 1});
  const auto par = allocate_portfolio(days, kPoW, p, Method::Hybrid, {"x", 7});
  ASSERT_EQ(seq.results.size(), par.results.size());
  for (std::size_t i = 0; i < seq.results.size(); ++i) {
    EXPECT_EQ(seq.results[i].entity_id, par.results[i].entity_id);
    EXPECT_EQ(seq.results[i].date, par.results[i].date);
    EXPECT_EQ(seq.results[i].energy, par.results[i].energy);
  }
}

// Properties over randomized days.

class EngineProperty : public ::testing::TestWithParam<ConsensusKind> {};

TEST_P(EngineProperty, ConservationPerMethod) {
  const ConsensusKind kind = GetParam();
  const ConsensusParams params{kind};
  Gen g(kind == ConsensusKind::PoW ? 101 : 202);
  for (int i = 0; i < 300; ++i) {
    const NetworkDay d = g.day(kind, kDay);
    const auto w = method_weights(d, params);
    ASSERT_EQ(w.holding_weight.value() + w.transaction_weight.value(), Decimal(1));
    const auto holdings = full_supply_holdings(g, d, g.uniform(1, 6));
    const auto txs = full_day_transactions(g, d, kind, g.uniform(1, 6));

    Energy hybrid, holding_only, tx_only;
    for (const auto& h : holdings) {
      hybrid += allocate_holding(d, w, h, Method::Hybrid).energy;
      holding_only += allocate_holding(d, w, h, Method::HoldingBased).energy;
    }
    for (const auto& t : txs) {
      hybrid += allocate_transaction(d, params, w, t, Method::Hybrid).energy;
      tx_only += allocate_transaction(d, params, w, t, Method::TransactionBased).energy;
    }
    ASSERT_EQ(holding_only, d.energy);
    if (d.tx_count > 0) {
      ASSERT_EQ(hybrid, d.energy);
      ASSERT_EQ(tx_only, d.energy);
    } else {
      ASSERT_EQ(hybrid, holding_pool(d, w));
      ASSERT_EQ(hybrid, d.energy);
    }
  }
}

TEST_P(EngineProperty, AuditReplayIsExact) {
  const ConsensusKind kind = GetParam();
  const ConsensusParams params{kind};
  Gen g(kind == ConsensusKind::PoW ? 5 : 6);
  for (int i = 0; i < 200; ++i) {
    const NetworkDay d = g.day(kind, kDay);
    const auto w = method_weights(d, params);
    for (const auto& h : full_supply_holdings(g, d, 2)) {
      for (auto m : {Method::Hybrid, Method::HoldingBased}) {
        const auto r = allocate_holding(d, w, h, m);
        ASSERT_EQ(r.audit.replay(), r.energy);
        ASSERT_EQ(r.carbon.has_value(), d.emission_factor.has_value());
      }
    }
    for (const auto& t : full_day_transactions(g, d, kind, 2)) {
      for (auto m : {Method::Hybrid, Method::TransactionBased}) {
        const auto r = allocate_transaction(d, params, w, t, m);
        ASSERT_EQ(r.audit.replay(), r.energy);
      }
    }
  }
}

TEST_P(EngineProperty, BoundaryEquivalence) {
  const ConsensusKind kind = GetParam();
  const ConsensusParams params{kind};
  Gen g(kind == ConsensusKind::PoW ? 17 : 18);
  for (int i = 0; i < 200; ++i) {
    NetworkDay d = g.day(kind, kDay);
    if (d.tx_count == 0) d.tx_count = 1;
    const bool all_tx = g.coin();
    if (kind == ConsensusKind::PoW) {
      const CoinAmount revenue = *d.block_reward + *d.tx_fees_total;
      d.tx_fees_total = all_tx ? revenue : CoinAmount();
      d.block_reward = all_tx ? CoinAmount() : revenue;
    } else {
      d.pos_tx_share = all_tx ? Fraction::one() : Fraction();
    }
    const auto w = method_weights(d, params);
    for (const auto& h : full_supply_holdings(g, d, 3)) {
      const auto hy = allocate_holding(d, w, h, Method::Hybrid).energy;
      if (all_tx) {
        ASSERT_TRUE(hy.is_zero());
      } else {
        ASSERT_EQ(hy, allocate_holding(d, w, h, Method::HoldingBased).energy);
      }
    }
    TransactionRecord t = tx_count_record("t", kDay, g.uniform(1, d.tx_count));
    const auto hy = allocate_transaction(d, params, w, t, Method::Hybrid).energy;
    if (all_tx) {
      ASSERT_EQ(hy, allocate_transaction(d, params, w, t, Method::TransactionBased).energy);
    } else {
      ASSERT_TRUE(hy.is_zero());
    }
  }
}

TEST_P(EngineProperty, LinearityAndFungibility) {
  const ConsensusKind kind = GetParam();
  const ConsensusParams params{kind};
  Gen g(kind == ConsensusKind::PoW ? 23 : 24);
  for (int i = 0; i < 300; ++i) {
    NetworkDay d = g.day(kind, kDay);
    const auto w = method_weights(d, params);
    const Decimal amount = d.effective_supply() * Decimal::ratio(static_cast<std::int64_t>(g.uniform(0, 500)), 1000);
    const auto a = allocate_holding(d, w, holding("alice", kDay, amount), Method::Hybrid);
    const auto b = allocate_holding(d, w, holding("bob", kDay, amount), Method::Hybrid);
    const auto twice = allocate_holding(d, w, holding("alice", kDay, amount * Decimal(2)), Method::Hybrid);
    ASSERT_EQ(a.energy, b.energy);
    ASSERT_EQ(twice.energy, a.energy * Decimal(2));

    if (d.tx_count >= 2 && d.tx_fees_total && !d.tx_fees_total->is_zero()) {
      const Decimal fee = d.tx_fees_total->value() * Decimal::ratio(static_cast<std::int64_t>(g.uniform(0, 500)), 1000);
      const auto one = allocate_transaction(d, params, w, tx_fee_record("a", kDay, fee), Method::Hybrid);
      const auto two = allocate_transaction(d, params, w, tx_fee_record("a", kDay, fee * Decimal(2)), Method::Hybrid);
      ASSERT_EQ(two.energy, one.energy * Decimal(2));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Consensus, EngineProperty,
                         ::testing::Values(ConsensusKind::PoW, ConsensusKind::PoS),
                         [](const auto& info) { return std::string(to_string(info.param)); });
