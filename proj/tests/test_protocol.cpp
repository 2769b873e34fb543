#include <gtest/gtest.h>

#include <cmath>

#include "qdkd/analysis.hpp"
#include "qdkd/protocol.hpp"

using namespace qdkd;

TEST(PartnerKeys, XorTable) {
  EXPECT_EQ(derive_partner_keys(1, 0, 1), std::pair(1, 0));
  EXPECT_EQ(derive_partner_keys(0, 0, 0), std::pair(0, 0));
  EXPECT_THROW(derive_partner_keys(2, 0, 0), Error);
}

TEST(PartnerKeys, RoundTripAndPhaseFlipShift) {
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      EXPECT_EQ(derive_partner_keys(j ^ k, j, k), std::pair(k, j));
      for (int q = 0; q < 2; ++q) EXPECT_EQ(derive_partner_keys(j ^ k ^ q, j, k), std::pair(k ^ q, j ^ q));
    }
  }
}

TEST(Config, Validation) {
  EXPECT_THROW((ProtocolConfig{1.5, 1.0, 1, 0}.validate()), Error);
  EXPECT_THROW((ProtocolConfig{0.5, 0.0, 1, 0}.validate()), Error);
  EXPECT_THROW((ProtocolConfig{0.5, 1.2, 1, 0}.validate()), Error);
  EXPECT_NO_THROW((ProtocolConfig{0.0, 1.0, 1, 0}.validate()));
}

TEST(RunExperiment, ZeroRoundsGivesEmptyLog) {
  const auto log = run_experiment({0.5, 1.0, 0, 3}, honest());
  EXPECT_TRUE(log.outcomes.empty());
  EXPECT_EQ(log.attack.name, "none");
}

TEST(RunExperiment, DeterministicAcrossCallsAndThreads) {
  const ProtocolConfig cfg{0.5, 0.7, 3000, 12345};
  const auto strategy = bob_key_attack({0.4, 0.6});
  const auto a = run_experiment(cfg, strategy, 1);
  const auto b = run_experiment(cfg, strategy, 1);
  const auto c = run_experiment(cfg, strategy, 4);
  EXPECT_EQ(a.outcomes, b.outcomes);
  EXPECT_EQ(a.outcomes, c.outcomes);
  const auto other = run_experiment({0.5, 0.7, 3000, 54321}, strategy, 1);
  EXPECT_NE(a.outcomes, other.outcomes);
}

TEST(RunRound, HonestNoiselessMessageModeDecodesBothKeys) {
  const ProtocolConfig cfg{0.5, 1.0, 4000, 8};
  const auto log = run_experiment(cfg, honest());
  std::size_t mm = 0, cm = 0;
  for (const auto& r : log.outcomes) {
    if (r.bob_mode == BobMode::mm) {
      ++mm;
      ASSERT_TRUE(r.m);
      ASSERT_NE(*r.m, BellResult::fail);
      EXPECT_EQ(static_cast<int>(*r.m), r.j ^ *r.k);
      EXPECT_EQ(r.k_view_a, r.k);
      EXPECT_EQ(r.j_view_b, r.j);
    } else {
      ++cm;
      EXPECT_EQ(r.bob_cm_detected, true);
      EXPECT_EQ(r.correlated, false);
    }
    EXPECT_EQ(r.eve_symbol_j, EveSymbol::none);
    EXPECT_EQ(r.eve_symbol_k, EveSymbol::none);
  }
  EXPECT_GT(mm, 0u);
  EXPECT_GT(cm, 0u);
}

TEST(RunRound, ExactlyOneModeFieldGroupPopulated) {
  const auto log = run_experiment({0.5, 0.6, 4000, 21}, alice_key_attack({0.3, 0.8}));
  for (const auto& r : log.outcomes) {
    if (r.bob_mode == BobMode::mm) {
      EXPECT_TRUE(r.k && r.m);
      EXPECT_FALSE(r.bob_cm_detected || r.bob_cm_result || r.alice_cm_result || r.correlated);
      EXPECT_EQ(r.k_view_a.has_value(), r.valid_mm());
      EXPECT_EQ(r.j_view_b.has_value(), r.valid_mm());
    } else {
      EXPECT_FALSE(r.k || r.m || r.k_view_a || r.j_view_b);
      EXPECT_TRUE(r.bob_cm_detected && r.alice_cm_result && r.correlated);
      EXPECT_EQ(*r.correlated, *r.bob_cm_detected && *r.alice_cm_result == *r.bob_cm_result);
      EXPECT_EQ(r.eve_symbol_j, EveSymbol::none);
      EXPECT_EQ(r.eve_symbol_k, EveSymbol::none);
    }
  }
}

TEST(RunRound, LossyHonestDetectionRateMatchesTransmission) {
  const double P = 0.7;
  const auto log = run_experiment({0.5, P, 20000, 77}, honest());
  std::uint64_t cm = 0, detected = 0, mm = 0, failed = 0;
  for (const auto& r : log.outcomes) {
    if (r.bob_mode == BobMode::cm) {
      ++cm;
      detected += *r.bob_cm_detected;
      EXPECT_FALSE(*r.correlated);
    } else {
      ++mm;
      failed += *r.m == BellResult::fail;
      if (r.valid_mm()) {
        EXPECT_EQ(r.j_view_b, r.j);
      }
    }
  }
  const double rate = static_cast<double>(detected) / static_cast<double>(cm);
  EXPECT_LE(std::abs(rate - P), three_sigma(P, cm));
  const double fail_rate = static_cast<double>(failed) / static_cast<double>(mm);
  EXPECT_LE(std::abs(fail_rate - (1 - P)), three_sigma(1 - P, mm));
}

TEST(RunRound, ControlModeProbabilityExtremes) {
  for (const auto& r : run_experiment({1.0, 1.0, 200, 1}, honest()).outcomes) EXPECT_EQ(r.bob_mode, BobMode::cm);
  for (const auto& r : run_experiment({0.0, 1.0, 200, 1}, honest()).outcomes) EXPECT_EQ(r.bob_mode, BobMode::mm);
}

TEST(RunRound, HonestTenThousandRoundsHasZeroQber) {
  const auto s = empirical_statistics(run_experiment({0.5, 1.0, 10000, 2024}, honest()));
  EXPECT_EQ(*s.q_a_hat, 0.0);
  EXPECT_EQ(*s.q_b_hat, 0.0);
  EXPECT_EQ(*s.p_corr_hat, 0.0);
}
