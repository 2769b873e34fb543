#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qdkd/analysis.hpp"

using namespace qdkd;

namespace {

const StateVector vac_e = make_basis_state({photon_mode(mode_e)}, {BasisLabel::vac});

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::undefined;
}

}  // namespace

TEST(BinaryEntropy, FrozenValues) {
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
  EXPECT_NEAR(binary_entropy(0.375), 0.954434002924965, 1e-14);
  EXPECT_NEAR(binary_entropy(0.25), 0.8112781244591328, 1e-14);
  EXPECT_EQ(kind_of([] { binary_entropy(-0.1); }), ErrorKind::bad_param);
  EXPECT_EQ(kind_of([] { binary_entropy(1.5); }), ErrorKind::bad_param);
}

TEST(BinaryEntropy, SymmetricAboutHalf) {
  for (double x = 0.0; x <= 0.5; x += 0.01) EXPECT_NEAR(binary_entropy(x), binary_entropy(1.0 - x), 1e-14);
}

TEST(SecurityCondition, Examples) {
  const auto a = security_condition(0.375, 0.0);
  EXPECT_NEAR(a.lhs, 0.954434002924965, 1e-14);
  EXPECT_TRUE(a.holds);
  const auto b = security_condition(0.5, 0.0);
  EXPECT_NEAR(b.lhs, 1.0, 1e-15);
  EXPECT_FALSE(b.holds);
  const auto c = security_condition(0.0, 0.0);
  EXPECT_EQ(c.lhs, 0.0);
  EXPECT_TRUE(c.holds);
}

TEST(MutualInformation, PerfectlyCorrelatedAndIndependent) {
  EXPECT_NEAR(plugin_mutual_information({{{0, 0}, 500}, {{1, 1}, 500}}), 1.0, 1e-15);
  EXPECT_NEAR(plugin_mutual_information({{{0, 0}, 250}, {{0, 1}, 250}, {{1, 0}, 250}, {{1, 1}, 250}}), 0.0, 1e-15);
  EXPECT_EQ(kind_of([] { plugin_mutual_information({}); }), ErrorKind::bad_param);
}

// Eve learns the bit with probability 0.4 and outputs "none" (code 2) otherwise:
// I = 1 - 0.6 * 1 = 0.4.
TEST(MutualInformation, ErasureChannel) {
  const JointCounts t{{{0, 0}, 200}, {{1, 1}, 200}, {{0, 2}, 300}, {{1, 2}, 300}};
  EXPECT_NEAR(plugin_mutual_information(t), 0.4, 1e-14);
}

TEST(MutualInformation, SymmetricAndNonNegative) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::uint64_t> count(0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    JointCounts t, swapped;
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 3; ++y) {
        const auto c = count(gen);
        t[{x, y}] = c;
        swapped[{y, x}] = c;
      }
    }
    t[{0, 0}] += 1;
    swapped[{0, 0}] += 1;
    const double i = plugin_mutual_information(t);
    EXPECT_GE(i, 0.0);
    EXPECT_LE(i, 1.0 + 1e-12);
    EXPECT_NEAR(i, plugin_mutual_information(swapped), 1e-12);
  }
}

TEST(ParityStatistics, SwapVacuumCounterexample) {
  const auto swap = op_swap(mode_b, mode_e);
  EXPECT_NEAR(p_corr_true(swap, vac_e), 0.0, 1e-12);
  EXPECT_NEAR(p_corr_claimed(swap, swap, vac_e), 0.5, 1e-12);
  EXPECT_NEAR(claimed_overlap(swap, swap, vac_e).imag(), 0.0, 1e-12);
}

TEST(ParityStatistics, HonestChannelAgrees) {
  const auto id = identity_be();
  EXPECT_NEAR(p_corr_true(id, vac_e), 0.0, 1e-12);
  EXPECT_NEAR(p_corr_claimed(id, id, vac_e), 0.0, 1e-12);
}

// A bit flip on B turns the anticorrelated pair into a correlated one.
TEST(ParityStatistics, BitFlipMakesEveryControlRoundCorrelated) {
  const auto flip = op_x_pow(1, photon_mode(mode_b));
  EXPECT_NEAR(p_corr_true(flip, vac_e), 1.0, 1e-12);
  const auto pure_plus = DensityMatrix::pure(make_bell_state(BellSign::plus, mode_a, mode_b));
  EXPECT_NEAR(p_corr_true(identity_be(), vac_e, pure_plus), 0.0, 1e-12);
}

TEST(ParityStatistics, RejectsNonUnitaryOrAliceOperators) {
  const auto parity = op_parity(mode_a, mode_b);
  EXPECT_EQ(kind_of([&] { p_corr_true(parity, vac_e); }), ErrorKind::not_unitary);
  EXPECT_EQ(kind_of([&] { p_corr_true(op_z_pow(1, qubit_mode(mode_a)), vac_e); }), ErrorKind::forbidden_mode);
}

TEST(AnalyticReport, AliceExample) {
  const auto r = analytic_report(AttackTarget::alice, {0.5, 0.5});
  EXPECT_NEAR(r.x, 0.25, 1e-15);
  EXPECT_NEAR(r.q_total, 0.375, 1e-15);
  EXPECT_NEAR(r.i_ab, 0.04556599707503495, 1e-12);
  EXPECT_EQ(r.i_eve, 0.5);
  EXPECT_EQ(r.p_corr, 0.0);
  EXPECT_NEAR(r.security_lhs, 0.954434002924965, 1e-12);
  EXPECT_TRUE(r.security_holds);
  EXPECT_TRUE(r.advantage);
  EXPECT_EQ(r.i_eve_other_key, 0.0);
}

TEST(AnalyticReport, BobExampleAndTuning) {
  const auto b = analytic_report(AttackTarget::bob, {0.6, 0.5});
  EXPECT_NEAR(b.i_eve, 0.3, 1e-15);
  EXPECT_NEAR(b.q_total, 0.4, 1e-15);
  const auto t = analytic_report(AttackTarget::tuning, {0.9, 1.0});
  EXPECT_EQ(t.p, 0.0);
  EXPECT_EQ(t.q_total, 0.0);
  EXPECT_EQ(t.i_ab, 1.0);
  EXPECT_EQ(t.i_eve, 0.0);
  EXPECT_FALSE(t.advantage);
}

TEST(AnalyticReport, ParameterErrors) {
  EXPECT_EQ(kind_of([] { analytic_report(AttackTarget::alice, {1.0, 0.5}); }), ErrorKind::bad_param);
  EXPECT_EQ(kind_of([] { analytic_report(AttackTarget::bob, {0.5, 0.0}); }), ErrorKind::bad_param);
}

TEST(AnalyticReport, SecurityTestAlwaysPassesOnGrid) {
  for (double p = 0.05; p < 0.96; p += 0.05) {
    for (double eps = 0.01; eps <= 1.0; eps += 0.01) {
      for (auto target : {AttackTarget::alice, AttackTarget::bob}) {
        const auto r = analytic_report(target, {p, eps});
        EXPECT_TRUE(r.security_holds) << p << " " << eps;
        EXPECT_LT(r.security_lhs, 1.0);
      }
    }
  }
}

TEST(AnalyticReport, AdvantageExistsForEveryP) {
  for (double p = 0.1; p < 0.95; p += 0.1) {
    for (auto target : {AttackTarget::alice, AttackTarget::bob}) {
      bool found = false;
      for (int i = 1; i <= 20; ++i) found |= analytic_report(target, {p, 0.05 * i}).advantage;
      EXPECT_TRUE(found) << p;
    }
  }
}

TEST(AnalyticReport, MutualInformationIncreasesWithX) {
  double last = -1.0;
  for (double eps = 0.01; eps <= 1.0; eps += 0.01) {
    const double i = analytic_report(AttackTarget::alice, {0.3, eps}).i_ab;
    EXPECT_GT(i, last);
    last = i;
  }
}

TEST(AnalyticReport, SmallXLimit) {
  const auto r = analytic_report(AttackTarget::alice, {0.99, 1e-6});
  EXPECT_NEAR(r.q_total, 0.5, 1e-7);
  EXPECT_LT(r.i_ab, 1e-12);
}

TEST(IabRangeSup, FrozenValues) {
  EXPECT_NEAR(i_ab_range_sup(0.1), 0.7136030428840437, 1e-12);
  EXPECT_NEAR(i_ab_range_sup(0.5), 0.18872187554086717, 1e-12);
  EXPECT_NEAR(i_ab_range_sup(0.9), 0.007225546012191719, 1e-12);
  for (double p : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(analytic_report(AttackTarget::alice, {p, 1.0 - 1e-9}).i_ab, i_ab_range_sup(p), 1e-6);
  }
  EXPECT_EQ(kind_of([] { i_ab_range_sup(1.0); }), ErrorKind::bad_param);
}

TEST(LossReport, Examples) {
  const auto a = loss_report(0.6, 0.8, AttackTarget::alice, 0.25);
  EXPECT_NEAR(*a.p_max, 0.25, 1e-12);
  EXPECT_NEAR(a.p_obs_formula, 0.45, 1e-15);
  const auto b = loss_report(0.6, 0.8, AttackTarget::bob, 0.5);
  EXPECT_NEAR(*b.p_max, 0.6666666666666667, 1e-12);
  EXPECT_FALSE(b.filter_fraction);
  EXPECT_NEAR(loss_report(0.8, std::nullopt, AttackTarget::bob, 0.5).p_obs_formula, 0.65, 1e-15);
  EXPECT_FALSE(loss_report(0.8, std::nullopt, AttackTarget::bob, 0.5).p_max);
}

TEST(LossReport, HighLossLetsBobAttackRunAlways) {
  const auto r = loss_report(0.4, std::nullopt, AttackTarget::bob, 0.5);
  EXPECT_EQ(*r.p_max, 1.0);
  EXPECT_NEAR(r.p_obs_formula, 0.45, 1e-15);
  EXPECT_NEAR(*r.filter_fraction, 0.05 / 0.45, 1e-15);
  EXPECT_EQ(*loss_report(0.5, std::nullopt, AttackTarget::bob, 0.0).filter_fraction, 0.0);
}

TEST(LossReport, Errors) {
  EXPECT_EQ(kind_of([] { loss_report(0.8, 0.7, AttackTarget::alice, 0.1); }), ErrorKind::bad_param);
  EXPECT_EQ(kind_of([] { loss_report(0.0, std::nullopt, AttackTarget::alice, 0.1); }), ErrorKind::bad_param);
  EXPECT_EQ(kind_of([] { loss_report(0.6, 0.8, AttackTarget::tuning, 0.1); }), ErrorKind::bad_param);
  EXPECT_EQ(kind_of([] { loss_report(0.6, 0.8, AttackTarget::alice, 1.0); }), ErrorKind::bad_param);
}

TEST(EmpiricalStatistics, HonestLogIsClean) {
  const auto s = empirical_statistics(run_experiment({0.5, 1.0, 5000, 31}, honest()));
  EXPECT_EQ(s.n_rounds, 5000u);
  EXPECT_EQ(s.n_mm + s.n_cm, 5000u);
  EXPECT_EQ(s.n_mm_valid, s.n_mm);
  EXPECT_EQ(*s.q_a_hat, 0.0);
  EXPECT_EQ(*s.p_obs_hat, 1.0);
  EXPECT_NEAR(*s.i_ab_hat, 1.0, 1e-3);
  EXPECT_EQ(*s.i_aj_eve_hat, 0.0);
  EXPECT_EQ(*s.security_lhs_hat, 0.0);
  EXPECT_FALSE(s.q_a_eavesdrop_hat);
}

TEST(EmpiricalStatistics, AbsentRatesWithoutMessageRounds) {
  const auto s = empirical_statistics(run_experiment({1.0, 1.0, 100, 1}, honest()));
  EXPECT_EQ(s.n_mm, 0u);
  EXPECT_FALSE(s.q_a_hat);
  EXPECT_FALSE(s.i_aj_eve_hat);
  EXPECT_FALSE(s.security_lhs_hat);
  EXPECT_EQ(*s.p_obs_hat, 1.0);
  EXPECT_EQ(kind_of([] { empirical_statistics(TrialLog{}); }), ErrorKind::bad_param);
}

TEST(EmpiricalStatistics, BobAttackMatchesClosedForm) {
  const auto log = run_experiment({0.5, 1.0, 100000, 41}, bob_key_attack({0.5, 0.5}), 4);
  const auto s = empirical_statistics(log);
  EXPECT_NEAR(*s.i_bk_eve_hat, 0.25, 0.02);
  EXPECT_EQ(*s.i_aj_eve_hat, 0.0);
  EXPECT_LE(std::abs(*s.q_a_hat - 0.375), three_sigma(0.375, s.n_mm_valid));
  EXPECT_LE(std::abs(*s.q_a_eavesdrop_hat - 0.5), three_sigma(0.5, s.n_eavesdrop_mm_valid));
  EXPECT_LE(std::abs(*s.p_obs_hat - 0.75), three_sigma(0.75, s.n_cm));
  EXPECT_EQ(*s.p_corr_hat, 0.0);

  // Replacing "none" by a coin: Eve's symbol equals k with probability
  // p/2 + (1 - p/2)/2 = 5/8, so I = 1 - H(5/8).
  const auto forced = empirical_statistics(log, {true});
  EXPECT_NEAR(*forced.i_bk_eve_hat, 0.04556599707503495, 0.02);
}

TEST(ThreeSigma, Value) {
  EXPECT_NEAR(three_sigma(0.5, 100), 0.15, 1e-15);
}
