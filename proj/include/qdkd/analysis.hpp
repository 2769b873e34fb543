#pragma once

// Closed-form predictions for the composite attacks, the parity-based
// security test, loss witnesses, and plug-in estimators over trial logs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "qdkd/protocol.hpp"

namespace qdkd {

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::bad_param, "binary entropy needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct SecurityCheck {
  double lhs = 0.0;
  bool holds = false;
};

// H(Q) + H(P_corr) < 1
inline SecurityCheck security_condition(double q, double p_corr) {
  const double lhs = binary_entropy(q) + binary_entropy(p_corr);
  return {lhs, lhs < 1.0};
}

using JointCounts = std::map<std::pair<int, int>, std::uint64_t>;

inline double plugin_mutual_information(const JointCounts& joint) {
  std::uint64_t total = 0;
  std::map<int, std::uint64_t> px;
  std::map<int, std::uint64_t> py;
  for (const auto& [xy, c] : joint) {
    total += c;
    px[xy.first] += c;
    py[xy.second] += c;
  }
  if (total == 0) throw Error(ErrorKind::bad_param, "mutual information of an empty table");
  const double n = static_cast<double>(total);
  double mi = 0.0;
  for (const auto& [xy, c] : joint) {
    if (c == 0) continue;
    const double pxy = static_cast<double>(c) / n;
    const double pa = static_cast<double>(px[xy.first]) / n;
    const double pb = static_cast<double>(py[xy.second]) / n;
    mi += pxy * std::log2(pxy / (pa * pb));
  }
  return std::max(0.0, mi);
}

// ---- parity statistics for general J, K --------------------------------

inline ModeOperator identity_be() { return op_identity({photon_mode(mode_b), photon_mode(mode_e)}); }

inline DensityMatrix unbiased_bell_mixture() {
  return density_from_mixture({{0.5, make_bell_state(BellSign::plus, mode_a, mode_b)},
                               {0.5, make_bell_state(BellSign::minus, mode_a, mode_b)}});
}

namespace detail {

inline void require_be(const ModeOperator& op) {
  if (op.kind() != OperatorKind::unitary) throw Error(ErrorKind::not_unitary, "Eve's operators must be unitary");
  for (const auto& m : op.targets()) {
    if (m.name != mode_b && m.name != mode_e) {
      throw Error(ErrorKind::forbidden_mode, "Eve's operators act on B and E only");
    }
  }
}

}  // namespace detail

// Tr(rho R) with rho = J (rho_AB (x) |e><e|) J^dagger.
inline double p_corr_true(const ModeOperator& j, const StateVector& ancilla,
                          const DensityMatrix& rho_ab = unbiased_bell_mixture()) {
  detail::require_be(j);
  const DensityMatrix rho = transform(tensor(rho_ab, DensityMatrix::pure(ancilla)), j);
  return expectation(rho, op_parity(mode_a, mode_b));
}

// <mu|nu> with mu = K Z_B^0 J |Psi+>|e>, nu = K Z_B^1 J |Psi->|e>.
inline cplx claimed_overlap(const ModeOperator& j, const ModeOperator& k, const StateVector& ancilla) {
  detail::require_be(j);
  detail::require_be(k);
  const Mode b = photon_mode(mode_b);
  const auto mu = apply(apply(tensor(make_bell_state(BellSign::plus, mode_a, mode_b), ancilla), j), k);
  const auto nu = apply(
      apply(apply(tensor(make_bell_state(BellSign::minus, mode_a, mode_b), ancilla), j), op_z_pow(1, b)), k);
  return inner_product(mu, nu);
}

// (1 + Re<mu|nu>)/2, the disputed closed form.
inline double p_corr_claimed(const ModeOperator& j, const ModeOperator& k, const StateVector& ancilla) {
  return 0.5 * (1.0 + claimed_overlap(j, k, ancilla).real());
}

// ---- analytic report ---------------------------------------------------

enum class AttackTarget { tuning, alice, bob };

constexpr std::string_view to_string(AttackTarget a) noexcept {
  switch (a) {
    case AttackTarget::tuning: return "tuning";
    case AttackTarget::alice: return "alice";
    case AttackTarget::bob: return "bob";
  }
  return "?";
}

struct AnalyticReport {
  AttackDescriptor attack;
  double p = 0.0;
  double epsilon = 1.0;
  double x = 1.0;
  double q_total = 0.0;
  double p_corr = 0.0;
  double i_ab = 1.0;
  double i_eve = 0.0;
  // Eve's information on the other party's key; zero for both attacks.
  double i_eve_other_key = 0.0;
  double security_lhs = 0.0;
  bool security_holds = true;
  bool advantage = false;
};

// Q = (1 - x)/2 with x = epsilon (1 - p); I_AB = 1 - H(Q);
// I_Eve = p against Alice's key, p/2 against Bob's key; P_corr = 0.
inline AnalyticReport analytic_report(AttackTarget attack, AttackParams params) {
  if (attack == AttackTarget::tuning) params.p = 0.0;
  params.validate();
  AnalyticReport r;
  r.attack = {std::string(to_string(attack)),
              attack == AttackTarget::tuning ? std::nullopt : std::optional<double>(params.p),
              params.epsilon};
  r.p = params.p;
  r.epsilon = params.epsilon;
  r.x = params.epsilon * (1.0 - params.p);
  r.q_total = (1.0 - r.x) / 2.0;
  r.p_corr = 0.0;
  r.i_ab = 1.0 - binary_entropy(r.q_total);
  switch (attack) {
    case AttackTarget::tuning: r.i_eve = 0.0; break;
    case AttackTarget::alice: r.i_eve = params.p; break;
    case AttackTarget::bob: r.i_eve = params.p / 2.0; break;
  }
  const auto sec = security_condition(r.q_total, r.p_corr);
  r.security_lhs = sec.lhs;
  r.security_holds = sec.holds;
  r.advantage = r.i_eve > r.i_ab;
  return r;
}

// Supremum of I_AB over epsilon at fixed p, reached as epsilon -> 1.
inline double i_ab_range_sup(double p) {
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::bad_param, "p must lie in [0, 1)");
  return 1.0 - binary_entropy(p / 2.0);
}

// ---- loss witnesses ----------------------------------------------------

struct LossReport {
  double P = 1.0;
  std::optional<double> P_prime;
  AttackTarget attack = AttackTarget::alice;
  double p = 0.0;
  double p_obs_formula = 1.0;
  std::optional<double> p_max;
  // Fraction of detections Eve must discard when the attack raises P_obs above P.
  std::optional<double> filter_fraction;
};

inline LossReport loss_report(double P, std::optional<double> P_prime, AttackTarget attack, double p) {
  if (!(P > 0.0 && P <= 1.0)) throw Error(ErrorKind::bad_param, "P must lie in (0, 1]");
  if (P_prime && !(*P_prime > P && *P_prime <= 1.0)) {
    throw Error(ErrorKind::bad_param, "P' must satisfy P < P' <= 1");
  }
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::bad_param, "p must lie in [0, 1)");
  if (attack == AttackTarget::tuning) throw Error(ErrorKind::bad_param, "loss report needs alice or bob");

  LossReport r;
  r.P = P;
  r.P_prime = P_prime;
  r.attack = attack;
  r.p = p;
  if (attack == AttackTarget::alice) {
    r.p_obs_formula = P * (1.0 - p);
    if (P_prime) r.p_max = (*P_prime - P) / *P_prime;
    return r;
  }
  r.p_obs_formula = P * (1.0 - p) + p / 2.0;
  if (P <= 0.5) {
    r.p_max = 1.0;
    r.filter_fraction = std::max(0.0, r.p_obs_formula - P) / r.p_obs_formula;
  } else if (P_prime) {
    if (*P_prime <= 0.5) throw Error(ErrorKind::undefined, "losses cannot be hidden with P' <= 1/2");
    r.p_max = (*P_prime - P) / (*P_prime - 0.5);
  }
  return r;
}

// ---- empirical statistics ----------------------------------------------

struct Statistics {
  std::uint64_t n_rounds = 0;
  std::uint64_t n_mm = 0;
  std::uint64_t n_mm_valid = 0;
  std::uint64_t n_cm = 0;
  std::uint64_t n_eavesdrop_mm_valid = 0;
  std::optional<double> q_a_hat;
  std::optional<double> q_b_hat;
  std::optional<double> p_corr_hat;
  std::optional<double> p_obs_hat;
  std::optional<double> i_aj_eve_hat;
  std::optional<double> i_bk_eve_hat;
  std::optional<double> i_ab_hat;
  std::optional<double> q_a_eavesdrop_hat;
  std::optional<double> q_b_eavesdrop_hat;
  // H(mean QBER) + H(p_corr_hat)
  std::optional<double> security_lhs_hat;
};

struct StatisticsOptions {
  // Replace Eve's "no inference" symbol with a fair coin keyed on the round
  // index before computing her mutual information.
  bool forced_binary_guess = false;
};

namespace detail {

inline int symbol_code(EveSymbol s, bool forced, std::uint64_t index) {
  switch (s) {
    case EveSymbol::zero: return 0;
    case EveSymbol::one: return 1;
    case EveSymbol::none: return forced ? static_cast<int>(splitmix64(index) & 1U) : 2;
  }
  return 2;
}

inline std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline Statistics empirical_statistics(const TrialLog& log, StatisticsOptions options = {}) {
  if (log.outcomes.empty()) throw Error(ErrorKind::bad_param, "statistics of an empty log");
  Statistics s;
  s.n_rounds = log.outcomes.size();
  std::uint64_t err_a = 0, err_b = 0, eav_err_a = 0, eav_err_b = 0;
  std::uint64_t cm_detected = 0, cm_correlated = 0;
  JointCounts eve_j, eve_k, alice_bob;
  for (const auto& r : log.outcomes) {
    if (r.bob_mode == BobMode::cm) {
      ++s.n_cm;
      if (r.bob_cm_detected.value_or(false)) ++cm_detected;
      if (r.correlated.value_or(false)) ++cm_correlated;
      continue;
    }
    ++s.n_mm;
    if (!r.valid_mm()) continue;
    ++s.n_mm_valid;
    const bool ea = *r.j_view_b != r.j;
    const bool eb = *r.k_view_a != *r.k;
    err_a += ea;
    err_b += eb;
    if (r.eve_branch == EveBranch::eavesdrop) {
      ++s.n_eavesdrop_mm_valid;
      eav_err_a += ea;
      eav_err_b += eb;
    }
    ++eve_j[{r.j, detail::symbol_code(r.eve_symbol_j, options.forced_binary_guess, r.index)}];
    ++eve_k[{*r.k, detail::symbol_code(r.eve_symbol_k, options.forced_binary_guess, r.index)}];
    ++alice_bob[{r.j, *r.j_view_b}];
  }
  s.q_a_hat = detail::ratio(err_a, s.n_mm_valid);
  s.q_b_hat = detail::ratio(err_b, s.n_mm_valid);
  s.q_a_eavesdrop_hat = detail::ratio(eav_err_a, s.n_eavesdrop_mm_valid);
  s.q_b_eavesdrop_hat = detail::ratio(eav_err_b, s.n_eavesdrop_mm_valid);
  s.p_corr_hat = detail::ratio(cm_correlated, s.n_cm);
  s.p_obs_hat = detail::ratio(cm_detected, s.n_cm);
  if (s.n_mm_valid > 0) {
    s.i_aj_eve_hat = plugin_mutual_information(eve_j);
    s.i_bk_eve_hat = plugin_mutual_information(eve_k);
    s.i_ab_hat = plugin_mutual_information(alice_bob);
    s.security_lhs_hat =
        binary_entropy((*s.q_a_hat + *s.q_b_hat) / 2.0) + binary_entropy(s.p_corr_hat.value_or(0.0));
  }
  return s;
}

// 3 sigma binomial band around r for n samples.
inline double three_sigma(double r, std::uint64_t n) {
  return 3.0 * std::sqrt(r * (1.0 - r) / static_cast<double>(n));
}

}  // namespace qdkd
