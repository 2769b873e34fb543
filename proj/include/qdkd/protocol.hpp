#pragma once

// One QDKD round:
//   1. Alice prepares |Psi->_AB (tensored with Eve's ancilla, if any).
//   2. Alice encodes j with Z_B^j.
//   3. Forward leg: Bernoulli loss 1-P unless Eve intercepts at Alice's
//      output; then Eve's forward hook.
//   4. Bob picks control mode with probability cm_probability. In control
//      mode he measures B, Alice measures A, and the round ends. In message
//      mode he encodes k with Z_B^k and Eve's backward hook runs.
//   5. Alice's Bell measurement announces m (0 = Psi-, 1 = Psi+, or fail).
//   6. Partner keys follow k_A = m xor j, j_B = m xor k.
//
// Draw order from the round stream is fixed: branch (composite attacks only),
// j, loss, forward hook, Bob's mode, then either (Bob CM, Alice CM) or
// (k, backward hook, Bell measurement).

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "qdkd/attacks.hpp"

namespace qdkd {

struct ProtocolConfig {
  double cm_probability = 0.5;
  double channel_transmission = 1.0;
  std::uint64_t rounds = 0;
  std::uint64_t master_seed = 0;

  void validate() const {
    if (!(cm_probability >= 0.0 && cm_probability <= 1.0)) {
      throw Error(ErrorKind::bad_param, "cm_probability must lie in [0, 1]");
    }
    if (!(channel_transmission > 0.0 && channel_transmission <= 1.0)) {
      throw Error(ErrorKind::bad_param, "channel_transmission must lie in (0, 1]");
    }
  }
};

enum class BobMode { mm, cm };

constexpr std::string_view to_string(BobMode m) noexcept { return m == BobMode::mm ? "MM" : "CM"; }

struct RoundOutcome {
  std::uint64_t index = 0;
  BobMode bob_mode = BobMode::mm;
  int j = 0;
  std::optional<int> k;
  std::optional<BellResult> m;
  std::optional<int> k_view_a;
  std::optional<int> j_view_b;
  EveSymbol eve_symbol_j = EveSymbol::none;
  EveSymbol eve_symbol_k = EveSymbol::none;
  EveBranch eve_branch = EveBranch::none;
  std::optional<bool> bob_cm_detected;
  std::optional<int> bob_cm_result;
  std::optional<int> alice_cm_result;
  std::optional<bool> correlated;

  bool valid_mm() const noexcept {
    return bob_mode == BobMode::mm && m && *m != BellResult::fail;
  }

  friend bool operator==(const RoundOutcome&, const RoundOutcome&) = default;
};

struct TrialLog {
  ProtocolConfig config;
  AttackDescriptor attack;
  std::vector<RoundOutcome> outcomes;
};

inline std::pair<int, int> derive_partner_keys(int m, int j, int k) {
  if ((m | j | k) & ~1) throw Error(ErrorKind::bad_param, "partner keys need bit arguments");
  return {m ^ j, m ^ k};
}

inline RoundOutcome run_round(const ProtocolConfig& config, const AttackStrategy& strategy,
                              std::uint64_t index) {
  Rng rng = Rng::for_round(config.master_seed, index);
  RoundOutcome out;
  out.index = index;

  const ChannelHooks& hooks = strategy.draw_branch(rng);
  EveNotes notes;
  notes.branch = hooks.branch;
  out.eve_branch = hooks.branch;

  StateVector state = make_bell_state(BellSign::minus, mode_a, mode_b);
  if (strategy.ancilla()) state = tensor(state, *strategy.ancilla());
  const Mode b = state.mode(mode_b);

  out.j = rng.bit();
  state = apply(state, op_z_pow(out.j, b));

  const bool lost = !rng.bernoulli(config.channel_transmission);
  if (lost && !hooks.intercepts_forward) {
    state = std::move(*measure_photon_mode(state, mode_b, true, rng).post_state);
  }

  ChannelView view(state, rng);
  hooks.forward(view, notes);

  if (rng.bernoulli(config.cm_probability)) {
    out.bob_mode = BobMode::cm;
    auto bob = measure_photon_mode(state, mode_b, true, rng);
    state = std::move(*bob.post_state);
    auto alice = measure_qubit(state, mode_a, rng);
    const bool detected = bob.label != BasisLabel::vac;
    const int alice_bit = alice.label == BasisLabel::one ? 1 : 0;
    out.bob_cm_detected = detected;
    out.alice_cm_result = alice_bit;
    if (detected) out.bob_cm_result = bob.label == BasisLabel::one ? 1 : 0;
    out.correlated = detected && alice_bit == *out.bob_cm_result;
    return out;
  }

  out.bob_mode = BobMode::mm;
  out.k = rng.bit();
  state = apply(state, op_z_pow(*out.k, b));
  hooks.backward(view, notes);

  const BellOutcome bell = bell_measure(state, mode_a, mode_b, rng);
  out.m = bell.label;
  std::optional<int> m;
  if (bell.label != BellResult::fail) {
    m = static_cast<int>(bell.label);
    const auto [ka, jb] = derive_partner_keys(*m, out.j, *out.k);
    out.k_view_a = ka;
    out.j_view_b = jb;
  }
  std::tie(out.eve_symbol_j, out.eve_symbol_k) = hooks.infer(m, notes);
  return out;
}

// Rounds are independent given their derived seeds, so the log does not
// depend on `threads`.
inline TrialLog run_experiment(const ProtocolConfig& config, const AttackStrategy& strategy,
                               unsigned threads = 1) {
  config.validate();
  TrialLog log{config, strategy.descriptor(), {}};
  log.outcomes.resize(config.rounds);
  const std::uint64_t n = config.rounds;
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2 * threads) {
    for (std::uint64_t i = 0; i < n; ++i) log.outcomes[i] = run_round(config, strategy, i);
    return log;
  }
  std::vector<std::jthread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::uint64_t i = w; i < n; i += threads) log.outcomes[i] = run_round(config, strategy, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return log;
}

}  // namespace qdkd
