#pragma once

// Eavesdropper strategies as forward/backward channel hooks plus a classical
// inference rule. Hooks see the joint state only through a ChannelView, which
// rejects any operation on modes other than B and E.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdkd/quantum_core.hpp"

namespace qdkd {

inline const std::string mode_a = "A";
inline const std::string mode_b = "B";
inline const std::string mode_e = "E";

enum class EveSymbol { zero, one, none };
enum class EveBranch { none, tuning, eavesdrop };

constexpr EveSymbol eve_bit(int bit) noexcept { return bit == 0 ? EveSymbol::zero : EveSymbol::one; }

constexpr std::string_view to_string(EveSymbol s) noexcept {
  switch (s) {
    case EveSymbol::zero: return "0";
    case EveSymbol::one: return "1";
    case EveSymbol::none: return "none";
  }
  return "?";
}

constexpr std::string_view to_string(EveBranch b) noexcept {
  switch (b) {
    case EveBranch::none: return "none";
    case EveBranch::tuning: return "tuning";
    case EveBranch::eavesdrop: return "eavesdrop";
  }
  return "?";
}

// Eve's private per-round record.
struct EveNotes {
  EveBranch branch = EveBranch::none;
  std::optional<int> q;  // phase flip applied on the way back
  std::optional<int> t;  // polarization measured on the way out
  std::optional<int> n;  // ancilla measurement on the way back
};

class ChannelView {
 public:
  ChannelView(StateVector& state, Rng& rng, std::set<std::string> allowed = {mode_b, mode_e})
      : state_(state), rng_(rng), allowed_(std::move(allowed)) {}

  void apply(const ModeOperator& op) {
    for (const auto& m : op.targets()) touch(m.name);
    state_ = qdkd::apply(state_, op);
  }

  BasisLabel measure(const std::string& mode, bool destructive) {
    touch(mode);
    auto outcome = measure_photon_mode(state_, mode, destructive, rng_);
    state_ = std::move(*outcome.post_state);
    return outcome.label;
  }

  void prepare(const std::string& mode, BasisLabel label) {
    touch(mode);
    state_ = prepare_mode(state_, mode, label);
  }

  Rng& rng() noexcept { return rng_; }
  const StateVector& state() const noexcept { return state_; }
  const std::set<std::string>& touched() const noexcept { return touched_; }

 private:
  void touch(const std::string& mode) {
    if (!allowed_.contains(mode)) {
      throw Error(ErrorKind::forbidden_mode, "channel hooks may not act on mode '" + mode + "'");
    }
    touched_.insert(mode);
  }

  StateVector& state_;
  Rng& rng_;
  std::set<std::string> allowed_;
  std::set<std::string> touched_;
};

using ChannelHook = std::function<void(ChannelView&, EveNotes&)>;
// (announced m or absent, notes) -> (symbol for j, symbol for k)
using InferHook =
    std::function<std::pair<EveSymbol, EveSymbol>(std::optional<int>, const EveNotes&)>;

struct ChannelHooks {
  EveBranch branch = EveBranch::none;
  bool intercepts_forward = false;
  ChannelHook forward;
  ChannelHook backward;
  InferHook infer;
};

struct AttackParams {
  double p = 0.0;
  double epsilon = 1.0;

  void validate() const {
    if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::bad_param, "p must lie in [0, 1)");
    validate_epsilon(epsilon);
  }

  static void validate_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
      throw Error(ErrorKind::bad_param, "epsilon must lie in (0, 1]");
    }
  }
};

// Values above 1/2 are accepted; the notice documents that they extend the
// published bound on epsilon.
inline std::optional<std::string> epsilon_notice(double epsilon) {
  if (epsilon > 0.5) {
    return "epsilon > 1/2 lies outside the originally stated bound 0 < epsilon <= 1/2; accepted";
  }
  return std::nullopt;
}

struct AttackDescriptor {
  std::string name;
  std::optional<double> p;
  std::optional<double> epsilon;
};

class AttackStrategy {
 public:
  AttackStrategy(AttackDescriptor descriptor, std::optional<StateVector> ancilla, ChannelHooks regular)
      : descriptor_(std::move(descriptor)), ancilla_(std::move(ancilla)), regular_(std::move(regular)) {}

  AttackStrategy(AttackDescriptor descriptor, std::optional<StateVector> ancilla, ChannelHooks regular,
                 ChannelHooks eavesdrop, double eavesdrop_probability)
      : descriptor_(std::move(descriptor)),
        ancilla_(std::move(ancilla)),
        regular_(std::move(regular)),
        eavesdrop_(std::move(eavesdrop)),
        eavesdrop_probability_(eavesdrop_probability) {}

  const AttackDescriptor& descriptor() const noexcept { return descriptor_; }
  const std::optional<StateVector>& ancilla() const noexcept { return ancilla_; }
  bool composite() const noexcept { return eavesdrop_.has_value(); }
  double eavesdrop_probability() const noexcept { return eavesdrop_probability_; }

  // Composite strategies consume one uniform to pick the branch.
  const ChannelHooks& draw_branch(Rng& rng) const {
    if (!eavesdrop_) return regular_;
    return rng.bernoulli(eavesdrop_probability_) ? *eavesdrop_ : regular_;
  }

  const ChannelHooks& regular_hooks() const noexcept { return regular_; }
  const std::optional<ChannelHooks>& eavesdrop_hooks() const noexcept { return eavesdrop_; }

 private:
  AttackDescriptor descriptor_;
  std::optional<StateVector> ancilla_;
  ChannelHooks regular_;
  std::optional<ChannelHooks> eavesdrop_;
  double eavesdrop_probability_ = 0.0;
};

namespace detail {

inline void no_op(ChannelView&, EveNotes&) {}

inline std::pair<EveSymbol, EveSymbol> infer_nothing(std::optional<int>, const EveNotes&) {
  return {EveSymbol::none, EveSymbol::none};
}

inline ChannelHooks tuning_hooks(double epsilon) {
  ChannelHooks h;
  h.branch = EveBranch::tuning;
  h.forward = no_op;
  h.backward = [epsilon](ChannelView& view, EveNotes& notes) {
    const int q = view.rng().bernoulli((1.0 - epsilon) / 2.0) ? 1 : 0;
    notes.q = q;
    view.apply(op_z_pow(q, photon_mode(mode_b)));
  };
  h.infer = infer_nothing;
  return h;
}

// Photon swapped into an empty ancilla on the way out, swapped back and
// phase-flipped by a uniform q on the way in. Alice announces m = j xor q.
inline ChannelHooks alice_eavesdrop_hooks() {
  ChannelHooks h;
  h.branch = EveBranch::eavesdrop;
  h.intercepts_forward = true;
  h.forward = [](ChannelView& view, EveNotes&) { view.apply(op_swap(mode_b, mode_e)); };
  h.backward = [](ChannelView& view, EveNotes& notes) {
    view.apply(op_swap(mode_b, mode_e));
    const int q = view.rng().bit();
    notes.q = q;
    view.apply(op_z_pow(q, photon_mode(mode_b)));
  };
  h.infer = [](std::optional<int> m, const EveNotes& notes) {
    if (!m || !notes.q) return std::pair{EveSymbol::none, EveSymbol::none};
    return std::pair{eve_bit(*m ^ *notes.q), EveSymbol::none};
  };
  return h;
}

// Measure B (absorbing the photon) to get t, send X^t V |vac>_B|0>_E onward;
// on the way back undo X^t V, read E to get n = k*t, and resend |t>_B.
inline ChannelHooks bob_eavesdrop_hooks() {
  ChannelHooks h;
  h.branch = EveBranch::eavesdrop;
  h.intercepts_forward = true;
  h.forward = [](ChannelView& view, EveNotes& notes) {
    const BasisLabel seen = view.measure(mode_b, true);
    // VAC cannot occur with an intercepted forward leg; treat it as t = 0.
    const int t = seen == BasisLabel::one ? 1 : 0;
    notes.t = t;
    view.apply(op_v(mode_b, mode_e));
    view.apply(op_x_pow(t, photon_mode(mode_b)));
  };
  h.backward = [](ChannelView& view, EveNotes& notes) {
    const int t = notes.t.value_or(0);
    view.apply(dagger(compose(op_x_pow(t, photon_mode(mode_b)), op_v(mode_b, mode_e))));
    const BasisLabel n = view.measure(mode_e, true);
    notes.n = n == BasisLabel::one ? 1 : 0;
    view.prepare(mode_b, bit_label(t));
  };
  h.infer = [](std::optional<int>, const EveNotes& notes) {
    if (notes.t == 1 && notes.n) return std::pair{EveSymbol::none, eve_bit(*notes.n)};
    return std::pair{EveSymbol::none, EveSymbol::none};
  };
  return h;
}

}  // namespace detail

inline AttackStrategy honest() {
  ChannelHooks h;
  h.forward = detail::no_op;
  h.backward = detail::no_op;
  h.infer = detail::infer_nothing;
  return AttackStrategy({"none", std::nullopt, std::nullopt}, std::nullopt, std::move(h));
}

inline AttackStrategy swap_vacuum() {
  ChannelHooks h;
  h.intercepts_forward = true;
  h.forward = [](ChannelView& view, EveNotes&) { view.apply(op_swap(mode_b, mode_e)); };
  h.backward = h.forward;
  h.infer = detail::infer_nothing;
  return AttackStrategy({"swap", std::nullopt, std::nullopt},
                        make_basis_state({photon_mode(mode_e)}, {BasisLabel::vac}), std::move(h));
}

inline AttackStrategy error_tuning(double epsilon) {
  AttackParams::validate_epsilon(epsilon);
  return AttackStrategy({"tuning", std::nullopt, epsilon}, std::nullopt, detail::tuning_hooks(epsilon));
}

inline AttackStrategy alice_key_attack(const AttackParams& params) {
  params.validate();
  return AttackStrategy({"alice", params.p, params.epsilon},
                        make_basis_state({photon_mode(mode_e)}, {BasisLabel::vac}),
                        detail::tuning_hooks(params.epsilon), detail::alice_eavesdrop_hooks(), params.p);
}

inline AttackStrategy bob_key_attack(const AttackParams& params) {
  params.validate();
  return AttackStrategy({"bob", params.p, params.epsilon},
                        make_basis_state({photon_mode(mode_e)}, {BasisLabel::zero}),
                        detail::tuning_hooks(params.epsilon), detail::bob_eavesdrop_hooks(), params.p);
}

}  // namespace qdkd
