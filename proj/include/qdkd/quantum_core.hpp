#pragma once

// Dense state-vector engine for polarization photons with vacuum.
//
// Modes are either QUBIT (levels 0, 1) or PHOTON (levels VAC, 0, 1).
// Joint amplitudes are stored row-major in mode order: the last mode varies
// fastest. The largest space used anywhere is A(2) x B(3) x E(3) = 18.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdkd/error.hpp"
#include "qdkd/rng.hpp"

namespace qdkd {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double algebra_tol = 1e-12;
inline constexpr double probability_tol = 1e-10;

enum class ModeKind { qubit, photon };
enum class BasisLabel { vac, zero, one };

constexpr std::size_t dimension(ModeKind kind) noexcept {
  return kind == ModeKind::qubit ? 2 : 3;
}

inline std::size_t basis_index(ModeKind kind, BasisLabel label) {
  if (kind == ModeKind::qubit) {
    if (label == BasisLabel::vac) {
      throw Error(ErrorKind::invalid_basis_label, "a qubit mode has no vacuum level");
    }
    return label == BasisLabel::zero ? 0 : 1;
  }
  switch (label) {
    case BasisLabel::vac: return 0;
    case BasisLabel::zero: return 1;
    case BasisLabel::one: return 2;
  }
  return 0;
}

inline BasisLabel basis_label(ModeKind kind, std::size_t index) {
  static constexpr std::array<BasisLabel, 2> qubit{BasisLabel::zero, BasisLabel::one};
  static constexpr std::array<BasisLabel, 3> photon{BasisLabel::vac, BasisLabel::zero,
                                                    BasisLabel::one};
  if (index >= dimension(kind)) {
    throw Error(ErrorKind::invalid_basis_label, "basis index out of range");
  }
  return kind == ModeKind::qubit ? qubit[index] : photon[index];
}

constexpr BasisLabel bit_label(int bit) noexcept {
  return bit == 0 ? BasisLabel::zero : BasisLabel::one;
}

constexpr std::string_view to_string(BasisLabel label) noexcept {
  switch (label) {
    case BasisLabel::vac: return "vac";
    case BasisLabel::zero: return "0";
    case BasisLabel::one: return "1";
  }
  return "?";
}

struct Mode {
  std::string name;
  ModeKind kind;

  std::size_t dim() const noexcept { return dimension(kind); }
  friend bool operator==(const Mode&, const Mode&) = default;
};

inline Mode qubit_mode(std::string name) { return {std::move(name), ModeKind::qubit}; }
inline Mode photon_mode(std::string name) { return {std::move(name), ModeKind::photon}; }

using Modes = std::vector<Mode>;

namespace detail {

inline std::size_t total_dimension(const Modes& modes) {
  std::size_t d = 1;
  for (const auto& m : modes) d *= m.dim();
  return d;
}

inline void require_distinct(const Modes& modes) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i].name == modes[j].name) {
        throw Error(ErrorKind::mode_collision, "duplicate mode '" + modes[i].name + "'");
      }
    }
  }
}

inline std::size_t position_of(const Modes& modes, std::string_view name) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (modes[i].name == name) return i;
  }
  throw Error(ErrorKind::unknown_mode, "no mode named '" + std::string(name) + "'");
}

inline std::vector<std::size_t> strides_of(const Modes& modes) {
  std::vector<std::size_t> strides(modes.size(), 1);
  for (std::size_t i = modes.size(); i-- > 1;) strides[i - 1] = strides[i] * modes[i].dim();
  return strides;
}

// Index bookkeeping for an operator acting on `targets` inside `modes`.
// For a full index i: sub(i) is the targets' joint index, and
// base(i) + offset[s] is i with the targets' digits replaced by those of s.
struct Embedding {
  std::size_t full_dim = 1;
  std::size_t target_dim = 1;
  std::vector<std::size_t> offset;
  std::vector<std::size_t> sub;

  Embedding(const Modes& modes, const Modes& targets) {
    require_distinct(targets);
    const auto strides = strides_of(modes);
    full_dim = total_dimension(modes);
    std::vector<std::size_t> pos;
    for (const auto& t : targets) {
      const std::size_t p = position_of(modes, t.name);
      if (modes[p].kind != t.kind) {
        throw Error(ErrorKind::dimension_mismatch, "mode '" + t.name + "' has a different kind");
      }
      pos.push_back(p);
    }
    target_dim = total_dimension(targets);
    const auto tstrides = strides_of(targets);
    offset.assign(target_dim, 0);
    for (std::size_t s = 0; s < target_dim; ++s) {
      for (std::size_t k = 0; k < targets.size(); ++k) {
        offset[s] += ((s / tstrides[k]) % targets[k].dim()) * strides[pos[k]];
      }
    }
    sub.assign(full_dim, 0);
    for (std::size_t i = 0; i < full_dim; ++i) {
      for (std::size_t k = 0; k < targets.size(); ++k) {
        sub[i] += ((i / strides[pos[k]]) % modes[pos[k]].dim()) * tstrides[k];
      }
    }
  }

  std::size_t base(std::size_t i) const { return i - offset[sub[i]]; }
};

inline Vector apply_matrix(const Modes& modes, const Vector& amps, const Modes& targets,
                           const Matrix& m) {
  const Embedding e(modes, targets);
  Vector out = Vector::Zero(e.full_dim);
  for (std::size_t i = 0; i < e.full_dim; ++i) {
    const std::size_t row = e.sub[i];
    const std::size_t base = e.base(i);
    cplx acc{0.0, 0.0};
    for (std::size_t s = 0; s < e.target_dim; ++s) {
      acc += m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(s)) *
             amps(static_cast<Eigen::Index>(base + e.offset[s]));
    }
    out(static_cast<Eigen::Index>(i)) = acc;
  }
  return out;
}

// Full-space matrix of `m` on `targets`, identity elsewhere.
inline Matrix embed_matrix(const Modes& modes, const Modes& targets, const Matrix& m) {
  const Embedding e(modes, targets);
  Matrix out = Matrix::Zero(e.full_dim, e.full_dim);
  for (std::size_t i = 0; i < e.full_dim; ++i) {
    const std::size_t base = e.base(i);
    for (std::size_t s = 0; s < e.target_dim; ++s) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(base + e.offset[s])) =
          m(static_cast<Eigen::Index>(e.sub[i]), static_cast<Eigen::Index>(s));
    }
  }
  return out;
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

class StateVector {
 public:
  StateVector(Modes modes, Vector amplitudes)
      : modes_(std::move(modes)), amplitudes_(std::move(amplitudes)) {
    detail::require_distinct(modes_);
    if (static_cast<std::size_t>(amplitudes_.size()) != detail::total_dimension(modes_)) {
      throw Error(ErrorKind::dimension_mismatch, "amplitude count does not match mode dimensions");
    }
    if (std::abs(amplitudes_.squaredNorm() - 1.0) > algebra_tol) {
      throw Error(ErrorKind::not_normalized, "state vector norm differs from 1");
    }
  }

  // Normalizes `amplitudes` first; the caller guarantees a nonzero vector.
  static StateVector normalized(Modes modes, Vector amplitudes) {
    const double n = amplitudes.norm();
    if (n == 0.0) throw Error(ErrorKind::not_normalized, "cannot normalize the zero vector");
    return StateVector(std::move(modes), amplitudes / n);
  }

  const Modes& modes() const noexcept { return modes_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  double norm() const { return amplitudes_.norm(); }

  bool has_mode(std::string_view name) const {
    return std::any_of(modes_.begin(), modes_.end(), [&](const Mode& m) { return m.name == name; });
  }
  const Mode& mode(std::string_view name) const { return modes_[detail::position_of(modes_, name)]; }

  cplx amplitude(const std::vector<BasisLabel>& labels) const {
    if (labels.size() != modes_.size()) {
      throw Error(ErrorKind::dimension_mismatch, "one label per mode is required");
    }
    const auto strides = detail::strides_of(modes_);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      idx += basis_index(modes_[i].kind, labels[i]) * strides[i];
    }
    return amplitudes_(static_cast<Eigen::Index>(idx));
  }

 private:
  Modes modes_;
  Vector amplitudes_;
};

inline StateVector make_basis_state(const Modes& modes, const std::vector<BasisLabel>& labels) {
  if (labels.size() != modes.size()) {
    throw Error(ErrorKind::invalid_basis_label, "one label per mode is required");
  }
  detail::require_distinct(modes);
  const auto strides = detail::strides_of(modes);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    idx += basis_index(modes[i].kind, labels[i]) * strides[i];
  }
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(detail::total_dimension(modes)));
  amps(static_cast<Eigen::Index>(idx)) = 1.0;
  return StateVector(modes, std::move(amps));
}

enum class BellSign { plus, minus };

// |Psi+-> = (|0>_a|1>_b +- |1>_a|0>_b)/sqrt(2), with a a QUBIT and b a PHOTON.
inline StateVector make_bell_state(BellSign sign, std::string mode_a, std::string mode_b) {
  const Modes modes{qubit_mode(std::move(mode_a)), photon_mode(std::move(mode_b))};
  detail::require_distinct(modes);
  const double r = 1.0 / std::sqrt(2.0);
  Vector amps = Vector::Zero(6);
  // index = a*3 + b, b in {vac, 0, 1}
  amps(0 * 3 + 2) = r;
  amps(1 * 3 + 1) = sign == BellSign::plus ? r : -r;
  return StateVector(modes, std::move(amps));
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  Modes modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());
  detail::require_distinct(modes);
  Vector amps(static_cast<Eigen::Index>(a.size() * b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      amps(static_cast<Eigen::Index>(i * b.size() + j)) =
          a.amplitudes()(static_cast<Eigen::Index>(i)) * b.amplitudes()(static_cast<Eigen::Index>(j));
    }
  }
  return StateVector(std::move(modes), std::move(amps));
}

inline cplx inner_product(const StateVector& a, const StateVector& b) {
  if (a.modes() != b.modes()) {
    throw Error(ErrorKind::mode_collision, "inner product needs identical mode layouts");
  }
  return a.amplitudes().dot(b.amplitudes());
}

// |<a|b>| within tol of 1, i.e. equal rays.
inline bool equal_up_to_phase(const StateVector& a, const StateVector& b, double tol = algebra_tol) {
  if (a.modes() != b.modes()) return false;
  const cplx overlap = inner_product(a, b);
  if (std::abs(overlap) == 0.0) return false;
  const cplx phase = overlap / std::abs(overlap);
  return (b.amplitudes() * std::conj(phase) - a.amplitudes()).cwiseAbs().maxCoeff() < tol;
}

enum class OperatorKind { unitary, observable };

class ModeOperator {
 public:
  ModeOperator(Modes targets, Matrix matrix, OperatorKind kind)
      : targets_(std::move(targets)), matrix_(std::move(matrix)), kind_(kind) {
    detail::require_distinct(targets_);
    const auto d = static_cast<Eigen::Index>(detail::total_dimension(targets_));
    if (matrix_.rows() != d || matrix_.cols() != d) {
      throw Error(ErrorKind::dimension_mismatch, "operator matrix does not match target dimensions");
    }
    if (kind_ == OperatorKind::unitary && !is_unitary(matrix_)) {
      throw Error(ErrorKind::not_unitary, "U^dagger U differs from the identity");
    }
    if (kind_ == OperatorKind::observable && !is_hermitian(matrix_)) {
      throw Error(ErrorKind::not_observable, "observable matrix is not Hermitian");
    }
  }

  static double unitarity_defect(const Matrix& m) {
    return detail::max_abs(m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
  }
  static bool is_unitary(const Matrix& m, double tol = algebra_tol) {
    return m.rows() == m.cols() && unitarity_defect(m) < tol;
  }
  static bool is_hermitian(const Matrix& m, double tol = algebra_tol) {
    return m.rows() == m.cols() && detail::max_abs(m - m.adjoint()) < tol;
  }

  const Modes& targets() const noexcept { return targets_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  OperatorKind kind() const noexcept { return kind_; }

 private:
  Modes targets_;
  Matrix matrix_;
  OperatorKind kind_;
};

inline ModeOperator op_identity(Modes targets) {
  const auto d = static_cast<Eigen::Index>(detail::total_dimension(targets));
  return ModeOperator(std::move(targets), Matrix::Identity(d, d), OperatorKind::unitary);
}

// Z^q on one mode: |1> picks up a sign, vacuum is left alone.
inline ModeOperator op_z_pow(int q, const Mode& mode) {
  if (q != 0 && q != 1) throw Error(ErrorKind::bad_param, "Z exponent must be a bit");
  const auto d = static_cast<Eigen::Index>(mode.dim());
  Matrix m = Matrix::Identity(d, d);
  if (q == 1) {
    const auto one = static_cast<Eigen::Index>(basis_index(mode.kind, BasisLabel::one));
    m(one, one) = -1.0;
  }
  return ModeOperator({mode}, std::move(m), OperatorKind::unitary);
}

// X^t on one mode: polarization NOT, vacuum fixed.
inline ModeOperator op_x_pow(int t, const Mode& mode) {
  if (t != 0 && t != 1) throw Error(ErrorKind::bad_param, "X exponent must be a bit");
  const auto d = static_cast<Eigen::Index>(mode.dim());
  Matrix m = Matrix::Identity(d, d);
  if (t == 1) {
    const auto zero = static_cast<Eigen::Index>(basis_index(mode.kind, BasisLabel::zero));
    const auto one = static_cast<Eigen::Index>(basis_index(mode.kind, BasisLabel::one));
    m(zero, zero) = 0.0;
    m(one, one) = 0.0;
    m(zero, one) = 1.0;
    m(one, zero) = 1.0;
  }
  return ModeOperator({mode}, std::move(m), OperatorKind::unitary);
}

inline ModeOperator op_swap(const std::string& b, const std::string& e) {
  Matrix m = Matrix::Zero(9, 9);
  for (Eigen::Index x = 0; x < 3; ++x) {
    for (Eigen::Index y = 0; y < 3; ++y) m(y * 3 + x, x * 3 + y) = 1.0;
  }
  return ModeOperator({photon_mode(b), photon_mode(e)}, std::move(m), OperatorKind::unitary);
}

// Matrix of V on (B, E), index = b*3 + e with levels (vac, 0, 1).
//   V|vac,0> = (-i/sqrt2)(|0,vac> + |vac,1>)
//   V|vac,1> = (-i/sqrt2)(|0,vac> - |vac,1>)
//   V|0,vac> = |vac,0>
// and identity on the remaining six basis states.
inline Matrix v_matrix() {
  const cplx c = cplx{0.0, -1.0} / std::sqrt(2.0);
  constexpr Eigen::Index vac_0 = 0 * 3 + 1;
  constexpr Eigen::Index vac_1 = 0 * 3 + 2;
  constexpr Eigen::Index zero_vac = 1 * 3 + 0;
  Matrix m = Matrix::Identity(9, 9);
  m(vac_0, vac_0) = 0.0;
  m(vac_1, vac_1) = 0.0;
  m(zero_vac, zero_vac) = 0.0;
  m(zero_vac, vac_0) = c;
  m(vac_1, vac_0) = c;
  m(zero_vac, vac_1) = c;
  m(vac_1, vac_1) = -c;
  m(vac_0, zero_vac) = 1.0;
  return m;
}

inline ModeOperator op_v(const std::string& b, const std::string& e) {
  return ModeOperator({photon_mode(b), photon_mode(e)}, v_matrix(), OperatorKind::unitary);
}

inline ModeOperator dagger(const ModeOperator& op) {
  if (op.kind() != OperatorKind::unitary) {
    throw Error(ErrorKind::not_unitary, "dagger is defined for unitary operators only");
  }
  return ModeOperator(op.targets(), op.matrix().adjoint(), OperatorKind::unitary);
}

// outer * inner: `inner` acts first. Targets are merged in order of first appearance.
inline ModeOperator compose(const ModeOperator& outer, const ModeOperator& inner) {
  Modes targets = inner.targets();
  for (const auto& m : outer.targets()) {
    if (std::none_of(targets.begin(), targets.end(), [&](const Mode& t) { return t.name == m.name; })) {
      targets.push_back(m);
    }
  }
  Matrix product = detail::embed_matrix(targets, outer.targets(), outer.matrix()) *
                   detail::embed_matrix(targets, inner.targets(), inner.matrix());
  const bool unitary =
      outer.kind() == OperatorKind::unitary && inner.kind() == OperatorKind::unitary;
  if (unitary) return ModeOperator(std::move(targets), std::move(product), OperatorKind::unitary);
  return ModeOperator(std::move(targets), std::move(product), OperatorKind::observable);
}

inline StateVector apply(const StateVector& state, const ModeOperator& op) {
  if (op.kind() != OperatorKind::unitary) {
    throw Error(ErrorKind::not_unitary, "only unitary operators map states to states");
  }
  return StateVector(state.modes(),
                     detail::apply_matrix(state.modes(), state.amplitudes(), op.targets(), op.matrix()));
}

// R = |00><00| + |11><11| on (a, b); zero on every b-vacuum configuration.
inline ModeOperator op_parity(const std::string& a, const std::string& b) {
  Matrix m = Matrix::Zero(6, 6);
  m(0 * 3 + 1, 0 * 3 + 1) = 1.0;
  m(1 * 3 + 2, 1 * 3 + 2) = 1.0;
  return ModeOperator({qubit_mode(a), photon_mode(b)}, std::move(m), OperatorKind::observable);
}

inline ModeOperator op_bell_projector(BellSign sign, const std::string& a, const std::string& b) {
  const Vector psi = make_bell_state(sign, a, b).amplitudes();
  return ModeOperator({qubit_mode(a), photon_mode(b)}, psi * psi.adjoint(), OperatorKind::observable);
}

class DensityMatrix {
 public:
  DensityMatrix(Modes modes, Matrix entries) : modes_(std::move(modes)), entries_(std::move(entries)) {
    detail::require_distinct(modes_);
    const auto d = static_cast<Eigen::Index>(detail::total_dimension(modes_));
    if (entries_.rows() != d || entries_.cols() != d) {
      throw Error(ErrorKind::dimension_mismatch, "density matrix does not match mode dimensions");
    }
    if (!ModeOperator::is_hermitian(entries_)) {
      throw Error(ErrorKind::not_observable, "density matrix is not Hermitian");
    }
    if (std::abs(entries_.trace() - cplx{1.0, 0.0}) > algebra_tol) {
      throw Error(ErrorKind::not_normalized, "density matrix trace differs from 1");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -probability_tol) {
      throw Error(ErrorKind::bad_mixture, "density matrix has a negative eigenvalue");
    }
  }

  static DensityMatrix pure(const StateVector& s) {
    return DensityMatrix(s.modes(), s.amplitudes() * s.amplitudes().adjoint());
  }

  const Modes& modes() const noexcept { return modes_; }
  const Matrix& entries() const noexcept { return entries_; }
  double trace() const { return entries_.trace().real(); }

 private:
  Modes modes_;
  Matrix entries_;
};

inline DensityMatrix density_from_mixture(const std::vector<std::pair<double, StateVector>>& terms) {
  if (terms.empty()) throw Error(ErrorKind::bad_mixture, "empty mixture");
  double total = 0.0;
  const Modes& modes = terms.front().second.modes();
  const auto d = static_cast<Eigen::Index>(terms.front().second.size());
  Matrix rho = Matrix::Zero(d, d);
  for (const auto& [w, psi] : terms) {
    if (w < 0.0) throw Error(ErrorKind::bad_mixture, "negative mixture weight");
    if (psi.modes() != modes) throw Error(ErrorKind::bad_mixture, "mixture terms differ in layout");
    total += w;
    rho += w * psi.amplitudes() * psi.amplitudes().adjoint();
  }
  if (std::abs(total - 1.0) > algebra_tol) {
    throw Error(ErrorKind::bad_mixture, "mixture weights do not sum to 1");
  }
  return DensityMatrix(modes, std::move(rho));
}

// U rho U^dagger with U acting on its targets.
inline DensityMatrix transform(const DensityMatrix& rho, const ModeOperator& op) {
  if (op.kind() != OperatorKind::unitary) {
    throw Error(ErrorKind::not_unitary, "conjugation requires a unitary operator");
  }
  const Matrix u = detail::embed_matrix(rho.modes(), op.targets(), op.matrix());
  Matrix out = u * rho.entries() * u.adjoint();
  return DensityMatrix(rho.modes(), (out + out.adjoint()) / 2.0);
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Modes modes = a.modes();
  modes.insert(modes.end(), b.modes().begin(), b.modes().end());
  detail::require_distinct(modes);
  const auto da = a.entries().rows();
  const auto db = b.entries().rows();
  Matrix out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
    }
  }
  return DensityMatrix(std::move(modes), std::move(out));
}

inline double expectation(const DensityMatrix& rho, const ModeOperator& obs) {
  if (!ModeOperator::is_hermitian(obs.matrix())) {
    throw Error(ErrorKind::not_observable, "expectation requires a Hermitian operator");
  }
  const Matrix full = detail::embed_matrix(rho.modes(), obs.targets(), obs.matrix());
  return (rho.entries() * full).trace().real();
}

inline double expectation(const StateVector& psi, const ModeOperator& obs) {
  if (!ModeOperator::is_hermitian(obs.matrix())) {
    throw Error(ErrorKind::not_observable, "expectation requires a Hermitian operator");
  }
  const Vector o = detail::apply_matrix(psi.modes(), psi.amplitudes(), obs.targets(), obs.matrix());
  return psi.amplitudes().dot(o).real();
}

// ---- measurements ---------------------------------------------------------

enum class BellResult { psi_minus = 0, psi_plus = 1, fail = 2 };

constexpr std::string_view to_string(BellResult r) noexcept {
  switch (r) {
    case BellResult::psi_minus: return "0";
    case BellResult::psi_plus: return "1";
    case BellResult::fail: return "fail";
  }
  return "?";
}

template <class Label>
struct MeasurementOutcome {
  Label label;
  double probability = 0.0;
  std::optional<StateVector> post_state;  // absent when the outcome has zero probability
};

using BasisOutcome = MeasurementOutcome<BasisLabel>;
using BellOutcome = MeasurementOutcome<BellResult>;

namespace detail {

template <class Label>
MeasurementOutcome<Label> make_outcome(Label label, const Modes& modes, Vector projected) {
  const double p = projected.squaredNorm();
  MeasurementOutcome<Label> out{label, p, std::nullopt};
  if (p > 0.0) out.post_state = StateVector::normalized(modes, std::move(projected));
  return out;
}

template <class Label>
MeasurementOutcome<Label> sample(std::vector<MeasurementOutcome<Label>> outcomes, Rng& rng) {
  std::vector<double> probs;
  probs.reserve(outcomes.size());
  for (const auto& o : outcomes) probs.push_back(o.probability);
  return std::move(outcomes[rng.pick(probs)]);
}

// Moves the slice with `mode` at level `from` to level `to`; other slices must be zero.
inline Vector relabel(const Modes& modes, const Vector& amps, std::size_t pos, std::size_t from,
                      std::size_t to) {
  const auto strides = strides_of(modes);
  Vector out = Vector::Zero(amps.size());
  for (std::size_t i = 0; i < static_cast<std::size_t>(amps.size()); ++i) {
    const std::size_t level = (i / strides[pos]) % modes[pos].dim();
    if (level != from) continue;
    const std::size_t j = i - from * strides[pos] + to * strides[pos];
    out(static_cast<Eigen::Index>(j)) = amps(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace detail

// Complete outcome set {Psi- -> m=0, Psi+ -> m=1, complement -> FAIL} on (a, b).
inline std::vector<BellOutcome> bell_outcomes(const StateVector& state, const std::string& a,
                                              const std::string& b) {
  if (state.mode(a).kind != ModeKind::qubit || state.mode(b).kind != ModeKind::photon) {
    throw Error(ErrorKind::dimension_mismatch, "Bell measurement needs a QUBIT and a PHOTON mode");
  }
  const Modes targets{qubit_mode(a), photon_mode(b)};
  const auto minus = op_bell_projector(BellSign::minus, a, b);
  const auto plus = op_bell_projector(BellSign::plus, a, b);
  const Matrix rest = Matrix::Identity(6, 6) - minus.matrix() - plus.matrix();
  const auto& modes = state.modes();
  const auto& amps = state.amplitudes();
  std::vector<BellOutcome> out;
  out.push_back(detail::make_outcome(BellResult::psi_minus, modes,
                                     detail::apply_matrix(modes, amps, targets, minus.matrix())));
  out.push_back(detail::make_outcome(BellResult::psi_plus, modes,
                                     detail::apply_matrix(modes, amps, targets, plus.matrix())));
  out.push_back(detail::make_outcome(BellResult::fail, modes,
                                     detail::apply_matrix(modes, amps, targets, rest)));
  return out;
}

inline BellOutcome bell_measure(const StateVector& state, const std::string& a, const std::string& b,
                                Rng& rng) {
  return detail::sample(bell_outcomes(state, a, b), rng);
}

// Complete computational-basis outcome set of one mode, in level order.
// A destructive detection of a photon leaves the mode in |vac>.
inline std::vector<BasisOutcome> basis_outcomes(const StateVector& state, const std::string& mode,
                                                bool destructive) {
  const auto& modes = state.modes();
  const std::size_t pos = detail::position_of(modes, mode);
  const Mode& m = modes[pos];
  const auto d = static_cast<Eigen::Index>(m.dim());
  std::vector<BasisOutcome> out;
  for (Eigen::Index level = 0; level < d; ++level) {
    Matrix proj = Matrix::Zero(d, d);
    proj(level, level) = 1.0;
    Vector projected = detail::apply_matrix(modes, state.amplitudes(), {m}, proj);
    const BasisLabel label = basis_label(m.kind, static_cast<std::size_t>(level));
    if (destructive && m.kind == ModeKind::photon && label != BasisLabel::vac) {
      projected = detail::relabel(modes, projected, pos, static_cast<std::size_t>(level), 0);
    }
    out.push_back(detail::make_outcome(label, modes, std::move(projected)));
  }
  return out;
}

inline BasisOutcome measure_photon_mode(const StateVector& state, const std::string& mode,
                                        bool destructive, Rng& rng) {
  if (state.mode(mode).kind != ModeKind::photon) {
    throw Error(ErrorKind::dimension_mismatch, "mode '" + mode + "' is not a PHOTON mode");
  }
  return detail::sample(basis_outcomes(state, mode, destructive), rng);
}

inline BasisOutcome measure_qubit(const StateVector& state, const std::string& mode, Rng& rng) {
  if (state.mode(mode).kind != ModeKind::qubit) {
    throw Error(ErrorKind::dimension_mismatch, "mode '" + mode + "' is not a QUBIT mode");
  }
  return detail::sample(basis_outcomes(state, mode, false), rng);
}

// Loads a fresh photon into an empty mode: |vac>_mode -> |label>_mode.
inline StateVector prepare_mode(const StateVector& state, const std::string& mode, BasisLabel label) {
  const auto& modes = state.modes();
  const std::size_t pos = detail::position_of(modes, mode);
  if (modes[pos].kind != ModeKind::photon) {
    throw Error(ErrorKind::dimension_mismatch, "only PHOTON modes can be refilled");
  }
  const auto vac = basis_outcomes(state, mode, false).front();
  if (std::abs(vac.probability - 1.0) > probability_tol) {
    throw Error(ErrorKind::bad_param, "mode '" + mode + "' is not empty");
  }
  return StateVector::normalized(
      modes, detail::relabel(modes, state.amplitudes(), pos, 0, basis_index(ModeKind::photon, label)));
}

}  // namespace qdkd
