#pragma once

// Command-line front end: run, sweep, counterexample, verify.
//
// Exit statuses: 0 success, 1 I/O failure, 2 usage error, 3 verification failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdkd/analysis.hpp"
#include "qdkd/report.hpp"

namespace qdkd::cli {

enum ExitStatus : int { ok = 0, io_failure = 1, usage = 2, verification_failed = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  std::string attack = "none";  // none | swap | tuning | alice | bob
  double p = 0.5;
  double epsilon = 0.5;
  std::uint64_t rounds = 10000;
  double cm_probability = 0.5;
  double channel_transmission = 1.0;
  std::optional<double> channel_prime;
  std::uint64_t seed = 1;
  std::string output_format = "json";  // csv | json
  std::string output_path;             // empty = stdout
  bool emit_rounds = false;
};

inline report::Fields fields(const RunSpec& s) {
  return {{"attack", s.attack},
          {"p", s.p},
          {"epsilon", s.epsilon},
          {"rounds", s.rounds},
          {"cm_probability", s.cm_probability},
          {"channel_transmission", s.channel_transmission},
          {"channel_prime", report::opt(s.channel_prime)},
          {"seed", s.seed},
          {"output_format", s.output_format},
          {"emit_rounds", s.emit_rounds}};
}

inline bool uses_attack_params(const std::string& attack) { return attack == "alice" || attack == "bob"; }

inline void validate(const RunSpec& s) {
  if (s.attack != "none" && s.attack != "swap" && s.attack != "tuning" && s.attack != "alice" &&
      s.attack != "bob") {
    throw UsageError("attack: expected one of none, swap, tuning, alice, bob");
  }
  if (uses_attack_params(s.attack) && !(s.p >= 0.0 && s.p < 1.0)) throw UsageError("p: must lie in [0, 1)");
  if ((uses_attack_params(s.attack) || s.attack == "tuning") && !(s.epsilon > 0.0 && s.epsilon <= 1.0)) {
    throw UsageError("epsilon: must lie in (0, 1]");
  }
  if (!(s.cm_probability >= 0.0 && s.cm_probability <= 1.0)) {
    throw UsageError("cm_probability: must lie in [0, 1]");
  }
  if (!(s.channel_transmission > 0.0 && s.channel_transmission <= 1.0)) {
    throw UsageError("channel_transmission: must lie in (0, 1]");
  }
  if (s.channel_prime && !(*s.channel_prime > s.channel_transmission && *s.channel_prime <= 1.0)) {
    throw UsageError("channel_prime: must satisfy channel_transmission < channel_prime <= 1");
  }
  if (s.output_format != "csv" && s.output_format != "json") {
    throw UsageError("output_format: expected csv or json");
  }
}

inline AttackStrategy make_strategy(const RunSpec& s) {
  if (s.attack == "swap") return swap_vacuum();
  if (s.attack == "tuning") return error_tuning(s.epsilon);
  if (s.attack == "alice") return alice_key_attack({s.p, s.epsilon});
  if (s.attack == "bob") return bob_key_attack({s.p, s.epsilon});
  return honest();
}

inline ProtocolConfig make_config(const RunSpec& s) {
  return {s.cm_probability, s.channel_transmission, s.rounds, s.seed};
}

inline unsigned thread_count() {
  if (const char* env = std::getenv("QDKD_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Writes to the --out file, or to `fallback` when no path is set.
inline int emit(const std::string& path, std::ostream& fallback, std::ostream& err,
                const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    fallback.flush();
    return ok;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    err << "error: cannot open '" << path << "' for writing\n";
    return io_failure;
  }
  write(file);
  file.flush();
  if (!file) {
    err << "error: failed writing '" << path << "'\n";
    return io_failure;
  }
  return ok;
}

// ---- counterexample --------------------------------------------------------

struct Counterexample {
  double p_corr_true = 0.0;
  double p_corr_claimed = 0.0;
  double gap() const { return std::abs(p_corr_claimed - p_corr_true); }
};

inline Counterexample counterexample(const std::string& scheme) {
  const auto vac = make_basis_state({photon_mode(mode_e)}, {BasisLabel::vac});
  const ModeOperator op = scheme == "swap" ? op_swap(mode_b, mode_e) : identity_be();
  return {p_corr_true(op, vac), p_corr_claimed(op, op, vac)};
}

inline std::string counterexample_line(const Counterexample& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "true=%.6f claimed=%.6f gap=%.6f", c.p_corr_true, c.p_corr_claimed,
                c.gap());
  return buf;
}

inline report::Fields fields(const Counterexample& c) {
  return {{"p_corr_true", c.p_corr_true}, {"p_corr_claimed", c.p_corr_claimed}, {"gap", c.gap()}};
}

inline int cmd_counterexample(const std::string& scheme, std::ostream& out) {
  if (scheme != "swap" && scheme != "honest") throw UsageError("scheme: expected swap or honest");
  const Counterexample c = counterexample(scheme);
  out << counterexample_line(c) << '\n';
  if (scheme == "swap") {
    out << "honest " << counterexample_line(counterexample("honest")) << '\n';
    return std::abs(c.gap() - 0.5) < algebra_tol ? ok : verification_failed;
  }
  return c.gap() < algebra_tol ? ok : verification_failed;
}

// ---- run ---------------------------------------------------------------

struct RunResult {
  TrialLog log;
  Statistics statistics;
  report::Fields analytic;  // empty when the attack has no closed form
  std::optional<LossReport> loss;
};

inline std::optional<AttackTarget> target_of(const std::string& attack) {
  if (attack == "tuning") return AttackTarget::tuning;
  if (attack == "alice") return AttackTarget::alice;
  if (attack == "bob") return AttackTarget::bob;
  return std::nullopt;
}

inline RunResult execute(const RunSpec& spec, unsigned threads) {
  RunResult r{run_experiment(make_config(spec), make_strategy(spec), threads), {}, {}, std::nullopt};
  if (spec.rounds > 0) r.statistics = empirical_statistics(r.log);
  if (const auto target = target_of(spec.attack)) {
    r.analytic = report::fields(analytic_report(*target, {spec.p, spec.epsilon}));
    if (*target != AttackTarget::tuning) {
      r.loss = loss_report(spec.channel_transmission, spec.channel_prime, *target, spec.p);
    }
  } else if (spec.attack == "swap") {
    r.analytic = fields(counterexample("swap"));
  }
  return r;
}

inline void write_run(std::ostream& os, const RunSpec& spec, const RunResult& r) {
  if (spec.output_format == "csv") {
    if (spec.emit_rounds) {
      report::write_rounds_csv(os, r.log);
      return;
    }
    report::Fields row = report::prefixed("spec_", fields(spec));
    report::append(row, report::prefixed("analytic_", r.analytic));
    report::append(row, report::fields(r.statistics));
    if (r.loss) report::append(row, report::prefixed("loss_", report::fields(*r.loss)));
    report::write_csv_header(os, row);
    report::write_csv_row(os, row);
    return;
  }
  nlohmann::ordered_json doc;
  doc["spec"] = report::to_json(fields(spec));
  doc["analytic"] = r.analytic.empty() ? nlohmann::ordered_json(nullptr) : report::to_json(r.analytic);
  doc["statistics"] = report::to_json(report::fields(r.statistics));
  doc["loss"] = r.loss ? report::to_json(report::fields(*r.loss)) : nlohmann::ordered_json(nullptr);
  if (spec.emit_rounds) doc["rounds"] = report::rounds_json(r.log);
  os << doc.dump(2) << '\n';
}

inline int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err, unsigned threads = 1) {
  validate(spec);
  if ((spec.attack == "tuning" || uses_attack_params(spec.attack))) {
    if (auto notice = epsilon_notice(spec.epsilon)) err << "note: " << *notice << '\n';
  }
  const RunResult r = execute(spec, threads);
  return emit(spec.output_path, out, err, [&](std::ostream& os) { write_run(os, spec, r); });
}

// ---- sweep ---------------------------------------------------------------

struct Range {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;
};

inline Range parse_range(const std::string& text, const std::string& field) {
  Range r;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  if (!(is >> r.start)) throw UsageError(field + ": expected start[:stop[:step]]");
  r.stop = r.start;
  if (is >> c1) {
    if (c1 != ':' || !(is >> r.stop)) throw UsageError(field + ": expected start:stop:step");
    if (is >> c2) {
      if (c2 != ':' || !(is >> r.step)) throw UsageError(field + ": expected start:stop:step");
    }
  }
  if (!(r.step > 0.0) || r.stop < r.start) throw UsageError(field + ": empty or malformed range");
  return r;
}

// Grid points start + i*step up to stop, snapped to 12 decimals.
inline std::vector<double> grid(const Range& r) {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double v = std::round((r.start + static_cast<double>(i) * r.step) * 1e12) / 1e12;
    if (v > r.stop + 1e-9) break;
    out.push_back(v);
  }
  return out;
}

struct SweepSpec {
  RunSpec base;
  Range p{0.1, 0.9, 0.1};
  Range epsilon{0.05, 1.0, 0.05};
  std::uint64_t mc_rounds = 0;
};

inline std::vector<report::Fields> sweep_rows(const SweepSpec& s, unsigned threads) {
  const auto target = target_of(s.base.attack);
  if (!target || *target == AttackTarget::tuning) throw UsageError("attack: sweep needs alice or bob");
  const auto ps = grid(s.p);
  const auto es = grid(s.epsilon);
  for (double p : ps) {
    if (!(p >= 0.0 && p < 1.0)) throw UsageError("p: grid values must lie in [0, 1)");
  }
  for (double e : es) {
    if (!(e > 0.0 && e <= 1.0)) throw UsageError("epsilon: grid values must lie in (0, 1]");
  }
  std::vector<report::Fields> rows;
  for (double p : ps) {
    for (double e : es) {
      report::Fields row = report::fields(analytic_report(*target, {p, e}));
      if (s.mc_rounds > 0) {
        RunSpec point = s.base;
        point.p = p;
        point.epsilon = e;
        point.rounds = s.mc_rounds;
        const auto st = empirical_statistics(run_experiment(make_config(point), make_strategy(point), threads));
        report::append(row, {{"mc_rounds", s.mc_rounds},
                             {"q_a_hat", report::opt(st.q_a_hat)},
                             {"q_b_hat", report::opt(st.q_b_hat)},
                             {"p_corr_hat", report::opt(st.p_corr_hat)},
                             {"p_obs_hat", report::opt(st.p_obs_hat)},
                             {"i_eve_hat", report::opt(*target == AttackTarget::alice ? st.i_aj_eve_hat
                                                                                       : st.i_bk_eve_hat)}});
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

inline int cmd_sweep(const SweepSpec& s, std::ostream& out, std::ostream& err, unsigned threads = 1) {
  validate(s.base);
  const auto rows = sweep_rows(s, threads);
  return emit(s.base.output_path, out, err, [&](std::ostream& os) {
    if (s.base.output_format == "csv") {
      report::write_csv_header(os, rows.front());
      for (const auto& row : rows) report::write_csv_row(os, row);
      return;
    }
    nlohmann::ordered_json doc;
    doc["spec"] = report::to_json(fields(s.base));
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) doc["rows"].push_back(report::to_json(row));
    os << doc.dump(2) << '\n';
  });
}

// ---- verify --------------------------------------------------------------

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifySpec {
  std::uint64_t rounds = 100000;
  std::uint64_t seed = 42;
  double perturb_v = 0.0;
};

inline std::string num(double v) { return report::format_number(v); }

inline std::vector<Check> verify_checks(const VerifySpec& v, unsigned threads) {
  std::vector<Check> checks;
  const Mode b = photon_mode(mode_b);
  const Modes be{photon_mode(mode_b), photon_mode(mode_e)};

  Matrix vm = v_matrix();
  vm(0, 0) += v.perturb_v;
  {
    double worst = 0.0;
    for (const Matrix& m : {op_z_pow(1, b).matrix(), op_x_pow(1, b).matrix(), op_swap(mode_b, mode_e).matrix(), vm}) {
      worst = std::max(worst, ModeOperator::unitarity_defect(m));
    }
    checks.push_back({"unitarity(Z,X,SWAP,V)", worst < algebra_tol, "max defect " + num(worst)});
  }
  {
    const double r = 1.0 / std::sqrt(2.0);
    double worst = 0.0;
    for (int s = 0; s < 2; ++s) {
      const auto in = make_basis_state(be, {BasisLabel::vac, bit_label(s)});
      const Vector got = detail::apply_matrix(be, in.amplitudes(), be, vm);
      Vector want = Vector::Zero(9);
      want(3) = cplx{0.0, -r};
      want(2) = cplx{0.0, -r} * (s == 0 ? 1.0 : -1.0);
      worst = std::max(worst, (got - want).cwiseAbs().maxCoeff());
    }
    checks.push_back({"V action on |vac,s>", worst < algebra_tol, "max error " + num(worst)});
  }
  {
    bool good = true;
    double worst = 0.0;
    for (int k = 0; k < 2; ++k) {
      for (int t = 0; t < 2; ++t) {
        const auto xv = compose(op_x_pow(t, b), op_v(mode_b, mode_e));
        auto s = make_basis_state(be, {BasisLabel::vac, BasisLabel::zero});
        s = apply(apply(apply(s, xv), op_z_pow(k, b)), dagger(xv));
        const auto want = make_basis_state(be, {BasisLabel::vac, bit_label(k * t)});
        const double phase = k * t == 1 ? -1.0 : 1.0;
        worst = std::max(worst, (s.amplitudes() - phase * want.amplitudes()).cwiseAbs().maxCoeff());
        const auto outs = basis_outcomes(s, mode_e, true);
        good = good && std::abs(outs[basis_index(ModeKind::photon, bit_label(k * t))].probability - 1.0) < algebra_tol;
      }
    }
    checks.push_back({"undo X^t V restores (-1)^kt |vac,kt>", good && worst < algebra_tol, "max error " + num(worst)});
  }
  {
    double worst = 0.0;
    for (int t = 0; t < 2; ++t) {
      const auto s = tensor(make_basis_state({qubit_mode(mode_a)}, {bit_label(1 - t)}),
                            make_basis_state({b}, {bit_label(t)}));
      const auto outs = bell_outcomes(s, mode_a, mode_b);
      worst = std::max({worst, std::abs(outs[0].probability - 0.5), std::abs(outs[1].probability - 0.5),
                        outs[2].probability});
    }
    checks.push_back({"resent photon gives m uniform", worst < algebra_tol, "max error " + num(worst)});
  }
  {
    const auto swap = counterexample("swap");
    const auto hon = counterexample("honest");
    const bool pass = std::abs(swap.p_corr_true) < algebra_tol && std::abs(swap.p_corr_claimed - 0.5) < algebra_tol &&
                      std::abs(hon.p_corr_true) < algebra_tol && std::abs(hon.p_corr_claimed) < algebra_tol;
    checks.push_back({"P_corr counterexample", pass, counterexample_line(swap)});
  }
  {
    const auto st = empirical_statistics(run_experiment({0.5, 1.0, 10000, v.seed}, honest(), threads));
    const bool pass = st.q_a_hat == 0.0 && st.q_b_hat == 0.0 && st.p_corr_hat == 0.0 && st.p_obs_hat == 1.0;
    checks.push_back({"honest baseline", pass, "q_a=" + num(*st.q_a_hat) + " p_obs=" + num(*st.p_obs_hat)});
  }
  const AttackParams params{0.5, 0.5};
  {
    const auto st = empirical_statistics(run_experiment({0.5, 1.0, v.rounds, v.seed}, alice_key_attack(params), threads));
    const auto an = analytic_report(AttackTarget::alice, params);
    const double band = three_sigma(an.q_total, st.n_mm_valid);
    const bool pass = std::abs(*st.q_a_hat - an.q_total) <= band && std::abs(*st.q_b_hat - an.q_total) <= band &&
                      std::abs(*st.i_aj_eve_hat - an.i_eve) <= 0.02 && *st.p_corr_hat == 0.0;
    checks.push_back({"alice attack MC vs analytic", pass,
                      "q_a=" + num(*st.q_a_hat) + " Q=" + num(an.q_total) + " I_AE=" + num(*st.i_aj_eve_hat)});
  }
  {
    const auto st = empirical_statistics(run_experiment({0.5, 1.0, v.rounds, v.seed}, bob_key_attack(params), threads));
    const auto an = analytic_report(AttackTarget::bob, params);
    const double band = three_sigma(an.q_total, st.n_mm_valid);
    const double p_obs = loss_report(1.0, std::nullopt, AttackTarget::bob, params.p).p_obs_formula;
    const bool pass = std::abs(*st.q_a_hat - an.q_total) <= band && std::abs(*st.i_bk_eve_hat - an.i_eve) <= 0.02 &&
                      std::abs(*st.q_a_eavesdrop_hat - 0.5) <= three_sigma(0.5, st.n_eavesdrop_mm_valid) &&
                      std::abs(*st.p_obs_hat - p_obs) <= three_sigma(p_obs, st.n_cm) && *st.p_corr_hat == 0.0;
    checks.push_back({"bob attack MC vs analytic", pass,
                      "q_a=" + num(*st.q_a_hat) + " I_BE=" + num(*st.i_bk_eve_hat) + " p_obs=" + num(*st.p_obs_hat)});
  }
  {
    bool pass = true;
    for (auto target : {AttackTarget::alice, AttackTarget::bob}) {
      for (int pi = 1; pi <= 9; ++pi) {
        bool found = false;
        for (int ei = 1; ei <= 20; ++ei) {
          const auto r = analytic_report(target, {pi / 10.0, ei * 0.05});
          pass = pass && r.security_holds;
          found = found || (r.security_holds && r.advantage);
        }
        pass = pass && found;
      }
    }
    checks.push_back({"security holds with Eve advantage", pass, "p in 0.1..0.9, epsilon in 0.05..1"});
  }
  {
    double worst = 0.0;
    for (double p : {0.1, 0.5, 0.9}) {
      worst = std::max(worst, std::abs(analytic_report(AttackTarget::alice, {p, 1.0 - 1e-9}).i_ab - i_ab_range_sup(p)));
    }
    checks.push_back({"I_AB supremum 1-H(p/2)", worst < 1e-6, "max error " + num(worst)});
  }
  {
    const auto a = run_experiment({0.5, 0.8, 2000, v.seed}, bob_key_attack(params), 1);
    const auto c = run_experiment({0.5, 0.8, 2000, v.seed}, bob_key_attack(params), std::max(2u, threads));
    checks.push_back({"determinism", a.outcomes == c.outcomes, "sequential vs parallel logs"});
  }
  return checks;
}

inline int cmd_verify(const VerifySpec& v, std::ostream& out, unsigned threads = 1) {
  const auto checks = verify_checks(v, threads);
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  (" << c.detail << ")\n";
    failed += !c.passed;
  }
  if (failed) {
    out << failed << " check(s) failed\n";
    return verification_failed;
  }
  out << "all " << checks.size() << " checks passed\n";
  return ok;
}

// ---- argument parsing ----------------------------------------------------

namespace detail {

struct RunOptions {
  CLI::Option* attack = nullptr;
  CLI::Option* p = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* rounds = nullptr;
  CLI::Option* cm_prob = nullptr;
  CLI::Option* loss = nullptr;
  CLI::Option* loss_prime = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* emit_rounds = nullptr;
  std::string config_path;
};

inline RunOptions add_run_options(CLI::App& app, RunSpec& s) {
  RunOptions o;
  o.attack = app.add_option("--attack", s.attack, "none | swap | tuning | alice | bob");
  o.p = app.add_option("--p", s.p, "eavesdropping-mode probability");
  o.epsilon = app.add_option("--epsilon", s.epsilon, "error-tuning bias");
  o.rounds = app.add_option("--rounds", s.rounds, "number of protocol rounds");
  o.cm_prob = app.add_option("--cm-prob", s.cm_probability, "probability Bob picks control mode");
  o.loss = app.add_option("--loss", s.channel_transmission, "channel transmission probability P");
  o.loss_prime = app.add_option("--loss-prime", s.channel_prime, "Eve's substitute channel P'");
  o.seed = app.add_option("--seed", s.seed, "master seed");
  o.format = app.add_option("--format", s.output_format, "csv | json");
  o.out = app.add_option("--out", s.output_path, "output path (default stdout)");
  o.emit_rounds = app.add_flag("--emit-rounds", s.emit_rounds, "include the per-round log");
  app.add_option("--config", o.config_path, "JSON file with RunSpec fields; flags take precedence");
  return o;
}

// Fields from the config file apply only where no flag was given.
inline void merge_config(const RunOptions& o, RunSpec& s) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw UsageError("config: cannot read '" + o.config_path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  auto take = [&](const char* key, CLI::Option* opt, auto& target) {
    if (!j.contains(key) || opt->count() > 0) return;
    try {
      j.at(key).get_to(target);
    } catch (const nlohmann::json::exception&) {
      throw UsageError(std::string(key) + ": wrong type in config file");
    }
  };
  take("attack", o.attack, s.attack);
  take("p", o.p, s.p);
  take("epsilon", o.epsilon, s.epsilon);
  take("rounds", o.rounds, s.rounds);
  take("cm_probability", o.cm_prob, s.cm_probability);
  take("channel_transmission", o.loss, s.channel_transmission);
  if (j.contains("channel_prime") && o.loss_prime->count() == 0 && !j["channel_prime"].is_null()) {
    double v = 0.0;
    take("channel_prime", o.loss_prime, v);
    s.channel_prime = v;
  }
  take("seed", o.seed, s.seed);
  take("output_format", o.format, s.output_format);
  take("output_path", o.out, s.output_path);
  take("emit_rounds", o.emit_rounds, s.emit_rounds);
}

inline void warn_inapplicable(const RunOptions& o, const RunSpec& s, std::ostream& err) {
  if (!uses_attack_params(s.attack) && o.p->count() > 0) {
    err << "warning: --p is ignored for attack '" << s.attack << "'\n";
  }
  if (!uses_attack_params(s.attack) && s.attack != "tuning" && o.epsilon->count() > 0) {
    err << "warning: --epsilon is ignored for attack '" << s.attack << "'\n";
  }
  if (!uses_attack_params(s.attack) && o.loss_prime->count() > 0) {
    err << "warning: --loss-prime is ignored for attack '" << s.attack << "'\n";
  }
}

}  // namespace detail

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Quantum dense key distribution: protocol and attack simulator"};
  app.require_subcommand(1);

  RunSpec run_spec;
  auto* run = app.add_subcommand("run", "simulate the protocol under one attack");
  auto run_opts = detail::add_run_options(*run, run_spec);

  SweepSpec sweep_spec;
  std::string p_range = "0.1:0.9:0.1";
  std::string eps_range = "0.05:1.0:0.05";
  auto* sweep = app.add_subcommand("sweep", "analytic (and optional Monte-Carlo) grid over p and epsilon");
  auto sweep_opts = detail::add_run_options(*sweep, sweep_spec.base);
  sweep->add_option("--p-range", p_range, "start:stop:step");
  sweep->add_option("--eps-range", eps_range, "start:stop:step");
  sweep->add_option("--mc-rounds", sweep_spec.mc_rounds, "Monte-Carlo rounds per grid point (0 = analytic only)");

  std::string scheme = "swap";
  auto* cex = app.add_subcommand("counterexample", "closed-form vs true parity statistics");
  cex->add_option("--scheme", scheme, "swap | honest");

  VerifySpec verify_spec;
  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--rounds", verify_spec.rounds, "Monte-Carlo rounds per attack check");
  verify->add_option("--seed", verify_spec.seed, "master seed");
  verify->add_option("--perturb-v", verify_spec.perturb_v, "add a fault to V (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return ok;
    }
    err << "error: " << e.what() << '\n';
    return usage;
  }

  const unsigned threads = thread_count();
  try {
    if (run->parsed()) {
      detail::merge_config(run_opts, run_spec);
      detail::warn_inapplicable(run_opts, run_spec, err);
      return cmd_run(run_spec, out, err, threads);
    }
    if (sweep->parsed()) {
      detail::merge_config(sweep_opts, sweep_spec.base);
      sweep_spec.p = parse_range(p_range, "p-range");
      sweep_spec.epsilon = parse_range(eps_range, "eps-range");
      if (sweep_spec.base.attack == "none") sweep_spec.base.attack = "alice";
      return cmd_sweep(sweep_spec, out, err, threads);
    }
    if (cex->parsed()) return cmd_counterexample(scheme, out);
    if (verify->parsed()) return cmd_verify(verify_spec, out, threads);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}

}  // namespace qdkd::cli
