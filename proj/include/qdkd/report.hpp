#pragma once

// File formats. Every report is first flattened to an ordered list of named
// scalars; JSON objects and CSV rows are both rendered from that list, so the
// two formats always carry the same numbers (15 significant digits, '.'
// decimal separator, independent of locale).

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qdkd/analysis.hpp"

namespace qdkd::report {

using Scalar = std::variant<std::monostate, double, std::uint64_t, bool, std::string>;
using Field = std::pair<std::string, Scalar>;
using Fields = std::vector<Field>;

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

// The double nearest to the 15-digit rendering, so JSON and CSV agree.
inline double rounded(double v) {
  const std::string s = format_number(v);
  double out = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), out);
  return out;
}

inline Scalar opt(const std::optional<double>& v) {
  return v ? Scalar(*v) : Scalar(std::monostate{});
}

inline Scalar opt_bit(const std::optional<int>& v) {
  return v ? Scalar(static_cast<std::uint64_t>(*v)) : Scalar(std::monostate{});
}

inline nlohmann::ordered_json to_json(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          return rounded(v);
        } else {
          return v;
        }
      },
      s);
}

inline nlohmann::ordered_json to_json(const Fields& fields) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : fields) obj[k] = to_json(v);
  return obj;
}

inline std::string to_cell(const Scalar& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_number(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::uint64_t>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      s);
}

inline void write_csv_header(std::ostream& os, const Fields& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i].first;
  os << '\n';
}

inline void write_csv_row(std::ostream& os, const Fields& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << to_cell(fields[i].second);
  os << '\n';
}

inline Fields prefixed(const std::string& prefix, Fields fields) {
  for (auto& f : fields) f.first = prefix + f.first;
  return fields;
}

inline void append(Fields& into, const Fields& more) { into.insert(into.end(), more.begin(), more.end()); }

// ---- flatteners ----------------------------------------------------------

inline Fields fields(const AttackDescriptor& a) {
  return {{"name", a.name}, {"p", opt(a.p)}, {"epsilon", opt(a.epsilon)}};
}

inline Fields fields(const AnalyticReport& r) {
  return {{"attack", r.attack.name},
          {"p", r.p},
          {"epsilon", r.epsilon},
          {"x", r.x},
          {"q_total", r.q_total},
          {"p_corr", r.p_corr},
          {"i_ab", r.i_ab},
          {"i_eve", r.i_eve},
          {"i_eve_other_key", r.i_eve_other_key},
          {"security_lhs", r.security_lhs},
          {"security_holds", r.security_holds},
          {"advantage", r.advantage}};
}

inline Fields fields(const Statistics& s) {
  return {{"n_rounds", s.n_rounds},
          {"n_mm", s.n_mm},
          {"n_mm_valid", s.n_mm_valid},
          {"n_cm", s.n_cm},
          {"n_eavesdrop_mm_valid", s.n_eavesdrop_mm_valid},
          {"q_a_hat", opt(s.q_a_hat)},
          {"q_b_hat", opt(s.q_b_hat)},
          {"p_corr_hat", opt(s.p_corr_hat)},
          {"p_obs_hat", opt(s.p_obs_hat)},
          {"i_aj_eve_hat", opt(s.i_aj_eve_hat)},
          {"i_bk_eve_hat", opt(s.i_bk_eve_hat)},
          {"i_ab_hat", opt(s.i_ab_hat)},
          {"q_a_eavesdrop_hat", opt(s.q_a_eavesdrop_hat)},
          {"q_b_eavesdrop_hat", opt(s.q_b_eavesdrop_hat)},
          {"security_lhs_hat", opt(s.security_lhs_hat)}};
}

inline Fields fields(const LossReport& l) {
  return {{"P", l.P},
          {"P_prime", opt(l.P_prime)},
          {"attack", std::string(to_string(l.attack))},
          {"p", l.p},
          {"p_obs_formula", l.p_obs_formula},
          {"p_max", opt(l.p_max)},
          {"filter_fraction", opt(l.filter_fraction)}};
}

inline std::string symbol_cell(EveSymbol s) { return std::string(to_string(s)); }

// Per-round columns. Absent values are empty cells; m is 0, 1 or "fail";
// Eve's symbols are 0, 1 or "none".
inline Fields fields(const RoundOutcome& r) {
  auto flag = [](const std::optional<bool>& b) {
    return b ? Scalar(static_cast<std::uint64_t>(*b ? 1 : 0)) : Scalar(std::monostate{});
  };
  return {{"index", r.index},
          {"mode", std::string(to_string(r.bob_mode))},
          {"j", static_cast<std::uint64_t>(r.j)},
          {"k", opt_bit(r.k)},
          {"m", r.m ? Scalar(std::string(to_string(*r.m))) : Scalar(std::monostate{})},
          {"kA", opt_bit(r.k_view_a)},
          {"jB", opt_bit(r.j_view_b)},
          {"eve_j", symbol_cell(r.eve_symbol_j)},
          {"eve_k", symbol_cell(r.eve_symbol_k)},
          {"cm_detected", flag(r.bob_cm_detected)},
          {"cm_correlated", flag(r.correlated)},
          {"eve_branch", std::string(to_string(r.eve_branch))}};
}

inline void write_rounds_csv(std::ostream& os, const TrialLog& log) {
  write_csv_header(os, fields(RoundOutcome{}));
  for (const auto& r : log.outcomes) write_csv_row(os, fields(r));
}

inline nlohmann::ordered_json rounds_json(const TrialLog& log) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : log.outcomes) arr.push_back(to_json(fields(r)));
  return arr;
}

}  // namespace qdkd::report
