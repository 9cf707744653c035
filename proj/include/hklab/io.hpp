#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "hklab/colength.hpp"
#include "hklab/curve_cohomology.hpp"
#include "hklab/gm_diagonal.hpp"
#include "hklab/hk_formulas.hpp"

// JSON and CSV forms of the result types. Rationals are always "num/den"
// strings in JSON; CSV carries the exact string next to a float column.

namespace hklab {

using Json = nlohmann::ordered_json;

inline Json to_json(const ColengthRecord& r) {
  return Json{{"p", r.p}, {"n", r.n}, {"q", r.q}, {"dims", r.dims}, {"total", r.total}, {"normalized", to_string(r.normalized)}};
}

inline ColengthRecord colength_record_from_json(const Json& j) {
  ColengthRecord r;
  r.p = j.at("p").get<std::uint64_t>();
  r.n = j.at("n").get<int>();
  r.q = j.at("q").get<std::int64_t>();
  r.dims = j.at("dims").get<std::vector<std::int64_t>>();
  r.total = j.at("total").get<std::int64_t>();
  r.normalized = parse_rational(j.at("normalized").get<std::string>());
  std::int64_t sum = 0;
  for (auto d : r.dims) sum += d;
  if (sum != r.total || r.dims.empty() || r.dims.back() != 0) throw MathError("inconsistent colength record");
  return r;
}

/// Per-degree rows: family,p,n,q,m,dim
inline void write_colength_csv_header(std::ostream& os) { os << "family,p,n,q,m,dim\n"; }
inline void write_colength_csv(std::ostream& os, const std::string& family, const ColengthRecord& r) {
  for (std::size_t m = 0; m < r.dims.size(); ++m)
    os << family << ',' << r.p << ',' << r.n << ',' << r.q << ',' << m << ',' << r.dims[m] << '\n';
}

inline Json to_json(const CohomologyProfile& prof) {
  Json rows = Json::array();
  for (const auto& r : prof.records) rows.push_back(Json{{"m", r.m}, {"h0", r.h0}, {"chi", r.chi}, {"h1", r.h1}});
  return Json{{"p", prof.p}, {"q", prof.q}, {"records", rows}};
}

/// Rows: q,m,h0,chi,h1
inline void write_profile_csv(std::ostream& os, const CohomologyProfile& prof) {
  os << "q,m,h0,chi,h1\n";
  for (const auto& r : prof.records) os << prof.q << ',' << r.m << ',' << r.h0 << ',' << r.chi << ',' << r.h1 << '\n';
}

inline Json to_json(const HNProfile& hn) {
  Json nu = Json::array(), r = Json::array(), plateaus = Json::array();
  for (const auto& s : hn.steps) {
    nu.push_back(to_string(s.nu));
    r.push_back(s.rank);
  }
  for (const auto& pl : hn.plateaus)
    plateaus.push_back(Json{{"first_m", pl.first_m}, {"last_m", pl.last_m}, {"cumulative_rank", pl.cumulative_rank},
                            {"intercept", to_string(pl.intercept)}});
  Json j{{"nu", nu}, {"r", r}, {"residual", hn.residual}, {"breakpoint_uncertainty", to_string(hn.breakpoint_uncertainty)},
         {"plateaus", plateaus}};
  j["first_nonzero_m"] = hn.first_nonzero_m ? Json(*hn.first_nonzero_m) : Json(nullptr);
  return j;
}

inline Json to_json(const VanishingReport& v) {
  return Json{{"lower_bound", v.lower_bound},       {"upper_bound", v.upper_bound},
              {"h0_violations", v.h0_violations},   {"h1_violations", v.h1_violations},
              {"tail_start", v.tail_start},         {"tail_h1_sum", v.tail_h1_sum},
              {"tail_ratio", to_string(v.tail_ratio)}, {"covers_upper_window", v.covers_upper_window}};
}

inline Json to_json(const GValue& g) {
  Json terms = Json::object();
  for (const auto& [lambda, v] : g.lambda_terms) terms[std::to_string(lambda)] = to_string(v);
  return Json{{"prefactor", to_string(g.prefactor)}, {"lambda_terms", terms}, {"total", to_string(g.total)}};
}

inline Json to_json(const DiagonalLimits& lim) {
  return Json{{"e_hk_infinity", to_string(lim.e_hk_infinity)},
              {"e_naive", to_string(lim.e_naive)},
              {"unnormalized_g", to_string(lim.bare_g)},
              {"g", to_json(lim.g)}};
}

inline Json to_json(const SandwichReport& s) {
  return Json{{"p", s.record.p},
              {"n", s.record.n},
              {"lower", to_string(s.lower)},
              {"middle", to_string(s.middle)},
              {"upper", to_string(s.upper)},
              {"width", to_string(s.width)},
              {"width_times_p", to_string(s.width_p)},
              {"holds", s.lower <= s.middle && s.middle <= s.upper}};
}

inline Json to_json(const FitReport& f) {
  return Json{{"e_hat", f.e_hat},
              {"c_hat", f.c_hat},
              {"c2_hat", f.c2_hat},
              {"max_resid_p", f.max_resid_p},
              {"max_resid_p2", f.max_resid_p2},
              {"max_fit_error", f.max_fit_error}};
}

inline Json to_json(const ConvergenceRow& r) {
  return Json{{"p", r.p},
              {"n", r.n},
              {"q", r.q},
              {"normalized", to_string(r.normalized)},
              {"reference", to_string(r.reference)},
              {"residual", to_string(r.residual)},
              {"residual_p", to_string(r.residual_p)}};
}

/// Rows: p,n,q,normalized,reference,residual,residual_p plus float columns.
inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "p,n,q,normalized,reference,residual,residual_p,normalized_f,reference_f,residual_f,residual_p_f\n";
  for (const auto& r : rows) {
    os << r.p << ',' << r.n << ',' << r.q << ',' << to_string(r.normalized) << ',' << to_string(r.reference) << ','
       << to_string(r.residual) << ',' << to_string(r.residual_p) << ',' << to_double(r.normalized) << ','
       << to_double(r.reference) << ',' << to_double(r.residual) << ',' << to_double(r.residual_p) << '\n';
  }
}

}  // namespace hklab
