#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "degiorgi/constants.hpp"

namespace degiorgi {

using Json = nlohmann::ordered_json;

inline Json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;  // +-inf / nan have no JSON representation
}

struct ReportInputs {
  std::string field_id;
  std::string coef_id;
  double h = 0;
  int n = 0;
  double lambda = 0;
  double Lambda = 0;

  Json to_json() const {
    return Json{{"field_id", field_id}, {"coef_id", coef_id}, {"h", h},
                {"n", n},               {"lambda", lambda},   {"Lambda", Lambda}};
  }
};

/// One verified inequality: lhs <= rhs * slack, with provenance.
struct LemmaReport {
  std::string lemma_id;
  ReportInputs inputs;
  double lhs = 0;
  double rhs = 0;
  std::string constant_name;
  double constant_value = 0;
  double slack = 1;  // multiplicative slack applied to rhs
  double margin = std::numeric_limits<double>::infinity();  // rhs / lhs
  bool pass = false;
  bool skipped = false;
  std::string note;
  Json extra;  // sub-checks and diagnostics

  /// Fill margin/pass from lhs, rhs, slack.
  void settle() {
    margin = lhs > 0 ? rhs / lhs : std::numeric_limits<double>::infinity();
    pass = lhs <= rhs * slack;
  }

  Json to_json() const {
    Json j{{"lemma_id", lemma_id},
           {"inputs", inputs.to_json()},
           {"lhs", json_number(lhs)},
           {"rhs", json_number(rhs)},
           {"constant_name", constant_name},
           {"constant_value", json_number(constant_value)},
           {"slack", slack},
           {"margin", json_number(margin)},
           {"pass", pass},
           {"skipped", skipped}};
    if (!note.empty()) j["note"] = note;
    if (!extra.is_null()) j["extra"] = extra;
    return j;
  }
};

inline Json to_json(const ConstantsLedger& L) {
  Json j;
  j["n"] = L.n;
  j["lambda"] = L.lambda;
  j["Lambda"] = L.Lambda;
  j["S"] = L.sobolev_s;
  j["p"] = L.p;
  j["C1"] = L.c1();
  j["C2"] = L.c2();
  j["A"] = L.shift_a();
  j["A_closed_form"] = L.shift_a_is_closed_form();
  return j;
}

inline Json to_json(const OscillationLedger& O) {
  Json j;
  j["eps0"] = O.eps0;
  j["eps1"] = O.eps1;
  j["k0"] = O.k0;
  j["gamma"] = O.gamma;
  j["log2_one_minus_gamma"] = O.log2_one_minus_gamma;
  j["alpha_theory"] = O.alpha_theory;
  j["log2_alpha_theory"] = O.log2_alpha_theory;
  return j;
}

/// Aggregated result of a verification run.
struct SuiteReport {
  Json config;
  Json constants;
  Json oscillation_constants;
  std::vector<LemmaReport> reports;
  bool overall_pass = true;

  void add(LemmaReport r) {
    if (!r.skipped) overall_pass = overall_pass && r.pass;
    reports.push_back(std::move(r));
  }

  Json to_json() const {
    Json j;
    j["config"] = config;
    j["constants"] = constants;
    j["oscillation_constants"] = oscillation_constants;
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    j["reports"] = arr;
    j["overall_pass"] = overall_pass;
    return j;
  }
};

}  // namespace degiorgi
