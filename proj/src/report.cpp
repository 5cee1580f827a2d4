#include "steinlab/report.hpp"

#include <cmath>

#include "steinlab/numeric.hpp"

namespace steinlab {

namespace {

// JSON cannot carry inf/nan; encode them as strings so reports stay parseable.
nlohmann::json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string csv_row(const std::vector<double>& vals) {
  std::string row;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) row += ",";
    row += format_g12(vals[i]);
  }
  row += "\n";
  return row;
}

}  // namespace

nlohmann::json to_json(const FunctionalValue& v) {
  nlohmann::json j;
  j["kind"] = v.kind;
  j["value"] = num(v.value);
  j["error"] = num(v.error);
  j["diverged"] = v.diverged;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["slack"] = num(r.slack);
  j["tolerance"] = num(r.tolerance);
  j["holds"] = r.holds;
  j["indeterminate"] = r.indeterminate;
  if (!r.convention.empty()) j["convention"] = r.convention;
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = num(v);
  j["inputs"] = inputs;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

nlohmann::json to_json(const MCEstimate& e) {
  nlohmann::json j;
  j["value"] = num(e.value);
  j["se"] = num(e.se);
  j["samples"] = e.samples;
  j["seed"] = e.seed;
  j["flagged"] = e.flagged;
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

std::string decay_csv(const std::vector<DecayRow>& rows) {
  std::string out =
      "t,H,I,S,bound_I_lsi,bound_I_stein,bound_I_improved,"
      "bound_H_exp,bound_H_hsi1,bound_H_hsi2\n";
  for (const auto& r : rows)
    out += csv_row({r.t, r.H, r.I, r.S, r.bound_I_lsi, r.bound_I_stein,
                    r.bound_I_improved, r.bound_H_exp, r.bound_H_hsi1,
                    r.bound_H_hsi2});
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "n,a,H,I,S2,W2,hwi_rhs,hsi_rhs,hwi_holds,hsi_holds,hsi_budget_ok\n";
  for (const auto& r : rows) {
    out += csv_row({r.n, r.a, r.H, r.I, r.S2, r.W2, r.hwi_rhs, r.hsi_rhs});
    out.pop_back();  // rejoin the flag columns onto the same line
    out += "," + std::to_string(int(r.hwi_holds)) + "," +
           std::to_string(int(r.hsi_holds)) + "," +
           std::to_string(int(r.hsi_budget_ok)) + "\n";
  }
  return out;
}

std::string concentration_csv(const ConcentrationResult& r) {
  std::string out = "p,lhs,Sp,tau_term,rhs_unit,c_required,rosenthal_Sp\n";
  for (const auto& row : r.rows)
    out += csv_row({row.p, row.lhs, row.Sp, row.tau_term, row.rhs_unit,
                    row.c_required, row.rosenthal_Sp});
  return out;
}

std::string histogram_csv(const std::vector<std::pair<double, double>>& rows) {
  std::string out = "center,density\n";
  for (const auto& [c, d] : rows) out += csv_row({c, d});
  return out;
}

}  // namespace steinlab
