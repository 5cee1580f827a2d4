#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "steinlab/functionals.hpp"
#include "steinlab/gauss_functionals.hpp"
#include "steinlab/inequalities.hpp"
#include "steinlab/ou_semigroup.hpp"

namespace steinlab {

nlohmann::json to_json(const FunctionalValue& v);
nlohmann::json to_json(const InequalityReport& r);
nlohmann::json to_json(const MCEstimate& e);

// CSV with header t,H,I,S,bound_I_lsi,bound_I_stein,bound_I_improved,
// bound_H_exp,bound_H_hsi1,bound_H_hsi2; floats at 12 significant digits.
std::string decay_csv(const std::vector<DecayRow>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string concentration_csv(const ConcentrationResult& r);
std::string histogram_csv(const std::vector<std::pair<double, double>>& rows);

}  // namespace steinlab
