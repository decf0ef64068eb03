#pragma once

#include <cmath>

#include "json.hpp"
#include "pconf/io.hpp"

namespace pconf::detail {

using Json = nlohmann::ordered_json;

inline Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json json_of(const EnergyReport& report);
Json json_of(const ResidualReport& report);
Json json_of(const SolveResult& result);
Json json_of(const TeichReport& report);
Json json_of(const DouglasReport& report);
Json json_of(const BeltramiSolution& solution);

}  // namespace pconf::detail
