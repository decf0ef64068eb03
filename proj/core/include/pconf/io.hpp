#pragma once

#include <string>

#include "pconf/limits.hpp"
#include "pconf/radial.hpp"

namespace pconf {

inline constexpr const char* kSchemaVersion = "pconf.summary/1";

// Compact JSON records. Non-finite numbers are written as null.
std::string to_json(const EnergyReport& report);
// Fields residual_re, residual_im (the inner-variation residual), inverse_re, inverse_im, normalizer.
std::string to_json(const ResidualReport& report);
// Scalars of a solve plus the energy report and the panel maxima; the fields go to CSV.
std::string to_json(const SolveResult& result);
std::string to_json(const TeichReport& report);
std::string to_json(const DouglasReport& report);
std::string to_json(const BeltramiSolution& solution);

}  // namespace pconf
