#include "json_io.hpp"

namespace pconf {

namespace detail {

Json json_of(const EnergyReport& r) {
  Json j;
  j["p"] = number(r.p);
  j["energy_p"] = number(r.energy_p);
  j["energy_star_p"] = number(r.energy_star_p);
  j["holder_lhs"] = number(r.holder_lhs);
  j["holder_rhs"] = number(r.holder_rhs);
  j["orientation_violations"] = r.orientation_violations;
  return j;
}

Json json_of(const ResidualReport& r) {
  Json j;
  j["residual_re"] = number(r.inner_residual.real());
  j["residual_im"] = number(r.inner_residual.imag());
  j["inverse_re"] = number(r.inverse_residual.real());
  j["inverse_im"] = number(r.inverse_residual.imag());
  j["normalizer"] = number(r.normalizer);
  return j;
}

Json json_of(const SolveResult& r) {
  Json j;
  j["p"] = number(r.p);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["rel_grad"] = number(r.rel_grad);
  j["min_J"] = number(r.min_J);
  j["pre_regularized"] = r.pre_regularized;
  j["diagnosis"] = r.diagnosis;
  j["report"] = json_of(r.report);
  j["max_relative_residual"] = number(r.max_relative_residual);
  j["max_relative_inverse_residual"] = number(max_relative_inverse(r.residual_panel));
  Json panel = Json::array();
  for (const auto& rr : r.residual_panel) panel.push_back(json_of(rr));
  j["residual_panel"] = std::move(panel);
  return j;
}

Json json_of(const TeichReport& r) {
  Json j;
  Json rows = Json::array();
  for (std::size_t k = 0; k < r.p_sweep.size(); ++k)
    rows.push_back({{"p", number(r.p_sweep[k])},
                    {"energy", number(r.energies[k])},
                    {"root", number(r.roots[k])},
                    {"flatness", number(r.mu_flatness[k])}});
  j["sweep"] = std::move(rows);
  j["extrapolated_root"] = number(r.extrapolated_root);
  j["k_estimate"] = number(r.k_estimate);
  j["xi_l1_norm"] = number(r.xi.l1_norm);
  j["xi_sup_inner"] = number(r.xi.sup_inner);
  j["degenerate"] = r.degenerate;
  j["warnings"] = r.warnings;
  return j;
}

Json json_of(const DouglasReport& r) {
  Json j;
  j["value"] = number(r.value);
  j["refined_value"] = number(r.refined_value);
  j["relative_change"] = number(r.relative_change);
  j["finite"] = r.finite;
  return j;
}

Json json_of(const BeltramiSolution& s) {
  Json j;
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  j["contraction_ratio"] = number(s.contraction_ratio);
  j["residual"] = number(s.residual);
  j["final_update"] = number(s.update_norms.empty() ? 0.0 : s.update_norms.back());
  j["diagnosis"] = s.diagnosis;
  return j;
}

}  // namespace detail

std::string to_json(const EnergyReport& report) { return detail::json_of(report).dump(); }
std::string to_json(const ResidualReport& report) { return detail::json_of(report).dump(); }
std::string to_json(const SolveResult& result) { return detail::json_of(result).dump(); }
std::string to_json(const TeichReport& report) { return detail::json_of(report).dump(); }
std::string to_json(const DouglasReport& report) { return detail::json_of(report).dump(); }
std::string to_json(const BeltramiSolution& solution) { return detail::json_of(solution).dump(); }

}  // namespace pconf
