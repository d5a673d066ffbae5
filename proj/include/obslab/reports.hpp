#pragma once

// Machine-readable outputs: JSON convergence logs and reports, CSV tables
// for the iteration and approximation sweeps.

#include <fstream>
#include <string>

#include <json.hpp>

#include "obslab/approx.hpp"
#include "obslab/linearize.hpp"
#include "obslab/moser.hpp"
#include "obslab/solver.hpp"

namespace obslab {

inline nlohmann::json convergence_log_json(const SolveResult& r) {
  long active = 0;
  for (bool b : r.active_mask) active += b ? 1 : 0;
  return nlohmann::json{{"iterations", r.iterations},
                        {"converged", r.converged},
                        {"residual_history", r.residual_history},
                        {"energy_history", r.energy_history},
                        {"active_count", active},
                        {"active_threshold", r.active_threshold}};
}

inline nlohmann::json linearization_report_json(const LinearizationReport& rep) {
  nlohmann::json residuals = nlohmann::json::array();
  for (const auto& [name, value] : rep.eq_residuals)
    residuals.push_back({{"eta", name}, {"residual", value}});
  return nlohmann::json{{"g_inf_measured", rep.g_inf_measured},
                        {"g_inf_bound", rep.g_inf_bound},
                        {"residuals", residuals},
                        {"vp_grad_l2", rep.vp_grad_l2},
                        {"active_count", rep.active_count},
                        {"buffer_excluded", rep.buffer_excluded}};
}

inline nlohmann::json moser_report_json(const MoserReport& rep) {
  return nlohmann::json{{"gammas", rep.gammas},
                        {"radii", rep.radii},
                        {"a_values", rep.a_values},
                        {"c_meas", rep.c_meas},
                        {"lhs_final", rep.lhs_final},
                        {"rhs_base", rep.rhs_base},
                        {"fitted_C", rep.fitted_C},
                        {"beta", rep.beta},
                        {"beta_scaling_exponent", rep.beta_scaling_exponent},
                        {"a_limit", rep.a_limit}};
}

inline void write_moser_csv(const MoserReport& rep, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_moser_csv: cannot open " + path);
  os.precision(17);
  os << "k,gamma_k,R_k,A_k,C_meas\n";
  for (std::size_t k = 0; k < rep.a_values.size(); ++k) {
    os << (k + 1) << "," << rep.gammas[k] << "," << rep.radii[k] << "," << rep.a_values[k] << ",";
    if (k < rep.c_meas.size()) os << rep.c_meas[k];
    os << "\n";
  }
}

inline void write_schedule_csv(const ApproximationSchedule& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_schedule_csv: cannot open " + path);
  os.precision(17);
  os << "ell,k,eps,energy,grad_lp,grad_linf,dist_to_ref,converged\n";
  for (const ScheduleRecord& r : s.records)
    os << r.ell << "," << r.k << "," << r.eps << "," << r.energy << "," << r.grad_lp << ","
       << r.grad_linf << "," << r.dist_to_ref << "," << (r.converged ? 1 : 0) << "\n";
}

inline nlohmann::json family_report_json(const FamilyReport& rep) {
  nlohmann::json members = nlohmann::json::array();
  for (const FamilyMemberReport& m : rep.members)
    members.push_back({{"eps", m.eps},
                       {"k", m.k},
                       {"lambda_hat", m.lambda_hat},
                       {"Lambda_hat_hess", m.Lambda_hat_hess},
                       {"Lambda_hat_mixed", m.Lambda_hat_mixed},
                       {"growth_min", m.growth_min},
                       {"growth_max", m.growth_max},
                       {"sup_deviation", m.sup_deviation}});
  return nlohmann::json{{"members", members},
                        {"M1_hat", rep.M1_hat},
                        {"M2_hat", rep.M2_hat},
                        {"lambda1_hat", rep.lambda1_hat},
                        {"Lambda1_hat", rep.Lambda1_hat},
                        {"uniform", rep.uniform}};
}

inline nlohmann::json structure_report_json(const StructureReport& rep) {
  return nlohmann::json{{"lambda_hat", rep.lambda_hat},
                        {"Lambda_hat_hess", rep.Lambda_hat_hess},
                        {"Lambda_hat_mixed", rep.Lambda_hat_mixed},
                        {"sample_count", rep.sample_count},
                        {"violation", rep.violation}};
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_json: cannot open " + path);
  os << j.dump(2) << "\n";
}

}  // namespace obslab
