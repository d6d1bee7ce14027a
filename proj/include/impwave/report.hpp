#pragma once

#include <cmath>

#include <json.hpp>

#include "impwave/certificate.hpp"
#include "impwave/config.hpp"
#include "impwave/jump.hpp"
#include "impwave/limiting.hpp"

namespace impwave {

namespace detail {

inline json jnum(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

}  // namespace detail

inline json to_json(const SeedValidation& v) {
  return {{"pass", v.pass},
          {"residual_position", v.residual_position},
          {"residual_tangency", v.residual_tangency},
          {"residual_norm", v.residual_norm},
          {"failures", v.failures}};
}

inline json to_json(const Certificate& c) {
  json terms;
  terms["C2_max_arguments"] = c.c2_terms;
  json eta_t = json::array(), eps_t = json::array();
  for (double x : c.eta_terms) eta_t.push_back(detail::jnum(x));
  for (double x : c.eps0_terms) eps_t.push_back(detail::jnum(x));
  terms["eta_min_arguments"] = eta_t;
  terms["eps0_min_arguments"] = eps_t;
  return {{"C1", c.C1},
          {"C2", c.C2},
          {"eta", c.eta},
          {"eps0_prime", c.eps0_prime},
          {"eps0", c.eps0},
          {"norms_used",
           {{"normH", c.norms_used.normH},
            {"normDH", c.norms_used.normDH},
            {"sup_rho", c.norms_used.sup_rho},
            {"sup_rho_prime", c.norms_used.sup_rho_prime}}},
          {"seed_limits",
           {{"U0dot", c.u0dot}, {"z0", c.z0}, {"z0dot_norm", c.z0dot_norm}}},
          {"terms", terms}};
}

inline json to_json(const LemmaReport& r) {
  return {{"pass", r.pass},
          {"precondition_ok", r.precondition_ok},
          {"precondition_threshold", detail::jnum(r.precondition_threshold)},
          {"pointwise_ok", r.pointwise_ok},
          {"min_abs_N", detail::jnum(r.min_abs_N)},
          {"pointwise_margin", detail::jnum(r.pointwise_margin)},
          {"diameter_ok", r.diameter_ok},
          {"worst_diameter_ratio", r.worst_diameter_ratio},
          {"exit_estimate_ok", r.exit_estimate_ok},
          {"worst_exit_value", detail::jnum(r.worst_exit_value)},
          {"failures", r.failures}};
}

inline json to_json(const State5& s) {
  return {{"t", s.t}, {"pos", s.pos}, {"vel", s.vel}};
}

inline json to_json(const RungObservables& r) {
  return {{"eps", r.eps},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"entry", to_json(r.entry)},
          {"exit", to_json(r.exit)},
          {"exit_flat_norm", r.exit_flat_norm},
          {"max_abs_F", r.max_abs_F},
          {"max_abs_dF_vel", r.max_abs_dF_vel},
          {"sup_abs_dV", r.sup_abs_dV}};
}

inline json to_json(const PowerLawFit& f) {
  return {{"v_star", f.v_star},
          {"coeff", f.coeff},
          {"rate", detail::jnum(f.rate)},
          {"rms", f.rms},
          {"flat", f.flat},
          {"monotone", f.monotone}};
}

inline json to_json(const JumpData& j) {
  json rungs = json::array();
  for (const auto& r : j.rungs) rungs.push_back(to_json(r));
  return {{"A_p", j.A_p},
          {"B", j.B},
          {"C", j.C},
          {"fits",
           {{"A2", to_json(j.fits[0])},
            {"A3", to_json(j.fits[1])},
            {"A4", to_json(j.fits[2])},
            {"B", to_json(j.fits[3])},
            {"C", to_json(j.fits[4])}}},
          {"uncertainties", j.uncertainties},
          {"max_residual", j.max_residual},
          {"mollifier_spread", j.mollifier_spread},
          {"low_confidence", j.low_confidence},
          {"primary_mollifier", j.primary_mollifier},
          {"secondary_mollifier", j.secondary_mollifier},
          {"rungs", rungs}};
}

inline json to_json(const LineFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"rms", f.rms}};
}

inline json to_json(const AssociationReport& r) {
  json pair_rates = json::array();
  for (const auto& f : r.rate_pairings) pair_rates.push_back(to_json(f));
  return {{"eps", r.eps},
          {"sup_U_c1", r.sup_U_c1},
          {"sup_Z_c0", r.sup_Z_c0},
          {"pairings_V", r.pairings_V},
          {"sup_dV_near0", r.sup_dV_near0},
          {"rate_U", to_json(r.rate_U)},
          {"rate_Z", to_json(r.rate_Z)},
          {"rate_pairings", pair_rates},
          {"jump_magnitude_dV", r.jump_magnitude_dV},
          {"verdicts",
           {{"U_c1_monotone", r.U_monotone},
            {"Z_c0_monotone", r.Z_monotone},
            {"pairings_vanish", r.pairings_vanish},
            {"dV_witness_holds", r.dV_witness_holds}}},
          {"window", r.window},
          {"witness_window", r.witness_window}};
}

inline json to_json(const DependenceReport& r) {
  return {{"initial_diff", r.initial_diff},
          {"sup_diff", r.sup_diff},
          {"lipschitz", r.lipschitz},
          {"bound", r.bound},
          {"pass", r.pass}};
}

inline json to_json(const CrossingRecord& r) {
  return {{"index", r.index},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"direction", r.direction},
          {"entry", to_json(r.entry_state)},
          {"exit", to_json(r.exit_state)}};
}

inline json trajectory_summary(const Trajectory& traj) {
  json crossings = json::array();
  for (const auto& c : traj.crossings) crossings.push_back(to_json(c));
  json segs = json::array();
  for (const auto& s : traj.segments)
    segs.push_back({{"kind", segment_tag(s.kind)}, {"t_begin", s.t_begin}, {"t_end", s.t_end}});
  return {{"eps", traj.eps},
          {"e", traj.e},
          {"span", {traj.span.lo, traj.span.hi}},
          {"crossings", crossings},
          {"segments", segs},
          {"max_junction_mismatch", max_junction_mismatch(traj)},
          {"warnings", traj.warnings}};
}

}  // namespace impwave
