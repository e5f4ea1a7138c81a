#include "rogue/report.hpp"

#include <random>

namespace rogue {

Json params_json(const Params& p) {
  Json j;
  j["alpha"] = to_string(p.alpha);
  j["beta"] = to_string(p.beta);
  j["gamma"] = to_string(p.gamma);
  j["omega"] = to_string(p.omega);
  j["mu"] = to_string(p.mu);
  j["nu"] = to_string(p.nu);
  return j;
}

Json monomial_json(const VarSet& vars, MonomialView exps) { return monomial_string(vars, exps); }

Json residual_json(const ResidualReport& report, std::size_t worst) {
  Json j;
  j["identically_zero"] = report.identically_zero;
  j["status"] = report.identically_zero ? "identically zero" : "nonzero";
  j["nonzero_monomials"] = report.nonzero_monomial_count;
  j["max_coefficient_magnitude"] = to_string(report.max_coefficient_magnitude);
  Json w = Json::array();
  for (const auto& [m, c] : report.worst_monomials(worst)) {
    w.push_back({{"monomial", monomial_json(*report.numerator.vars(), m)}, {"coefficient", to_string(c)}});
  }
  j["worst_monomials"] = std::move(w);
  return j;
}

Json verification_json(const VerificationReport& report) {
  Json j;
  j["pass"] = report.pass;
  j["route"] = report.route;
  j["collected_over"] = report.outer;
  j["equations_checked"] = report.equations_checked;
  j["failing"] = report.failing;
  auto outer = make_varset(report.outer);
  Json f = Json::array();
  for (const auto& e : report.failures) {
    f.push_back({{"monomial", monomial_json(*outer, e.source)}, {"value", e.value}});
  }
  j["failures"] = std::move(f);
  return j;
}

Json solve_json(const SolveResult& r) {
  Json j;
  j["converged"] = r.converged;
  j["status"] = r.status;
  j["iterations"] = r.iterations;
  j["residual_norm"] = r.residual_norm;
  j["jacobian_rank"] = r.jacobian_rank;
  j["unconstrained"] = r.unconstrained;
  Json a, s;
  for (const auto& [k, v] : r.assignment) a[k] = v;
  for (const auto& [k, v] : r.start_point) s[k] = v;
  j["assignment"] = std::move(a);
  j["start_point"] = std::move(s);
  return j;
}

Json typeset_form_json(const TypesetFormReconciliation& rec) {
  Json j;
  j["proportional"] = rec.proportional;
  if (rec.proportional) j["scale"] = rec.scale;
  j["probes"] = rec.probes;
  j["discrepancy_monomials"] = rec.discrepancy_monomials;
  j["vanishes_on_order1"] = rec.vanishes_on_order1;
  Json t = Json::array();
  for (const auto& [label, m] : rec.term_multipliers) t.push_back({{"term", label}, {"multiplier", m}});
  j["term_multipliers"] = std::move(t);
  j["fit_residual"] = rec.fit_residual;
  j["notes"] = rec.notes;
  return j;
}

Json extrema_json(const ExtremumReport& report) {
  Json j;
  j["threshold_fraction"] = report.options.threshold_fraction;
  j["threshold"] = report.threshold;
  j["min_separation"] = report.options.min_separation;
  j["refined"] = report.options.refine;
  j["counts"] = {{"max", report.count(ExtremumKind::max)},
                 {"min", report.count(ExtremumKind::min)},
                 {"saddle", report.count(ExtremumKind::saddle)}};
  Json e = Json::array();
  for (const auto& x : report.entries) {
    e.push_back({{"kind", to_string(x.kind)},
                 {"x", x.x},
                 {"y", x.y},
                 {"u", x.u},
                 {"refined", x.refined},
                 {"gradient_norm", x.gradient_norm}});
  }
  j["extrema"] = std::move(e);
  return j;
}

Json fd_json(const FdResidual& r) { return {{"residual", r.residual}, {"scale", r.scale}, {"floor", r.floor}}; }

Json derivation_report(int order, const Params& params, const DeriveOptions& options) {
  params.validate();
  Json j;
  j["order"] = order;
  j["params"] = params_json(params);
  j["reduced_operator"] = reduce_pde(params).describe();
  j["clearing_power"] = kClearingPower;

  AnsatzSpec unknown = build_xi(order, AnsatzMode::unknown, params);
  j["unknowns"] = unknown.unknowns;
  j["free_parameters"] = unknown.free_params;
  j["ansatz"] = to_string(unknown.xi);

  // Exact check of the closed-form coefficients, mu and nu symbolic and the
  // free parameters left symbolic as well.
  Solution sol = closed_form_coefficients(order, params, {}, true);
  VerificationReport ver = verify_solution(unknown, params, sol);
  j["verification"] = verification_json(ver);

  if (order > 1) {
    AnsatzOptions printed;
    printed.form = AnsatzForm::as_printed;
    printed.symbolic_free = true;
    printed.override_singular = true;
    AnsatzSpec spec = build_xi(order, AnsatzMode::solved, params, {}, printed);
    j["typeset_ansatz_variant"] = residual_json(residual_numerator(spec.xi, params), 10);
  }

  BlockReconciliation blocks = reconcile_generic_blocks(order, params);
  j["generic_blocks"] = {{"matches", blocks.matches}, {"notes", blocks.notes}};
  if (options.include_typeset_form) j["typeset_differential_form"] = typeset_form_json(reconcile_typeset_form(params));

  if (order <= 2) {
    FreeValues free = options.free_values.empty() ? default_free_values(order) : options.free_values;
    CoeffSystem sys = build_numeric_system(order, params, free);
    j["equations_count"] = sys.equations.size();
    std::map<std::string, double> seed;
    if (order == 1) {
      seed = {{"z0", 1.0}, {"z1", 1.0}};
    } else {
      std::mt19937_64 rng(options.seed);
      seed = perturbed_seed(order, params, free, options.perturbation, rng);
    }
    j["numeric"] = solve_json(solve_numeric(sys, seed));
  } else {
    j["equations_count"] = nullptr;
    j["numeric"] = nullptr;
    j["numeric_note"] = "coefficient system not expanded at this order; see the perturbation recovery in solve";
  }
  return j;
}

}  // namespace rogue
