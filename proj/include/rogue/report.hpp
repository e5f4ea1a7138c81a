#pragma once

#include "rogue/ansatz.hpp"
#include "rogue/coeffsolve.hpp"
#include "rogue/residual.hpp"
#include "rogue/wavefield.hpp"

#include <json.hpp>

#include <cstdint>

namespace rogue {

using Json = nlohmann::ordered_json;

Json params_json(const Params& p);
Json monomial_json(const VarSet& vars, MonomialView exps);
Json residual_json(const ResidualReport& report, std::size_t worst = 20);
Json verification_json(const VerificationReport& report);
Json solve_json(const SolveResult& result);
Json typeset_form_json(const TypesetFormReconciliation& rec);
Json extrema_json(const ExtremumReport& report);
Json fd_json(const FdResidual& r);

struct DeriveOptions {
  FreeValues free_values;      // numeric system bindings; defaults per order
  std::uint64_t seed = 1;      // for the perturbed order-2 start
  double perturbation = 0.01;  // relative seed jitter for order 2
  bool include_typeset_form = true;
};

/// Unknowns, exact verification of the closed-form coefficients (and of
/// the typeset ansatz variant), system size and a numeric solve where the
/// system is small enough to build.
Json derivation_report(int order, const Params& params, const DeriveOptions& options = {});

}  // namespace rogue
