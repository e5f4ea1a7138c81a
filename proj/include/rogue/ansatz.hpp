#pragma once

#include "rogue/poly.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rogue {

/// Equation coefficients (alpha, beta, gamma), wave speed omega and wave
/// center (mu, nu), all exact.
struct Params {
  Rational alpha = 12;
  Rational beta = 1;
  Rational gamma = -8;
  Rational omega = 1;
  Rational mu = 0;
  Rational nu = 0;

  /// gamma + omega^2, the coefficient multiplying u_vv after the
  /// traveling-wave reduction.
  Rational k_sum() const { return gamma + omega * omega; }
  /// beta * k_sum < 0: the ansatz denominators have no real zeros.
  bool nonsingular() const { return beta * k_sum() < 0; }
  /// Throws SingularParameters when alpha, beta or k_sum vanishes.
  void validate() const;

  friend bool operator==(const Params&, const Params&) = default;
};

/// Reads {"alpha": "12", "beta": "1", ...}; every value is a string
/// (or integer) parsed exactly. Missing keys are an error.
Params parse_params(std::string_view json_text);
Params load_params(const std::filesystem::path& path);
std::string params_to_json(const Params& p);

/// Which text of the wave-center block is used. The typeset orders 2 and 3
/// ansatzes multiply the Q block by 2*mu*nu; the generic construction (and
/// the order-2 closed form) multiply it by 2*mu*v.
enum class AnsatzForm { corrected, as_printed };

enum class AnsatzMode { unknown, solved };

using FreeValues = std::map<std::string, Rational>;

/// z21 = z24 = 1, the values used for every 3-rogue figure.
FreeValues default_free_values(int order);

struct AnsatzOptions {
  AnsatzForm form = AnsatzForm::corrected;
  /// Order 2: keep z21, z24 as polynomial variables instead of binding them.
  bool symbolic_free = false;
  /// Allow solved mode outside the nonsingular regime.
  bool override_singular = false;
};

struct AnsatzSpec {
  int order = 1;
  AnsatzMode mode = AnsatzMode::unknown;
  AnsatzForm form = AnsatzForm::corrected;
  Poly xi;
  std::vector<std::string> unknowns;
  std::vector<std::string> free_params;
};

enum class Provenance { closed_form, numeric_solve };

struct Solution {
  /// Unknown -> value, as polynomials over the ansatz VarSet (values may
  /// contain mu, nu and free parameters).
  std::map<std::string, Poly> assignment;
  std::vector<std::string> free;
  Provenance provenance = Provenance::closed_form;
};

/// Unknown coefficient names for an order: z0,z1 / z10..z24 / z25..z69.
std::vector<std::string> ansatz_unknowns(int order);
std::vector<std::string> ansatz_free_params(int order);

/// Variable set {v, y, mu, nu} followed by the order's unknowns.
VarSetPtr ansatz_varset(int order);

/// Triangular polynomial families with symbolic coefficients a_m_l, b_m_l,
/// c_m_l over {v, y, a.., b.., c..}. F_0 = 1 and P_0 = Q_0 = 0.
struct GenericBlocks {
  int n = 0;
  Poly F, P, Q;
};
GenericBlocks build_generic_blocks(int n);

/// Comparison of the generic block supports against a printed ansatz.
struct BlockReconciliation {
  bool matches = true;
  std::vector<std::string> notes;
};
BlockReconciliation reconcile_generic_blocks(int order, const Params& params);

/// Unknown mode: xi with z-variables. Solved mode: closed-form values
/// substituted; mu, nu stay symbolic (and z21, z24 when symbolic_free).
AnsatzSpec build_xi(int order, AnsatzMode mode, const Params& params, const FreeValues& free_values = {},
                    const AnsatzOptions& options = {});

/// Closed-form coefficient values for orders 1, 2, 3.
Solution closed_form_coefficients(int order, const Params& params, const FreeValues& free_values = {},
                            bool symbolic_free = false);

/// xi with mu, nu (and any free parameter) bound, reduced to a polynomial
/// in (v, y) only.
Poly bind_center(const AnsatzSpec& spec, const Params& params, const FreeValues& free_values = {});

}  // namespace rogue
