#include "rogue/ansatz.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace rogue {

using nlohmann::json;

void Params::validate() const {
  if (alpha == 0) throw SingularParameters("alpha must be nonzero");
  if (beta == 0) throw SingularParameters("beta must be nonzero");
  if (k_sum() == 0) throw SingularParameters("gamma + omega^2 must be nonzero");
}

Params parse_params(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("params JSON: ") + e.what());
  }
  if (!doc.is_object()) throw UsageError("params JSON must be an object");
  auto read = [&](const char* key) -> Rational {
    if (!doc.contains(key)) throw UsageError(std::string("params JSON lacks '") + key + "'");
    const json& v = doc.at(key);
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return parse_rational(v.dump());
    throw UsageError(std::string("params value '") + key + "' must be a string such as \"3/7\"");
  };
  Params p;
  p.alpha = read("alpha");
  p.beta = read("beta");
  p.gamma = read("gamma");
  p.omega = read("omega");
  p.mu = read("mu");
  p.nu = read("nu");
  return p;
}

Params load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open params file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string params_to_json(const Params& p) {
  json doc = {{"alpha", to_string(p.alpha)}, {"beta", to_string(p.beta)}, {"gamma", to_string(p.gamma)},
              {"omega", to_string(p.omega)}, {"mu", to_string(p.mu)},     {"nu", to_string(p.nu)}};
  return doc.dump();
}

FreeValues default_free_values(int order) {
  if (order == 2) return {{"z21", Rational(1)}, {"z24", Rational(1)}};
  return {};
}

std::vector<std::string> ansatz_unknowns(int order) {
  std::vector<std::string> out;
  auto range = [&](int lo, int hi) {
    for (int i = lo; i <= hi; ++i) out.push_back(zeta_name(i));
  };
  switch (order) {
    case 1: range(0, 1); break;
    case 2: range(10, 24); break;
    case 3: range(25, 69); break;
    default: throw UsageError("ansatz order must be 1, 2 or 3");
  }
  return out;
}

std::vector<std::string> ansatz_free_params(int order) {
  if (order == 2) return {"z21", "z24"};
  return {};
}

VarSetPtr ansatz_varset(int order) {
  std::vector<std::string> names = {"v", "y", "mu", "nu"};
  for (auto& z : ansatz_unknowns(order)) names.push_back(z);
  return make_varset(std::move(names));
}

// ---------------------------------------------------------------------------
// Generic triangular blocks

namespace {

struct BlockTerm {
  std::string coeff;
  unsigned v_exp, y_exp;
};

// Index pattern shared by the three families: outer index k in
// [0, n(n+1)/2], inner index i in [0, k]; the "major" variable carries
// n(n+1) - 2k and the "minor" variable carries 2i.
std::vector<BlockTerm> block_terms(int n, char prefix, bool v_major) {
  std::vector<BlockTerm> out;
  const int top = n * (n + 1);
  for (int k = 0; k <= top / 2; ++k) {
    for (int i = 0; i <= k; ++i) {
      unsigned major = static_cast<unsigned>(top - 2 * k), minor = static_cast<unsigned>(2 * i);
      std::string name = std::string(1, prefix) + "_" + std::to_string(major) + "_" + std::to_string(minor);
      out.push_back({name, v_major ? major : minor, v_major ? minor : major});
    }
  }
  return out;
}

Poly block_poly(const VarSetPtr& vars, const std::vector<BlockTerm>& terms) {
  std::vector<std::pair<Monomial, Rational>> out;
  const std::size_t iv = vars->index("v"), iy = vars->index("y");
  for (const auto& t : terms) {
    Monomial m(vars->size(), 0);
    m[iv] = static_cast<Exponent>(t.v_exp);
    m[iy] = static_cast<Exponent>(t.y_exp);
    m[vars->index(t.coeff)] = 1;
    out.emplace_back(std::move(m), Rational(1));
  }
  return Poly::from_terms(vars, std::move(out));
}

std::set<std::pair<unsigned, unsigned>> vy_support(const Poly& p) {
  std::set<std::pair<unsigned, unsigned>> out;
  const std::size_t iv = p.vars()->index("v"), iy = p.vars()->index("y");
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.emplace(p.exponents(i)[iv], p.exponents(i)[iy]);
  }
  return out;
}

}  // namespace

GenericBlocks build_generic_blocks(int n) {
  if (n < 0 || n > 3) throw UsageError("generic blocks are supported for n in [0, 3]");
  std::vector<BlockTerm> f, p, q;
  if (n > 0) {
    f = block_terms(n, 'a', true);
    // The P family carries the transposed pattern (y major, v minor).
    p = block_terms(n, 'b', false);
    q = block_terms(n, 'c', true);
  }
  std::vector<std::string> names = {"v", "y"};
  for (const auto* family : {&f, &p, &q}) {
    for (const auto& t : *family) names.push_back(t.coeff);
  }
  VarSetPtr vars = make_varset(std::move(names));
  GenericBlocks out{n, Poly(vars), Poly(vars), Poly(vars)};
  out.F = n == 0 ? Poly::constant(vars, Rational(1)) : block_poly(vars, f);
  out.P = block_poly(vars, p);
  out.Q = block_poly(vars, q);
  return out;
}

// ---------------------------------------------------------------------------
// Printed ansatzes

namespace {

const char* kOrder2Text =
    "mu^2 + nu^2 + v^6 + y^6*z17 + y^4*z16 + 2*mu*CENTER*(y^2*z23 + v^2*z24 + z22)"
    " + 2*nu*y*(y^2*z20 + v^2*z21 + z19) + v^4*y^2*z11 + y^2*z15"
    " + v^2*(y^4*z14 + y^2*z13 + z12) + v^4*z10 + z18";

const char* kOrder3Text =
    "v^12 + y^8*z48 + y^6*z47 + y^4*z46 + v^10*(y^2*z26 + z25) + y^2*z45"
    " + v^8*(y^4*z29 + y^2*z28 + z27)"
    " + 2*mu*CENTER*(v^6 + y^6*z64 + y^4*z63 + v^4*(y^2*z69 + z68) + y^2*z62"
    "               + v^2*(y^4*z67 + y^2*z66 + z65) + z61)"
    " + 2*nu*y*(y^6 + y^4*(v^2*z57 + z56) + y^2*(v^4*z55 + v^2*z54 + z53)"
    "           + v^6*z60 + v^4*z59 + v^2*z58 + z52)"
    " + v^6*(y^6*z33 + y^4*z32 + y^2*z31 + z30)"
    " + v^4*(y^8*z38 + y^6*z37 + y^4*z36 + y^2*z35 + z34)"
    " + v^2*(y^10*z44 + y^8*z43 + y^6*z42 + y^4*z41 + y^2*z40 + z39)"
    " + z51 + y^12*z50 + y^10*z49";

std::string with_center(std::string text, AnsatzForm form) {
  const std::string token = "CENTER";
  const std::string repl = form == AnsatzForm::corrected ? "v" : "nu";
  for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token)) {
    text.replace(pos, token.size(), repl);
  }
  return text;
}

Poly unknown_xi(int order, const Params& params, AnsatzForm form) {
  VarSetPtr vars = ansatz_varset(order);
  switch (order) {
    case 1: return parse_poly(vars, "(v - mu)^2 + z1*(y - nu)^2 + z0");
    case 2: return parse_poly(vars, with_center(kOrder2Text, form));
    case 3: {
      params.validate();
      const Rational k = params.k_sum();
      Poly xi = parse_poly(vars, with_center(kOrder3Text, form));
      // (mu^2 + nu^2) times the solved 1-rogue block.
      Poly shell = parse_poly(vars, "v^2") - Poly::constant(vars, Rational(3) * params.beta / k) -
                   k * parse_poly(vars, "y^2");
      return xi + mul(parse_poly(vars, "mu^2 + nu^2"), shell);
    }
    default: throw UsageError("ansatz order must be 1, 2 or 3");
  }
}

}  // namespace

BlockReconciliation reconcile_generic_blocks(int order, const Params& params) {
  BlockReconciliation out;
  AnsatzSpec spec = build_xi(order, AnsatzMode::unknown, params);
  GenericBlocks next = build_generic_blocks(order);
  GenericBlocks cur = build_generic_blocks(order - 1);

  // Split xi by its (mu, nu) monomial.
  std::map<std::pair<unsigned, unsigned>, Poly> parts;
  for (auto& ct : collect(spec.xi, std::vector<std::string>{"mu", "nu"})) {
    parts.emplace(std::make_pair(ct.outer[0], ct.outer[1]), ct.coeff);
  }
  auto part = [&](unsigned a, unsigned b) {
    auto it = parts.find({a, b});
    return it == parts.end() ? Poly(spec.xi.vars()) : it->second;
  };
  auto compare = [&](const std::string& label, const std::set<std::pair<unsigned, unsigned>>& expected,
                     const std::set<std::pair<unsigned, unsigned>>& actual) {
    if (expected == actual) {
      out.notes.push_back(label + ": support matches (" + std::to_string(actual.size()) + " monomials)");
    } else {
      out.matches = false;
      out.notes.push_back(label + ": support differs (generic " + std::to_string(expected.size()) +
                          ", ansatz " + std::to_string(actual.size()) + ")");
    }
  };
  auto shifted = [](std::set<std::pair<unsigned, unsigned>> s, unsigned dv, unsigned dy) {
    std::set<std::pair<unsigned, unsigned>> r;
    for (auto [a, b] : s) r.emplace(a + dv, b + dy);
    return r;
  };

  compare("F_" + std::to_string(order), vy_support(next.F), vy_support(part(0, 0)));
  if (order == 1) {
    out.notes.push_back("order 1 uses the center-shifted form (v-mu)^2 + z1*(y-nu)^2 + z0");
    return out;
  }
  compare("2*nu*y*P_" + std::to_string(order - 1), shifted(vy_support(cur.P), 0, 1), vy_support(part(0, 1)));
  // The Q block multiplies 2*mu*v in the corrected form.
  compare("2*mu*v*Q_" + std::to_string(order - 1), shifted(vy_support(cur.Q), 1, 0), vy_support(part(1, 0)));
  GenericBlocks prev = build_generic_blocks(order - 2);
  compare("(mu^2+nu^2)*F_" + std::to_string(order - 2), vy_support(prev.F), vy_support(part(2, 0)));
  compare("(mu^2+nu^2)*F_" + std::to_string(order - 2) + " [nu^2]", vy_support(prev.F), vy_support(part(0, 2)));
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form coefficients

Solution closed_form_coefficients(int order, const Params& params, const FreeValues& free_values, bool symbolic_free) {
  params.validate();
  VarSetPtr vars = ansatz_varset(order);
  const Rational b = params.beta, k = params.k_sum();
  auto C = [&](const Rational& r) { return Poly::constant(vars, r); };
  const Poly mu = Poly::variable(vars, "mu"), nu = Poly::variable(vars, "nu");
  auto kp = [&](int e) { return e >= 0 ? pow(k, static_cast<unsigned>(e)) : Rational(1) / pow(k, static_cast<unsigned>(-e)); };
  auto bp = [&](unsigned e) { return pow(b, e); };

  Solution sol;
  auto& z = sol.assignment;
  auto set = [&](int i, Poly value) { z.insert_or_assign(zeta_name(i), std::move(value)); };

  switch (order) {
    case 1:
      set(0, C(Rational(-3) * b / k));
      set(1, C(-k));
      break;
    case 2: {
      Poly z21(vars), z24(vars);
      if (symbolic_free) {
        z21 = Poly::variable(vars, "z21");
        z24 = Poly::variable(vars, "z24");
        sol.free = {"z21", "z24"};
      } else {
        for (const char* name : {"z21", "z24"}) {
          if (!free_values.count(name)) {
            throw UsageError(std::string("order 2 needs a value for free parameter ") + name);
          }
        }
        z21 = C(free_values.at("z21"));
        z24 = C(free_values.at("z24"));
        set(21, z21);
        set(24, z24);
      }
      set(11, C(-3 * k));
      set(14, C(3 * kp(2)));
      set(16, C(-17 * b * k));
      set(13, C(90 * b));
      set(20, z21 * Rational(k / 3));
      set(17, C(-kp(3)));
      set(15, C(-475 * bp(2) / k));
      set(23, z24 * Rational(3 * k));
      set(22, z24 * Rational(b / k));
      set(12, C(-125 * bp(2) / kp(2)));
      set(10, C(-25 * b / k));
      set(19, z21 * Rational(-5 * b / (3 * k)));
      // -[9[1875 b^3 + k^3 (mu^2 + nu^2) - mu^2 z24^2 k^3] + nu^2 z21^2 k^2] / [9 k^3]
      Poly inner = C(1875 * bp(3)) + kp(3) * (mul(mu, mu) + mul(nu, nu)) - kp(3) * mul(mul(mu, mu), mul(z24, z24));
      Poly total = Rational(9) * inner + kp(2) * mul(mul(nu, nu), mul(z21, z21));
      set(18, total * Rational(Rational(-1) / (9 * kp(3))));
      break;
    }
    case 3: {
      const Poly nu2 = mul(nu, nu);
      set(26, C(-6 * k));
      set(29, C(15 * kp(2)));
      set(28, C(690 * b));
      set(33, C(-20 * kp(3)));
      set(32, C(-1540 * b * k));
      set(31, C(-18620 * bp(2) / k));
      set(37, C(1460 * b * kp(2)));
      set(36, C(37450 * bp(2)));
      set(55, C(Rational(-5) / kp(2)));
      set(38, C(15 * kp(4)));
      set(35, C(220500 * bp(3) / kp(2)));
      set(43, C(-570 * b * kp(3)));
      set(42, C(-35420 * bp(2) * k));
      set(41, C(14700 * bp(3) / k));
      set(52, C(18865 * bp(3) / (3 * kp(6))));
      set(54, C(190 * b / kp(3)));
      set(44, C(-6 * kp(5)));
      set(57, C(Rational(9) / k));
      set(40, C(-565950 * bp(4) / kp(3)));
      set(50, C(kp(6)));
      set(49, C(58 * b * kp(4)));
      set(48, C(4335 * bp(2) * kp(2)));
      set(64, C(-5 * kp(3)));
      set(47, C(Rational(798980, 3) * bp(3)));
      set(27, C(735 * bp(2) / kp(2)));
      set(67, C(-5 * kp(2)));
      set(63, C(-45 * b * k));
      set(66, C(-230 * b));
      set(25, C(-98 * b / k));
      set(56, C(-7 * b / kp(2)));
      set(46, C(16391725 * bp(4) / (3 * kp(2))));
      set(53, C(-245 * bp(2) / kp(4)));
      set(60, C(Rational(-5) / kp(3)));
      set(69, C(9 * k));
      set(30, C(-75460 * bp(3) / (3 * kp(3))));
      // nu^2 [-1/k^7 - 1] - 159786550 b^5 / (3 k^5)
      set(39, nu2 * Rational(-1 / kp(7) - 1) + C(-159786550 * bp(5) / (3 * kp(5))));
      set(34, C(-5187875 * bp(4) / (3 * kp(4))));
      set(68, C(-13 * b / k));
      set(58, C(665 * bp(2) / kp(5)));
      // [300896750 b^5 k^2 + 3 nu^2 (k^7 + 1)] / (3 k^6)
      set(45, (C(300896750 * bp(5) * kp(2)) + nu2 * Rational(3 * (kp(7) + 1))) * Rational(1 / (3 * kp(6))));
      set(65, C(-245 * bp(2) / kp(2)));
      set(62, C(-535 * bp(2) / k));
      set(61, C(-12005 * bp(3) / (3 * kp(3))));
      set(59, C(105 * b / kp(4)));
      // b [878826025 b^5 k^2 + 27 nu^2 (k^7 + 1)] / (9 k^8)
      set(51, (C(878826025 * bp(5) * kp(2)) + nu2 * Rational(27 * (kp(7) + 1))) * Rational(b / (9 * kp(8))));
      break;
    }
    default: throw UsageError("ansatz order must be 1, 2 or 3");
  }
  sol.provenance = Provenance::closed_form;
  return sol;
}

AnsatzSpec build_xi(int order, AnsatzMode mode, const Params& params, const FreeValues& free_values,
                    const AnsatzOptions& options) {
  AnsatzSpec spec;
  spec.order = order;
  spec.mode = mode;
  spec.form = options.form;
  spec.unknowns = ansatz_unknowns(order);
  spec.free_params = ansatz_free_params(order);
  spec.xi = unknown_xi(order, params, options.form);
  if (mode == AnsatzMode::unknown) return spec;

  params.validate();
  if (!params.nonsingular() && !options.override_singular) {
    throw SingularParameters("beta*(gamma+omega^2) >= 0: xi has real zeros; pass an override to proceed");
  }
  Solution sol = closed_form_coefficients(order, params, free_values, options.symbolic_free);
  Bindings bindings(sol.assignment.begin(), sol.assignment.end());
  Poly solved = subst(spec.xi, bindings);
  std::vector<std::string> keep = {"v", "y", "mu", "nu"};
  for (auto& f : sol.free) keep.push_back(f);
  spec.xi = restrict_vars(solved, keep);
  return spec;
}

Poly bind_center(const AnsatzSpec& spec, const Params& params, const FreeValues& free_values) {
  std::map<std::string, Rational> values = {{"mu", params.mu}, {"nu", params.nu}};
  for (const auto& [name, value] : free_values) {
    if (spec.xi.vars()->contains(name)) values.emplace(name, value);
  }
  Poly bound = subst(spec.xi, values);
  return with_vars(bound, make_varset({"v", "y"}));
}

}  // namespace rogue
