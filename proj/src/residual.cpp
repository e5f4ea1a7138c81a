#include "rogue/residual.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace rogue {

// ---------------------------------------------------------------------------
// PolyRatio

PolyRatio::PolyRatio(Poly num, Poly base, unsigned power)
    : num_(std::move(num)), base_(std::move(base)), power_(power) {
  if (!same_vars(num_.vars(), base_.vars())) throw UsageError("ratio parts live over different variable sets");
  if (base_.is_zero()) throw UsageError("zero denominator");
}

PolyRatio::PolyRatio(Poly num, Poly den) : PolyRatio(std::move(num), std::move(den), 1) {}

PolyRatio PolyRatio::power_of(Poly num, Poly base, unsigned power) {
  return PolyRatio(std::move(num), std::move(base), power);
}

PolyRatio PolyRatio::polynomial(Poly p) {
  Poly one = Poly::constant(p.vars(), Rational(1));
  return PolyRatio(std::move(p), std::move(one), 0);
}

Poly PolyRatio::den() const { return pow(base_, power_); }

PolyRatio PolyRatio::flattened() const {
  if (power_ <= 1) return *this;
  return PolyRatio(num_, den(), 1);
}

PolyRatio& PolyRatio::operator*=(const Rational& c) {
  num_ *= c;
  return *this;
}

namespace {

struct Aligned {
  Poly a, b, base;
  unsigned power;
};

// Rewrites both ratios over one denominator base^power.
Aligned align(const PolyRatio& x, const PolyRatio& y) {
  if (x.power() == 0 && y.power() == 0) return {x.num(), y.num(), x.base(), 0};
  if (x.power() == 0) return {mul(x.num(), y.den()), y.num(), y.base(), y.power()};
  if (y.power() == 0) return {x.num(), mul(y.num(), x.den()), x.base(), x.power()};
  if (x.base() == y.base()) {
    unsigned m = std::max(x.power(), y.power());
    Poly a = x.power() < m ? mul(x.num(), pow(x.base(), m - x.power())) : x.num();
    Poly b = y.power() < m ? mul(y.num(), pow(y.base(), m - y.power())) : y.num();
    return {std::move(a), std::move(b), x.base(), m};
  }
  Poly dx = x.den(), dy = y.den();
  return {mul(x.num(), dy), mul(y.num(), dx), mul(dx, dy), 1};
}

}  // namespace

PolyRatio operator+(const PolyRatio& a, const PolyRatio& b) {
  Aligned al = align(a, b);
  return PolyRatio::power_of(al.a + al.b, std::move(al.base), al.power);
}

PolyRatio operator-(const PolyRatio& a, const PolyRatio& b) {
  Aligned al = align(a, b);
  return PolyRatio::power_of(al.a - al.b, std::move(al.base), al.power);
}

PolyRatio operator*(const PolyRatio& a, const PolyRatio& b) {
  if (a.power() == 0) return PolyRatio::power_of(mul(a.num(), b.num()), b.base(), b.power());
  if (b.power() == 0) return PolyRatio::power_of(mul(a.num(), b.num()), a.base(), a.power());
  if (a.base() == b.base()) return PolyRatio::power_of(mul(a.num(), b.num()), a.base(), a.power() + b.power());
  return PolyRatio(mul(a.num(), b.num()), mul(a.den(), b.den()));
}

PolyRatio operator*(const Rational& c, PolyRatio a) { return a *= c; }

bool equivalent(const PolyRatio& a, const PolyRatio& b) {
  return mul(a.num(), b.den()) == mul(b.num(), a.den());
}

PolyRatio ratio_diff(const PolyRatio& r, std::string_view var) {
  if (r.power() == 0) return PolyRatio::polynomial(diff(r.num(), var));
  const Poly& base = r.base();
  Poly num = mul(diff(r.num(), var), base) - Rational(r.power()) * mul(r.num(), diff(base, var));
  return PolyRatio::power_of(std::move(num), base, r.power() + 1);
}

double eval_float(const PolyRatio& r, std::span<const double> point) {
  double n = eval_float(r.num(), point);
  if (n == 0.0) return 0.0;
  return n / std::pow(eval_float(r.base(), point), static_cast<double>(r.power()));
}

// ---------------------------------------------------------------------------
// Reduced operator

PolyRatio ReducedOperator::apply(const PolyRatio& u) const {
  PolyRatio u_v = ratio_diff(u, "v");
  PolyRatio u_vv = ratio_diff(u_v, "v");
  PolyRatio u_vvvv = ratio_diff(ratio_diff(u_vv, "v"), "v");
  PolyRatio u_yy = ratio_diff(ratio_diff(u, "y"), "y");
  PolyRatio nonlinear = Rational(2 * alpha) * (u_v * u_v + u * u_vv);
  return nonlinear + beta * u_vvvv + k_sum * u_vv - u_yy;
}

Poly ReducedOperator::apply(const Poly& u) const {
  PolyRatio r = apply(PolyRatio::polynomial(u));
  return r.num();
}

std::string ReducedOperator::describe() const {
  return to_string(alpha) + "*(2*u_v^2 + 2*u*u_vv) + " + to_string(beta) + "*u_vvvv + " + to_string(k_sum) +
         "*u_vv - u_yy";
}

ReducedOperator reduce_pde(const Params& params) {
  params.validate();
  return {params.alpha, params.beta, params.k_sum()};
}

PolyRatio u_from_xi(const Poly& xi, const Params& params) {
  if (xi.is_zero()) throw UsageError("xi must be nonzero");
  params.validate();
  const Rational scale = 6 * params.beta / params.alpha;
  Poly xi_v = diff(xi, "v");
  Poly num = mul(xi, diff(xi_v, "v")) - mul(xi_v, xi_v);
  num *= scale;
  return PolyRatio::power_of(std::move(num), xi, 2);
}

std::vector<std::pair<Monomial, Rational>> ResidualReport::worst_monomials(std::size_t count) const {
  std::vector<std::size_t> idx(numerator.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return abs(numerator.coeff(a)) > abs(numerator.coeff(b));
  });
  std::vector<std::pair<Monomial, Rational>> out;
  for (std::size_t i = 0; i < std::min(count, idx.size()); ++i) {
    auto e = numerator.exponents(idx[i]);
    out.emplace_back(Monomial(e.begin(), e.end()), numerator.coeff(idx[i]));
  }
  return out;
}

ResidualReport residual_numerator(const Poly& xi, const Params& params) {
  ReducedOperator op = reduce_pde(params);
  PolyRatio r = op.apply(u_from_xi(xi, params));
  Poly numerator(xi.vars());
  if (r.power() == 0 || r.base() == xi) {
    if (r.power() > kClearingPower) throw std::logic_error("residual denominator exceeds xi^6");
    numerator = r.num();
    if (r.power() < kClearingPower) numerator = mul(numerator, pow(xi, kClearingPower - r.power()));
  } else {
    auto q = divide_exact(mul(r.num(), pow(xi, kClearingPower)), r.den());
    if (!q) throw std::logic_error("residual denominator does not divide xi^6");
    numerator = std::move(*q);
  }
  ResidualReport report;
  report.identically_zero = numerator.is_zero();
  report.nonzero_monomial_count = numerator.size();
  report.max_coefficient_magnitude = max_abs_coefficient(numerator);
  report.numerator = std::move(numerator);
  return report;
}

// ---------------------------------------------------------------------------
// Typeset form

std::vector<PrintedTerm> typeset_form_terms(const Poly& xi, const Params& params) {
  params.validate();
  const Rational b = params.beta, k = params.k_sum();
  auto d = [&](unsigned nv, unsigned ny) { return diff(diff(xi, "v", nv), "y", ny); };
  const Poly X = xi, Xv = d(1, 0), Xvv = d(2, 0), X4v = d(4, 0), X6v = d(6, 0);
  const Poly Xy = d(0, 1), Xyy = d(0, 2), Xvy = d(1, 1), Xvvy = d(2, 1), Xvyy = d(1, 2);
  auto prod = [](std::initializer_list<const Poly*> fs) {
    Poly p = Poly::constant((*fs.begin())->vars(), Rational(1));
    for (const Poly* f : fs) p = mul(p, *f);
    return p;
  };
  const Poly X2 = mul(X, X), X3 = mul(X2, X), Xv2 = mul(Xv, Xv);
  std::vector<PrintedTerm> t;
  auto add = [&](std::string label, const Rational& c, Poly p) { t.push_back({std::move(label), c * std::move(p)}); };
  add("beta*xi^3*xi_vvvvvv", b, prod({&X3, &X6v}));
  add("k*xi^3*xi_vvvv", k, prod({&X3, &X4v}));
  add("-xi^3*xi_vvy", -1, prod({&X3, &Xvvy}));
  add("-3beta*xi^2*xi_vv*xi_vvvv", -3 * b, prod({&X2, &Xvv, &X4v}));
  add("-3k*xi^2*xi_vv^2", -3 * k, prod({&X2, &Xvv, &Xvv}));
  add("xi^2*xi_vv*xi_yy", 1, prod({&X2, &Xvv, &Xyy}));
  add("-6beta*xi^2*xi_v*xi_vvvv", -6 * b, prod({&X2, &Xv, &X4v}));
  add("-4k*xi^2*xi_v*xi_vv", -4 * k, prod({&X2, &Xv, &Xvv}));
  add("2*xi^2*xi_v*xi_vyy", 2, prod({&X2, &Xv, &Xvyy}));
  add("2beta*xi^2*xi_vv^2", 2 * b, prod({&X2, &Xvv, &Xvv}));
  add("2*xi^2*xi_vy^2", 2, prod({&X2, &Xvy, &Xvy}));
  add("18beta*xi*xi_v^2*xi_vvvv", 18 * b, prod({&X, &Xv2, &X4v}));
  add("12k*xi*xi_v^2*xi_vv", 12 * k, prod({&X, &Xv2, &Xvv}));
  add("-6beta*xi*xi_vv^3", -6 * b, prod({&X, &Xvv, &Xvv, &Xvv}));
  add("-2*xi*xi_yy*xi_v^2", -2, prod({&X, &Xyy, &Xv2}));
  add("-24beta*xi_v^3*xi_vv", -24 * b, prod({&Xv2, &Xv, &Xvv}));
  add("18beta*xi_v^2*xi_vv^2", 18 * b, prod({&Xv2, &Xvv, &Xvv}));
  add("-6k*xi_v^4", -6 * k, prod({&Xv2, &Xv2}));
  add("2*xi^2*xi_y*xi_vvy", 2, prod({&X2, &Xy, &Xvvy}));
  add("-8*xi*xi_y*xi_v*xi_vy", -8, prod({&X, &Xy, &Xv, &Xvy}));
  add("6*xi_y^2*xi_v^2", 6, prod({&Xy, &Xy, &Xv2}));
  add("-2*xi*xi_y^2*xi_vv", -2, prod({&X, &Xy, &Xy, &Xvv}));
  return t;
}

Poly typeset_form(const Poly& xi, const Params& params) {
  Poly sum(xi.vars());
  for (auto& term : typeset_form_terms(xi, params)) sum += term.value;
  return sum;
}

namespace {

// xi^4 R[u] / (6 beta / alpha): the derived counterpart of the typeset form.
Poly derived_degree4(const Poly& xi, const Params& params) {
  Poly n6 = residual_numerator(xi, params).numerator;
  auto q = divide_exact(n6, mul(xi, xi));
  if (!q) throw std::logic_error("residual numerator is not divisible by xi^2");
  return *q * Rational(params.alpha / (6 * params.beta));
}

Poly random_probe(const VarSetPtr& vars, std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-5, 5);
  std::vector<std::pair<Monomial, Rational>> terms;
  for (unsigned i = 0; i <= 3; ++i) {
    for (unsigned j = 0; i + j <= 3; ++j) {
      Monomial m = {static_cast<Exponent>(i), static_cast<Exponent>(j)};
      terms.emplace_back(m, Rational(coef(rng)));
    }
  }
  terms.emplace_back(Monomial{0, 0}, Rational(11));
  return Poly::from_terms(vars, std::move(terms));
}

}  // namespace

TypesetFormReconciliation reconcile_typeset_form(const Params& params, unsigned probes, unsigned seed) {
  TypesetFormReconciliation out;
  std::mt19937 rng(seed);
  VarSetPtr vars = make_varset({"v", "y"});
  std::vector<Poly> xis;
  for (unsigned i = 0; i < probes; ++i) xis.push_back(random_probe(vars, rng));
  out.probes = probes;

  std::optional<Rational> scale;
  bool proportional = true;
  for (std::size_t i = 0; i < xis.size(); ++i) {
    Poly derived = derived_degree4(xis[i], params);
    Poly printed = typeset_form(xis[i], params);
    if (i == 0) out.discrepancy_monomials = (printed - derived).size();
    if (derived.is_zero() || printed.is_zero()) {
      proportional = proportional && derived.is_zero() && printed.is_zero();
      continue;
    }
    Rational s = printed.coeff(0) / derived.coeff(0);
    if (!scale) scale = s;
    if (*scale != s || printed != s * derived) proportional = false;
  }
  out.proportional = proportional;
  if (proportional && scale) out.scale = to_string(*scale);

  Poly order1 = build_xi(1, AnsatzMode::solved, params, {}, {.override_singular = true}).xi;
  out.vanishes_on_order1 = typeset_form(order1, params).is_zero();

  // Fit per-term multipliers on sampled points of several probes.
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  std::vector<std::string> labels;
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  for (const Poly& xi : xis) {
    auto terms = typeset_form_terms(xi, params);
    if (labels.empty()) {
      for (auto& t : terms) labels.push_back(t.label);
    }
    std::vector<FloatPoly> compiled;
    for (auto& t : terms) compiled.emplace_back(t.value);
    FloatPoly target(derived_degree4(xi, params));
    for (int s = 0; s < 40; ++s) {
      double pt[2] = {coord(rng), coord(rng)};
      std::vector<double> row;
      for (auto& c : compiled) row.push_back(c(pt));
      rows.push_back(std::move(row));
      rhs.push_back(target(pt));
    }
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(labels.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < labels.size(); ++c) A(Eigen::Index(r), Eigen::Index(c)) = rows[r][c];
    b(Eigen::Index(r)) = rhs[r];
  }
  Eigen::VectorXd s = A.completeOrthogonalDecomposition().solve(b);
  out.fit_residual = (A * s - b).norm() / std::max(b.norm(), 1e-300);
  for (std::size_t c = 0; c < labels.size(); ++c) out.term_multipliers.emplace_back(labels[c], s(Eigen::Index(c)));

  if (proportional) {
    out.notes.push_back("typeset form equals the derived form times " + out.scale);
  } else {
    out.notes.push_back("typeset form is not proportional to the derived form");
  }
  out.notes.push_back(out.vanishes_on_order1 ? "typeset form vanishes on the solved order-1 ansatz"
                                             : "typeset form does not vanish on the solved order-1 ansatz");
  if (out.fit_residual > 1e-8) {
    out.notes.push_back("no rescaling of the typeset terms reproduces the derived form; terms are missing");
  }
  return out;
}

}  // namespace rogue
