#include "rogue/coeffsolve.hpp"

#include "rogue/residual.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace rogue {

namespace {

const std::vector<std::string> kCollected = {"v", "y", "mu", "nu"};

}  // namespace

CoeffSystem extract_system(const Poly& residual, const std::vector<std::string>& unknowns) {
  std::set<std::string> allowed(unknowns.begin(), unknowns.end());
  for (const auto& name : residual.used_variables()) {
    if (!allowed.count(name) && std::find(kCollected.begin(), kCollected.end(), name) == kCollected.end()) {
      throw UsageError("residual uses '" + name + "', which is neither collected nor an unknown");
    }
  }
  CoeffSystem sys;
  sys.unknowns = unknowns;
  sys.unknown_vars = make_varset(unknowns);
  for (const auto& name : kCollected) {
    if (residual.vars()->contains(name)) sys.outer.push_back(name);
  }
  for (auto& ct : collect(residual, sys.outer)) {
    sys.equations.push_back(with_vars(ct.coeff, sys.unknown_vars));
    sys.source_monomials.push_back(std::move(ct.outer));
  }
  return sys;
}

CoeffSystem build_numeric_system(int order, const Params& params, const FreeValues& free_values) {
  AnsatzSpec spec = build_xi(order, AnsatzMode::unknown, params);
  std::map<std::string, Rational> bound = {{"mu", params.mu}, {"nu", params.nu}};
  std::vector<std::string> unknowns;
  for (const auto& z : spec.unknowns) {
    auto it = free_values.find(z);
    if (it != free_values.end()) {
      bound.emplace(z, it->second);
    } else {
      unknowns.push_back(z);
    }
  }
  for (const auto& f : spec.free_params) {
    if (!bound.count(f)) throw UsageError("numeric solving needs a value for free parameter " + f);
  }
  Poly xi = subst(spec.xi, bound);
  std::vector<std::string> keep = {"v", "y"};
  keep.insert(keep.end(), unknowns.begin(), unknowns.end());
  xi = with_vars(xi, canonical_varset(keep));
  ResidualReport res = residual_numerator(xi, params);
  return extract_system(res.numerator, unknowns);
}

// ---------------------------------------------------------------------------
// Exact verification

VerificationReport verify_exact(const CoeffSystem& system, const Solution& solution) {
  Bindings bindings;
  for (const auto& [name, value] : solution.assignment) {
    if (!system.unknown_vars->contains(name)) continue;
    for (const auto& used : value.used_variables()) {
      if (!system.unknown_vars->contains(used)) {
        throw UsageError("value of " + name + " depends on '" + used +
                         "', which the system has collected; use verify_solution");
      }
    }
    bindings.emplace(name, with_vars(value, system.unknown_vars));
  }
  for (const auto& z : system.unknowns) {
    bool free = std::find(solution.free.begin(), solution.free.end(), z) != solution.free.end();
    if (!bindings.count(z) && !free) throw UsageError("solution leaves " + z + " unassigned");
  }
  VerificationReport report;
  report.route = "per-equation";
  report.outer = system.outer;
  report.equations_checked = system.equations.size();
  for (std::size_t i = 0; i < system.equations.size(); ++i) {
    Poly value = subst(system.equations[i], bindings);
    if (value.is_zero()) continue;
    ++report.failing;
    if (report.failures.size() < kMaxReportedFailures) {
      report.failures.push_back({system.source_monomials[i], to_string(value)});
    }
  }
  report.pass = report.failing == 0;
  return report;
}

VerificationReport verify_solution(const AnsatzSpec& unknown_spec, const Params& params, const Solution& solution) {
  if (unknown_spec.mode != AnsatzMode::unknown) throw UsageError("verify_solution needs an unknown-mode ansatz");
  for (const auto& z : unknown_spec.unknowns) {
    bool free = std::find(solution.free.begin(), solution.free.end(), z) != solution.free.end();
    if (!solution.assignment.count(z) && !free) throw UsageError("solution leaves " + z + " unassigned");
  }
  Bindings bindings;
  for (const auto& [name, value] : solution.assignment) bindings.emplace(name, with_vars(value, unknown_spec.xi.vars()));
  Poly xi = restrict_vars(subst(unknown_spec.xi, bindings), {"v", "y", "mu", "nu"});
  ResidualReport res = residual_numerator(xi, params);

  VerificationReport report;
  report.route = "residual";
  std::vector<std::string> leftover;
  for (const auto& name : res.numerator.vars()->names()) {
    if (std::find(kCollected.begin(), kCollected.end(), name) == kCollected.end()) leftover.push_back(name);
  }
  CoeffSystem sys = extract_system(res.numerator, leftover);
  report.outer = sys.outer;
  report.equations_checked = sys.equations.size();
  report.failing = sys.equations.size();
  for (std::size_t i = 0; i < sys.equations.size() && i < kMaxReportedFailures; ++i) {
    report.failures.push_back({sys.source_monomials[i], to_string(sys.equations[i])});
  }
  report.pass = report.failing == 0;
  return report;
}

// ---------------------------------------------------------------------------
// Numeric solving

Jacobian::Jacobian(const std::vector<Poly>& equations, const std::vector<std::size_t>& columns)
    : rows_(equations.size()), cols_(columns.size()) {
  entries_.reserve(rows_ * cols_);
  nonzero_.reserve(rows_ * cols_);
  for (const Poly& eq : equations) {
    for (std::size_t c : columns) {
      Poly d = diff(eq, c);
      nonzero_.push_back(!d.is_zero());
      entries_.emplace_back(d);
    }
  }
}

Eigen::MatrixXd Jacobian::evaluate(std::span<const double> point) const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(Eigen::Index(rows_), Eigen::Index(cols_));
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      std::size_t k = r * cols_ + c;
      if (nonzero_[k]) J(Eigen::Index(r), Eigen::Index(c)) = entries_[k](point);
    }
  }
  return J;
}

Jacobian jacobian(const CoeffSystem& system) {
  std::vector<std::size_t> columns(system.unknown_vars->size());
  for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
  return Jacobian(system.equations, columns);
}

Poly scale_variables(const Poly& p, const std::vector<Rational>& scale) {
  if (scale.size() != p.num_vars()) throw UsageError("scale_variables: one scale per variable expected");
  std::vector<std::pair<Monomial, Rational>> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    Rational c = p.coeff(i);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j]) c *= pow(scale[j], e[j]);
    }
    terms.emplace_back(Monomial(e.begin(), e.end()), std::move(c));
  }
  return Poly::from_terms(p.vars(), std::move(terms));
}

Poly strip_monomial_content(const Poly& p) {
  if (p.is_zero()) return p;
  Monomial low(p.exponents(0).begin(), p.exponents(0).end());
  for (std::size_t i = 1; i < p.size(); ++i) {
    auto e = p.exponents(i);
    for (std::size_t j = 0; j < low.size(); ++j) low[j] = std::min(low[j], e[j]);
  }
  if (std::all_of(low.begin(), low.end(), [](Exponent x) { return x == 0; })) return p;
  std::vector<std::pair<Monomial, Rational>> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    Monomial m(e.begin(), e.end());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] -= low[j];
    terms.emplace_back(std::move(m), p.coeff(i));
  }
  return Poly::from_terms(p.vars(), std::move(terms));
}

namespace {

// Equations and Jacobian over the unknowns that actually appear, in the
// scaled variables w_j = z_j / scale_j.
class CompiledSystem {
 public:
  CompiledSystem(const CoeffSystem& system, const std::vector<Rational>& scale, const SolveOptions& options)
      : dim_(system.unknown_vars->size()) {
    std::vector<Poly> eqs;
    for (const Poly& eq : system.equations) {
      Poly e = scale_variables(eq, scale);
      if (options.strip_monomial_content) e = strip_monomial_content(e);
      if (options.normalize) e *= Rational(1) / max_abs_coefficient(e);
      eqs.push_back(std::move(e));
    }
    for (std::size_t j = 0; j < dim_; ++j) {
      bool used = std::any_of(eqs.begin(), eqs.end(), [&](const Poly& e) { return e.uses(j); });
      (used ? active_ : inactive_).push_back(j);
    }
    for (const Poly& e : eqs) equations_.emplace_back(e);
    jac_ = Jacobian(eqs, active_);
  }

  const std::vector<std::size_t>& active() const { return active_; }
  const std::vector<std::size_t>& inactive() const { return inactive_; }

  Eigen::VectorXd residual(const std::vector<double>& w) const {
    Eigen::VectorXd f(Eigen::Index(equations_.size()));
    for (std::size_t i = 0; i < equations_.size(); ++i) f(Eigen::Index(i)) = equations_[i](w);
    return f;
  }
  Eigen::MatrixXd jacobian(const std::vector<double>& w) const { return jac_.evaluate(w); }

 private:
  std::size_t dim_;
  std::vector<std::size_t> active_, inactive_;
  std::vector<FloatPoly> equations_;
  Jacobian jac_;
};

// Nearest power of two to |x|, 1 for zero.
Rational power_of_two_scale(double x) {
  if (x == 0 || !std::isfinite(x)) return 1;
  int e = int(std::lround(std::log2(std::fabs(x))));
  Rational r = 1;
  if (e >= 0) mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), unsigned(e));
  else mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), unsigned(-e));
  return r;
}

// Residual and Jacobian over the active coordinates of x; inactive
// coordinates are carried along unchanged.
struct LmProblem {
  std::function<Eigen::VectorXd(const std::vector<double>&)> residual;
  std::function<Eigen::MatrixXd(const std::vector<double>&)> jacobian;
  std::vector<std::size_t> active;
};

// Accepts a step only when it lowers ||F||; otherwise raises the damping.
void levenberg_marquardt(const LmProblem& problem, std::vector<double>& x, const SolveOptions& options,
                         SolveResult& result) {
  const auto& active = problem.active;
  const Eigen::Index n = Eigen::Index(active.size());
  Eigen::VectorXd f = problem.residual(x);
  double norm = f.norm();
  double lambda = options.initial_damping;
  result.status = "max_iter";
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    if (norm <= options.tol) {
      result.status = "converged";
      break;
    }
    Eigen::MatrixXd J = problem.jacobian(x);
    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * f;
    double diag_floor = 1e-12 * std::max(n ? A.diagonal().maxCoeff() : 0.0, 1e-300);
    bool accepted = false;
    while (lambda <= options.damping_cap) {
      Eigen::MatrixXd M = A;
      for (Eigen::Index i = 0; i < n; ++i) M(i, i) += lambda * std::max(A(i, i), diag_floor);
      Eigen::VectorXd step = M.ldlt().solve(-g);
      std::vector<double> trial = x;
      for (Eigen::Index i = 0; i < n; ++i) trial[active[std::size_t(i)]] += step(i);
      Eigen::VectorXd ft = problem.residual(trial);
      double tn = ft.norm();
      if (std::isfinite(tn) && tn < norm) {
        x = std::move(trial);
        f = std::move(ft);
        norm = tn;
        lambda = std::max(lambda / options.damping_factor, 1e-15);
        accepted = true;
        break;
      }
      lambda *= options.damping_factor;
    }
    if (!accepted) {
      result.status = "stalled";
      break;
    }
  }
  if (norm <= options.tol) result.status = "converged";
  result.iterations = iter;
  result.residual_norm = norm;
  result.converged = norm <= options.tol;
  if (n > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(problem.jacobian(x));
    const auto& sv = svd.singularValues();
    double smax = sv.size() ? sv(0) : 0.0;
    result.jacobian_rank = int((sv.array() > 1e-10 * smax).count());
  }
}

}  // namespace

SolveResult solve_numeric(const CoeffSystem& system, const std::map<std::string, double>& seed,
                          const SolveOptions& options) {
  const VarSet& vars = *system.unknown_vars;
  std::vector<double> x(vars.size(), 0.0);
  SolveResult result;
  for (std::size_t j = 0; j < vars.size(); ++j) {
    auto it = seed.find(vars.name(j));
    if (it == seed.end()) throw UsageError("seed lacks a value for " + vars.name(j));
    x[j] = it->second;
    result.start_point[vars.name(j)] = it->second;
  }

  std::vector<Rational> scale(vars.size(), Rational(1));
  if (options.scale_unknowns) {
    for (std::size_t j = 0; j < vars.size(); ++j) scale[j] = power_of_two_scale(x[j]);
  }
  std::vector<double> sd(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    sd[j] = to_double(scale[j]);
    x[j] /= sd[j];
  }
  CompiledSystem sys(system, scale, options);
  for (std::size_t j : sys.inactive()) result.unconstrained.push_back(vars.name(j));
  LmProblem problem{[&](const std::vector<double>& w) { return sys.residual(w); },
                    [&](const std::vector<double>& w) { return sys.jacobian(w); }, sys.active()};
  levenberg_marquardt(problem, x, options, result);
  for (std::size_t j = 0; j < vars.size(); ++j) result.assignment[vars.name(j)] = x[j] * sd[j];
  return result;
}

// ---------------------------------------------------------------------------
// Sampled system

namespace {

struct Dual {
  double a = 0, d = 0;
};
inline Dual operator+(Dual x, Dual y) { return {x.a + y.a, x.d + y.d}; }
inline Dual operator-(Dual x, Dual y) { return {x.a - y.a, x.d - y.d}; }
inline Dual operator*(Dual x, Dual y) { return {x.a * y.a, x.a * y.d + x.d * y.a}; }
inline Dual operator*(double c, Dual x) { return {c * x.a, c * x.d}; }
inline Dual operator/(Dual x, Dual y) { return {x.a / y.a, (x.d * y.a - x.a * y.d) / (y.a * y.a)}; }
inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.d; }

constexpr int kV = 7, kY = 3;

// Truncated bivariate series, cell (a, b) = coefficient of dv^a dy^b.
template <class T>
using Series = std::array<T, kV * kY>;

template <class T>
Series<T> series_mul(const Series<T>& x, const Series<T>& y) {
  Series<T> r{};
  for (int a1 = 0; a1 < kV; ++a1) {
    for (int b1 = 0; b1 < kY; ++b1) {
      const T& xv = x[a1 * kY + b1];
      for (int a2 = 0; a1 + a2 < kV; ++a2) {
        for (int b2 = 0; b1 + b2 < kY; ++b2) r[(a1 + a2) * kY + b1 + b2] = r[(a1 + a2) * kY + b1 + b2] + xv * y[a2 * kY + b2];
      }
    }
  }
  return r;
}

// R[u] for u = c (ln xi)_vv, from the Taylor table of xi at a point.
template <class T>
T reduced_from_table(const Series<T>& xi, double alpha, double beta, double k, double c) {
  const T x0 = xi[0];
  Series<T> e = xi;
  e[0] = T{};
  for (auto& cell : e) cell = cell / x0;
  // ln(1 + e) = e - e^2/2 + ...; e has no constant term, so e^9 vanishes.
  Series<T> log = e, power = e;
  for (int m = 2; m <= 8; ++m) {
    power = series_mul(power, e);
    double sign = (m % 2 == 0) ? -1.0 : 1.0;
    for (std::size_t i = 0; i < log.size(); ++i) log[i] = log[i] + (sign / m) * power[i];
  }
  auto deriv = [&](int a, int b) {
    double f = 1;
    for (int i = 2; i <= a; ++i) f *= i;
    for (int i = 2; i <= b; ++i) f *= i;
    return (c * f) * log[a * kY + b];
  };
  T u = deriv(2, 0), u_v = deriv(3, 0), u_vv = deriv(4, 0), u_4v = deriv(6, 0), u_yy = deriv(2, 2);
  return alpha * (2.0 * (u_v * u_v) + 2.0 * (u * u_vv)) + beta * u_4v + k * u_vv - u_yy;
}

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

SampledSystem::SampledSystem(const Poly& xi, std::vector<std::string> unknowns, const Params& params,
                             std::vector<std::array<double, 2>> points)
    : unknowns_(std::move(unknowns)), points_(std::move(points)) {
  params.validate();
  alpha_ = to_double(params.alpha);
  beta_ = to_double(params.beta);
  k_ = to_double(params.k_sum());
  c_ = to_double(6 * params.beta / params.alpha);
  const VarSet& vars = *xi.vars();
  const std::size_t iv = vars.index("v"), iy = vars.index("y");
  std::vector<std::size_t> unknown_index;
  for (const auto& z : unknowns_) unknown_index.push_back(vars.index(z));
  for (const auto& name : xi.used_variables()) {
    if (name != "v" && name != "y" && std::find(unknowns_.begin(), unknowns_.end(), name) == unknowns_.end()) {
      throw UsageError("sampled system: xi uses unbound variable '" + name + "'");
    }
  }
  tables_.assign(points_.size(), std::vector<Table>(unknowns_.size() + 1, Table{}));
  for (std::size_t t = 0; t < xi.size(); ++t) {
    auto e = xi.exponents(t);
    std::size_t slot = 0;
    for (std::size_t j = 0; j < unknown_index.size(); ++j) {
      Exponent ej = e[unknown_index[j]];
      if (ej == 0) continue;
      if (ej > 1 || slot != 0) throw UsageError("sampled system: xi is not affine in the unknowns");
      slot = j + 1;
    }
    const double c = to_double(xi.coeff(t));
    const int ev = e[iv], ey = e[iy];
    for (std::size_t p = 0; p < points_.size(); ++p) {
      const double v0 = points_[p][0], y0 = points_[p][1];
      Table& table = tables_[p][slot];
      for (int a = 0; a <= std::min(ev, kV - 1); ++a) {
        const double fv = binomial(ev, a) * std::pow(v0, ev - a);
        for (int b = 0; b <= std::min(ey, kY - 1); ++b) {
          table[std::size_t(a * kY + b)] += c * fv * binomial(ey, b) * std::pow(y0, ey - b);
        }
      }
    }
  }
}

SampledSystem::Table SampledSystem::table_at(std::size_t point, std::span<const double> z) const {
  Table t = tables_[point][0];
  for (std::size_t j = 0; j < z.size(); ++j) {
    const Table& tj = tables_[point][j + 1];
    for (std::size_t i = 0; i < kCells; ++i) t[i] += z[j] * tj[i];
  }
  return t;
}

Eigen::VectorXd SampledSystem::residual(std::span<const double> z) const {
  if (z.size() != unknowns_.size()) throw UsageError("sampled system: wrong number of unknowns");
  Eigen::VectorXd f(Eigen::Index(points_.size()));
  for (std::size_t p = 0; p < points_.size(); ++p) {
    Table t = table_at(p, z);
    Series<double> s;
    std::copy(t.begin(), t.end(), s.begin());
    f(Eigen::Index(p)) = reduced_from_table(s, alpha_, beta_, k_, c_);
  }
  return f;
}

Eigen::MatrixXd SampledSystem::jacobian(std::span<const double> z) const {
  if (z.size() != unknowns_.size()) throw UsageError("sampled system: wrong number of unknowns");
  Eigen::MatrixXd J(Eigen::Index(points_.size()), Eigen::Index(unknowns_.size()));
#pragma omp parallel for schedule(dynamic)
  for (long long pi = 0; pi < static_cast<long long>(points_.size()); ++pi) {
    const std::size_t p = std::size_t(pi);
    Table t = table_at(p, z);
    for (std::size_t j = 0; j < unknowns_.size(); ++j) {
      const Table& dir = tables_[p][j + 1];
      Series<Dual> s;
      for (std::size_t i = 0; i < kCells; ++i) s[i] = Dual{t[i], dir[i]};
      J(Eigen::Index(p), Eigen::Index(j)) = value_of(reduced_from_table(s, alpha_, beta_, k_, c_));
    }
  }
  return J;
}

SampledSystem build_sampled_system(int order, const Params& params, const FreeValues& free_values, std::size_t count,
                                   std::uint64_t seed, double radius) {
  AnsatzSpec spec = build_xi(order, AnsatzMode::unknown, params);
  std::map<std::string, Rational> bound = {{"mu", params.mu}, {"nu", params.nu}};
  std::vector<std::string> unknowns;
  for (const auto& z : spec.unknowns) {
    auto it = free_values.find(z);
    if (it != free_values.end()) {
      bound.emplace(z, it->second);
    } else {
      unknowns.push_back(z);
    }
  }
  for (const auto& f : spec.free_params) {
    if (!bound.count(f)) throw UsageError("numeric solving needs a value for free parameter " + f);
  }
  Poly xi = subst(spec.xi, bound);
  std::vector<std::array<double, 2>> points(count);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-radius, radius);
  for (auto& p : points) p = {coord(rng), coord(rng)};
  return SampledSystem(xi, std::move(unknowns), params, std::move(points));
}

SolveResult solve_sampled(const SampledSystem& system, const std::map<std::string, double>& seed,
                          const SolveOptions& options) {
  const auto& names = system.unknowns();
  const std::size_t n = names.size();
  SolveResult result;
  std::vector<double> w(n), sd(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    auto it = seed.find(names[j]);
    if (it == seed.end()) throw UsageError("seed lacks a value for " + names[j]);
    result.start_point[names[j]] = it->second;
    if (options.scale_unknowns) sd[j] = to_double(power_of_two_scale(it->second));
    w[j] = it->second / sd[j];
  }
  auto unscale = [&](const std::vector<double>& ws) {
    std::vector<double> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = ws[j] * sd[j];
    return z;
  };
  // Columns of J in the scaled unknowns; columns that stay zero belong to
  // unknowns the samples cannot see.
  Eigen::MatrixXd J0 = system.jacobian(unscale(w));
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < n; ++j) {
    if (J0.col(Eigen::Index(j)).cwiseAbs().maxCoeff() > 0) {
      active.push_back(j);
    } else {
      result.unconstrained.push_back(names[j]);
    }
  }
  LmProblem problem{[&](const std::vector<double>& ws) { return system.residual(unscale(ws)); },
                    [&](const std::vector<double>& ws) {
                      Eigen::MatrixXd J = system.jacobian(unscale(ws));
                      Eigen::MatrixXd Ja(J.rows(), Eigen::Index(active.size()));
                      for (std::size_t c = 0; c < active.size(); ++c) {
                        Ja.col(Eigen::Index(c)) = J.col(Eigen::Index(active[c])) * sd[active[c]];
                      }
                      return Ja;
                    },
                    active};
  levenberg_marquardt(problem, w, options, result);
  for (std::size_t j = 0; j < n; ++j) result.assignment[names[j]] = w[j] * sd[j];
  return result;
}

std::map<std::string, double> closed_form_values(int order, const Params& params, const FreeValues& free_values) {
  Solution sol = closed_form_coefficients(order, params, free_values, false);
  std::map<std::string, Rational> point = {{"mu", params.mu}, {"nu", params.nu}};
  std::map<std::string, double> out;
  for (const auto& [name, value] : sol.assignment) {
    if (free_values.count(name)) continue;
    out[name] = to_double(eval_exact(value, point));
  }
  return out;
}

std::map<std::string, double> perturbed_seed(int order, const Params& params, const FreeValues& free_values,
                                             double fraction, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-fraction, fraction);
  auto values = closed_form_values(order, params, free_values);
  for (auto& [name, value] : values) value *= 1.0 + jitter(rng);
  return values;
}

}  // namespace rogue
