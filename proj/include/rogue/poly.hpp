#pragma once

#include "rogue/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rogue {

using Exponent = std::uint16_t;
using Monomial = std::vector<Exponent>;
using MonomialView = std::span<const Exponent>;

/// Ordered set of variable identifiers. The order fixes exponent-vector
/// layout, canonical printing and collection order.
class VarSet {
 public:
  explicit VarSet(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws UsageError for an unknown identifier.
  std::size_t index(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  friend bool operator==(const VarSet& a, const VarSet& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

using VarSetPtr = std::shared_ptr<const VarSet>;

/// Keeps the order given.
VarSetPtr make_varset(std::vector<std::string> names);

/// Orders names canonically: v, y, mu, nu, z0, z1, z10 ... z69, then any
/// other identifier lexicographically.
VarSetPtr canonical_varset(std::vector<std::string> names);

/// Identifier of the i-th unknown coefficient, e.g. zeta_name(21) == "z21".
std::string zeta_name(int index);

bool same_vars(const VarSetPtr& a, const VarSetPtr& b);

/// Graded-lexicographic order, descending: higher total degree first, ties
/// broken by the first differing exponent (larger first).
bool grlex_greater(MonomialView a, MonomialView b);

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept sorted in descending graded-lex order with no zero
/// coefficients, so equal polynomials over the same VarSet have identical
/// storage.
class Poly {
 public:
  Poly();
  explicit Poly(VarSetPtr vars);

  static Poly constant(VarSetPtr vars, const Rational& c);
  static Poly variable(VarSetPtr vars, std::string_view name);
  static Poly term(VarSetPtr vars, MonomialView exps, const Rational& c);
  /// Combines duplicate monomials and drops zero coefficients.
  static Poly from_terms(VarSetPtr vars, std::vector<std::pair<Monomial, Rational>> terms);

  const VarSetPtr& vars() const noexcept { return vars_; }
  std::size_t num_vars() const noexcept { return vars_->size(); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  bool is_constant() const;

  MonomialView exponents(std::size_t i) const {
    return {exps_.data() + i * num_vars(), num_vars()};
  }
  const Rational& coeff(std::size_t i) const { return coeffs_[i]; }

  Rational coefficient_of(MonomialView m) const;
  unsigned total_degree() const;
  /// Componentwise maximum exponent over all terms.
  Monomial max_exponents() const;
  bool uses(std::size_t var) const;
  std::vector<std::string> used_variables() const;

  Poly operator-() const;
  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  Poly& operator*=(const Poly& other);
  Poly& operator*=(const Rational& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
  friend Poly operator*(const Rational& c, Poly a) { return a *= c; }
  friend bool operator==(const Poly& a, const Poly& b);

 private:
  friend class PolyAccess;

  VarSetPtr vars_;
  std::vector<Exponent> exps_;
  std::vector<Rational> coeffs_;
};

enum class ArithOp { add, sub, mul };

/// Usage error when the operands live over different VarSets.
Poly poly_arith(const Poly& a, const Poly& b, ArithOp op);

/// Product kernel: integer-scaled, packed monomial keys, OpenMP over the
/// outer operand. Falls back to unpacked keys when exponents need more than
/// 128 bits.
Poly mul(const Poly& a, const Poly& b);

/// Serial reference product: plain term-by-term accumulation of rationals.
Poly mul_serial(const Poly& a, const Poly& b);

/// Repeated squaring.
Poly pow(const Poly& a, unsigned k);

Poly diff(const Poly& p, std::size_t var, unsigned order = 1);
Poly diff(const Poly& p, std::string_view var, unsigned order = 1);

struct CollectedTerm {
  Monomial outer;  // exponents of the outer variables, in outer order
  Poly coeff;      // over the same VarSet; outer exponents are zero
};

/// Groups p by the monomials of the outer variables. Entries appear in
/// descending graded-lex order of the outer monomial; no entry is zero.
std::vector<CollectedTerm> collect(const Poly& p, std::span<const std::string> outer);

/// Variable -> replacement, each replacement over the same VarSet as the
/// target polynomial.
using Bindings = std::map<std::string, Poly>;

Poly subst(const Poly& p, const Bindings& bindings);
Poly subst(const Poly& p, const std::map<std::string, Rational>& values);

/// Re-expresses p over another VarSet. Throws UsageError if p uses a
/// variable the target lacks.
Poly with_vars(const Poly& p, VarSetPtr vars);

/// Shrinks the VarSet to the canonically ordered set of used variables
/// plus `keep`.
Poly restrict_vars(const Poly& p, std::vector<std::string> keep = {});

Rational eval_exact(const Poly& p, std::span<const Rational> point);
Rational eval_exact(const Poly& p, const std::map<std::string, Rational>& point);

/// The exact-to-float boundary: coefficients are rounded to nearest and
/// the sum is accumulated in extended precision.
double eval_float(const Poly& p, std::span<const double> point);
double eval_float(const Poly& p, const std::map<std::string, double>& point);

/// Quotient when b divides a exactly, otherwise nullopt.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);

Rational max_abs_coefficient(const Poly& p);

/// Canonical text form: descending graded-lex order, coefficients as "p/q".
std::string to_string(const Poly& p);
std::string monomial_string(const VarSet& vars, MonomialView exps);

/// Parses expressions over + - * ^ ( ) with rational literals and the
/// identifiers of `vars`.
Poly parse_poly(const VarSetPtr& vars, std::string_view text);

/// Polynomial with float coefficients compiled once for repeated evaluation.
class FloatPoly {
 public:
  FloatPoly() = default;
  explicit FloatPoly(const Poly& p);

  double operator()(std::span<const double> point) const;
  /// Unrounded extended-precision sum.
  long double evaluate(std::span<const double> point) const;
  bool is_zero() const noexcept { return coeffs_.empty(); }
  std::size_t num_vars() const noexcept { return num_vars_; }

 private:
  std::size_t num_vars_ = 0;
  std::vector<long double> coeffs_;
  std::vector<Exponent> exps_;
};

}  // namespace rogue
