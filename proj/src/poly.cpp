#include "rogue/poly.hpp"

#include <absl/container/flat_hash_map.h>
#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rogue {

VarSet::VarSet(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw UsageError("empty variable identifier");
    for (std::size_t j = 0; j < i; ++j) {
      if (names_[i] == names_[j]) throw UsageError("duplicate variable '" + names_[i] + "'");
    }
  }
}

std::optional<std::size_t> VarSet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t VarSet::index(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UsageError("unknown variable '" + std::string(name) + "'");
}

VarSetPtr make_varset(std::vector<std::string> names) {
  return std::make_shared<const VarSet>(std::move(names));
}

namespace {

// Sort key for the canonical variable order.
std::pair<int, std::string> canonical_key(const std::string& name) {
  if (name == "v") return {0, {}};
  if (name == "y") return {1, {}};
  if (name == "mu") return {2, {}};
  if (name == "nu") return {3, {}};
  if (name.size() > 1 && name[0] == 'z' &&
      std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return {100 + std::stoi(name.substr(1)), {}};
  }
  return {1000, name};
}

}  // namespace

VarSetPtr canonical_varset(std::vector<std::string> names) {
  std::sort(names.begin(), names.end(),
            [](const std::string& a, const std::string& b) { return canonical_key(a) < canonical_key(b); });
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return make_varset(std::move(names));
}

std::string zeta_name(int index) { return "z" + std::to_string(index); }

bool same_vars(const VarSetPtr& a, const VarSetPtr& b) { return a == b || *a == *b; }

bool grlex_greater(MonomialView a, MonomialView b) {
  unsigned da = 0, db = 0;
  for (Exponent e : a) da += e;
  for (Exponent e : b) db += e;
  if (da != db) return da > db;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

/// Builds Poly storage directly; every producer here emits unique monomials.
class PolyAccess {
 public:
  static Poly build(VarSetPtr vars, std::vector<Exponent> exps, std::vector<Rational> coeffs) {
    Poly p(std::move(vars));
    const std::size_t n = p.num_vars();
    const std::size_t count = coeffs.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    auto mono = [&](std::size_t i) { return MonomialView(exps.data() + i * n, n); };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return grlex_greater(mono(a), mono(b)); });
    p.exps_.reserve(count * n);
    p.coeffs_.reserve(count);
    for (std::size_t i : order) {
      if (coeffs[i] == 0) continue;
      p.exps_.insert(p.exps_.end(), exps.begin() + i * n, exps.begin() + (i + 1) * n);
      p.coeffs_.push_back(std::move(coeffs[i]));
    }
    return p;
  }

  // Storage already sorted and free of zeros.
  static Poly adopt(VarSetPtr vars, std::vector<Exponent> exps, std::vector<Rational> coeffs) {
    Poly p(std::move(vars));
    p.exps_ = std::move(exps);
    p.coeffs_ = std::move(coeffs);
    return p;
  }

  static std::vector<Exponent>& exps(Poly& p) { return p.exps_; }
  static std::vector<Rational>& coeffs(Poly& p) { return p.coeffs_; }
};

Poly::Poly() : Poly(make_varset({})) {}

Poly::Poly(VarSetPtr vars) : vars_(std::move(vars)) {
  if (!vars_) throw UsageError("null VarSet");
}

Poly Poly::constant(VarSetPtr vars, const Rational& c) {
  Poly p(std::move(vars));
  if (c != 0) {
    p.exps_.assign(p.num_vars(), 0);
    p.coeffs_.push_back(c);
  }
  return p;
}

Poly Poly::variable(VarSetPtr vars, std::string_view name) {
  Poly p(std::move(vars));
  p.exps_.assign(p.num_vars(), 0);
  p.exps_[p.vars_->index(name)] = 1;
  p.coeffs_.push_back(Rational(1));
  return p;
}

Poly Poly::term(VarSetPtr vars, MonomialView exps, const Rational& c) {
  Poly p(std::move(vars));
  if (exps.size() != p.num_vars()) throw UsageError("monomial length does not match VarSet");
  if (c != 0) {
    p.exps_.assign(exps.begin(), exps.end());
    p.coeffs_.push_back(c);
  }
  return p;
}

Poly Poly::from_terms(VarSetPtr vars, std::vector<std::pair<Monomial, Rational>> terms) {
  const std::size_t n = vars->size();
  std::map<Monomial, Rational> merged;
  for (auto& [m, c] : terms) {
    if (m.size() != n) throw UsageError("monomial length does not match VarSet");
    merged[m] += c;
  }
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  for (auto& [m, c] : merged) {
    exps.insert(exps.end(), m.begin(), m.end());
    coeffs.push_back(std::move(c));
  }
  return PolyAccess::build(std::move(vars), std::move(exps), std::move(coeffs));
}

bool Poly::is_constant() const {
  if (is_zero()) return true;
  if (size() > 1) return false;
  auto e = exponents(0);
  return std::all_of(e.begin(), e.end(), [](Exponent x) { return x == 0; });
}

Rational Poly::coefficient_of(MonomialView m) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    auto e = exponents(mid);
    if (std::equal(e.begin(), e.end(), m.begin(), m.end())) return coeffs_[mid];
    if (grlex_greater(e, m)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return Rational(0);
}

unsigned Poly::total_degree() const {
  unsigned best = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    auto e = exponents(i);
    best = std::max(best, std::accumulate(e.begin(), e.end(), 0u));
  }
  return best;
}

Monomial Poly::max_exponents() const {
  Monomial m(num_vars(), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    auto e = exponents(i);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = std::max(m[j], e[j]);
  }
  return m;
}

bool Poly::uses(std::size_t var) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (exponents(i)[var] != 0) return true;
  }
  return false;
}

std::vector<std::string> Poly::used_variables() const {
  std::vector<std::string> out;
  auto m = max_exponents();
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j] != 0) out.push_back(vars_->name(j));
  }
  return out;
}

Poly Poly::operator-() const {
  Poly p = *this;
  for (auto& c : p.coeffs_) c = -c;
  return p;
}

namespace {

void require_same(const Poly& a, const Poly& b) {
  if (!same_vars(a.vars(), b.vars())) {
    throw UsageError("polynomials live over different variable sets");
  }
}

// Sorted merge of two canonical term lists.
Poly merge(const Poly& a, const Poly& b, bool subtract) {
  require_same(a, b);
  const std::size_t n = a.num_vars();
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  exps.reserve((a.size() + b.size()) * n);
  coeffs.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  auto push = [&](MonomialView m, Rational c) {
    if (c == 0) return;
    exps.insert(exps.end(), m.begin(), m.end());
    coeffs.push_back(std::move(c));
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && grlex_greater(a.exponents(i), b.exponents(j)))) {
      push(a.exponents(i), a.coeff(i));
      ++i;
    } else if (i == a.size() || grlex_greater(b.exponents(j), a.exponents(i))) {
      push(b.exponents(j), subtract ? Rational(-b.coeff(j)) : b.coeff(j));
      ++j;
    } else {
      push(a.exponents(i), subtract ? Rational(a.coeff(i) - b.coeff(j)) : Rational(a.coeff(i) + b.coeff(j)));
      ++i;
      ++j;
    }
  }
  return PolyAccess::adopt(a.vars(), std::move(exps), std::move(coeffs));
}

}  // namespace

Poly& Poly::operator+=(const Poly& other) { return *this = merge(*this, other, false); }
Poly& Poly::operator-=(const Poly& other) { return *this = merge(*this, other, true); }
Poly& Poly::operator*=(const Poly& other) { return *this = mul(*this, other); }

Poly& Poly::operator*=(const Rational& c) {
  if (c == 0) {
    exps_.clear();
    coeffs_.clear();
  } else {
    for (auto& x : coeffs_) x *= c;
  }
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }

bool operator==(const Poly& a, const Poly& b) {
  return same_vars(a.vars_, b.vars_) && a.exps_ == b.exps_ && a.coeffs_ == b.coeffs_;
}

Poly poly_arith(const Poly& a, const Poly& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return merge(a, b, false);
    case ArithOp::sub: return merge(a, b, true);
    case ArithOp::mul: return mul(a, b);
  }
  throw UsageError("unknown arithmetic operation");
}

// ---------------------------------------------------------------------------
// Multiplication kernels

Poly mul_serial(const Poly& a, const Poly& b) {
  require_same(a, b);
  const std::size_t n = a.num_vars();
  std::map<Monomial, Rational> acc;
  Monomial m(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ea = a.exponents(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto eb = b.exponents(j);
      for (std::size_t k = 0; k < n; ++k) {
        unsigned s = unsigned(ea[k]) + eb[k];
        if (s > 0xFFFF) throw std::overflow_error("exponent overflow in polynomial product");
        m[k] = static_cast<Exponent>(s);
      }
      acc[m] += a.coeff(i) * b.coeff(j);
    }
  }
  std::vector<std::pair<Monomial, Rational>> terms(acc.begin(), acc.end());
  return Poly::from_terms(a.vars(), std::move(terms));
}

namespace {

using Key128 = unsigned __int128;

struct PackLayout {
  std::vector<unsigned> shift;
  std::vector<unsigned> width;
};

std::optional<PackLayout> plan_packing(const Monomial& bound, unsigned max_bits) {
  PackLayout layout;
  unsigned offset = 0;
  for (Exponent b : bound) {
    unsigned w = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(b)));
    layout.shift.push_back(offset);
    layout.width.push_back(w);
    offset += w;
  }
  if (offset > max_bits) return std::nullopt;
  return layout;
}

template <typename Key>
Key pack(MonomialView e, const PackLayout& layout) {
  Key k = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] != 0) k |= Key(e[i]) << layout.shift[i];
  }
  return k;
}

template <typename Key>
void unpack(Key k, const PackLayout& layout, Exponent* out) {
  for (std::size_t i = 0; i < layout.shift.size(); ++i) {
    unsigned w = layout.width[i];
    out[i] = w == 0 ? 0 : static_cast<Exponent>((k >> layout.shift[i]) & ((Key(1) << w) - 1));
  }
}

struct KeyHash {
  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  std::size_t operator()(std::uint64_t k) const { return mix(k); }
  std::size_t operator()(Key128 k) const {
    return mix(static_cast<std::uint64_t>(k) ^ mix(static_cast<std::uint64_t>(k >> 64)));
  }
};

Integer common_denominator(const Poly& p) {
  Integer d = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    mpz_lcm(d.get_mpz_t(), d.get_mpz_t(), p.coeff(i).get_den_mpz_t());
  }
  return d;
}

std::vector<Integer> scaled_numerators(const Poly& p, const Integer& den) {
  std::vector<Integer> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    mpz_divexact(out[i].get_mpz_t(), den.get_mpz_t(), p.coeff(i).get_den_mpz_t());
    out[i] *= p.coeff(i).get_num();
  }
  return out;
}

template <typename Key>
Poly mul_packed(const Poly& a, const Poly& b, const PackLayout& layout) {
  const std::size_t n = a.num_vars();
  const Integer da = common_denominator(a), db = common_denominator(b);
  const std::vector<Integer> na = scaled_numerators(a, da), nb = scaled_numerators(b, db);
  std::vector<Key> ka(a.size()), kb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) ka[i] = pack<Key>(a.exponents(i), layout);
  for (std::size_t j = 0; j < b.size(); ++j) kb[j] = pack<Key>(b.exponents(j), layout);

  using Map = absl::flat_hash_map<Key, Integer, KeyHash>;
  Map total;
  const long outer = static_cast<long>(a.size());
  // Tiny products are not worth a parallel region.
  const bool parallel = a.size() * b.size() > 4096 && omp_get_max_threads() > 1;
#pragma omp parallel if (parallel)
  {
    Map local;
#pragma omp for schedule(dynamic, 8)
    for (long i = 0; i < outer; ++i) {
      const mpz_srcptr x = na[static_cast<std::size_t>(i)].get_mpz_t();
      const Key base = ka[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < kb.size(); ++j) {
        auto [it, inserted] = local.try_emplace(base + kb[j]);
        mpz_addmul(it->second.get_mpz_t(), x, nb[j].get_mpz_t());
      }
    }
#pragma omp critical(rogue_mul_merge)
    {
      if (total.empty()) {
        total = std::move(local);
      } else {
        for (auto& [k, v] : local) total[k] += v;
      }
    }
  }

  const Integer den = da * db;
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  exps.resize(total.size() * n);
  coeffs.reserve(total.size());
  std::size_t count = 0;
  for (auto& [k, v] : total) {
    if (v == 0) continue;
    unpack<Key>(k, layout, exps.data() + count * n);
    Rational q(v, den);
    q.canonicalize();
    coeffs.push_back(std::move(q));
    ++count;
  }
  exps.resize(count * n);
  return PolyAccess::build(a.vars(), std::move(exps), std::move(coeffs));
}

Poly mul_unpacked(const Poly& a, const Poly& b) {
  const std::size_t n = a.num_vars();
  const Integer da = common_denominator(a), db = common_denominator(b);
  const std::vector<Integer> na = scaled_numerators(a, da), nb = scaled_numerators(b, db);
  absl::flat_hash_map<Monomial, Integer> acc;
  Monomial m(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto ea = a.exponents(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto eb = b.exponents(j);
      for (std::size_t k = 0; k < n; ++k) m[k] = static_cast<Exponent>(ea[k] + eb[k]);
      mpz_addmul(acc[m].get_mpz_t(), na[i].get_mpz_t(), nb[j].get_mpz_t());
    }
  }
  const Integer den = da * db;
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  for (auto& [mono, v] : acc) {
    if (v == 0) continue;
    exps.insert(exps.end(), mono.begin(), mono.end());
    Rational q(v, den);
    q.canonicalize();
    coeffs.push_back(std::move(q));
  }
  return PolyAccess::build(a.vars(), std::move(exps), std::move(coeffs));
}

}  // namespace

Poly mul(const Poly& a, const Poly& b) {
  require_same(a, b);
  if (a.is_zero() || b.is_zero()) return Poly(a.vars());
  const std::size_t n = a.num_vars();
  if (n == 0) return Poly::constant(a.vars(), a.coeff(0) * b.coeff(0));
  Monomial ma = a.max_exponents(), mb = b.max_exponents(), bound(n);
  for (std::size_t k = 0; k < n; ++k) {
    unsigned s = unsigned(ma[k]) + mb[k];
    if (s > 0xFFFF) throw std::overflow_error("exponent overflow in polynomial product");
    bound[k] = static_cast<Exponent>(s);
  }
  if (auto layout = plan_packing(bound, 64)) return mul_packed<std::uint64_t>(a, b, *layout);
  if (auto layout = plan_packing(bound, 128)) return mul_packed<Key128>(a, b, *layout);
  return mul_unpacked(a, b);
}

Poly pow(const Poly& a, unsigned k) {
  Poly result = Poly::constant(a.vars(), Rational(1));
  Poly base = a;
  while (k > 0) {
    if (k & 1U) result = mul(result, base);
    k >>= 1U;
    if (k > 0) base = mul(base, base);
  }
  return result;
}

// ---------------------------------------------------------------------------

Poly diff(const Poly& p, std::size_t var, unsigned order) {
  if (var >= p.num_vars()) throw UsageError("variable index out of range");
  if (order == 0) return p;
  const std::size_t n = p.num_vars();
  std::vector<Exponent> exps;
  std::vector<Rational> coeffs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    if (e[var] < order) continue;
    Integer factor = 1;
    for (unsigned r = 0; r < order; ++r) factor *= static_cast<unsigned long>(e[var] - r);
    exps.insert(exps.end(), e.begin(), e.end());
    exps[exps.size() - n + var] = static_cast<Exponent>(e[var] - order);
    coeffs.push_back(p.coeff(i) * factor);
  }
  // Lowering one exponent uniformly preserves the relative grlex order.
  return PolyAccess::adopt(p.vars(), std::move(exps), std::move(coeffs));
}

Poly diff(const Poly& p, std::string_view var, unsigned order) {
  return diff(p, p.vars()->index(var), order);
}

std::vector<CollectedTerm> collect(const Poly& p, std::span<const std::string> outer) {
  std::vector<std::size_t> idx;
  for (const auto& name : outer) idx.push_back(p.vars()->index(name));
  std::map<Monomial, std::pair<std::vector<Exponent>, std::vector<Rational>>> groups;
  Monomial key(idx.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    for (std::size_t k = 0; k < idx.size(); ++k) key[k] = e[idx[k]];
    auto& [exps, coeffs] = groups[key];
    std::size_t start = exps.size();
    exps.insert(exps.end(), e.begin(), e.end());
    for (std::size_t k : idx) exps[start + k] = 0;
    coeffs.push_back(p.coeff(i));
  }
  std::vector<CollectedTerm> out;
  out.reserve(groups.size());
  for (auto& [mono, storage] : groups) {
    out.push_back({mono, PolyAccess::build(p.vars(), std::move(storage.first), std::move(storage.second))});
  }
  std::sort(out.begin(), out.end(),
            [](const CollectedTerm& a, const CollectedTerm& b) { return grlex_greater(a.outer, b.outer); });
  return out;
}

Poly subst(const Poly& p, const Bindings& bindings) {
  std::vector<std::size_t> bound;
  std::vector<const Poly*> repl;
  for (const auto& [name, value] : bindings) {
    auto i = p.vars()->find(name);
    if (!i) throw UsageError("binding for unknown variable '" + name + "'");
    if (!same_vars(value.vars(), p.vars())) {
      throw UsageError("binding for '" + name + "' lives over a different variable set");
    }
    bound.push_back(*i);
    repl.push_back(&value);
  }
  if (bound.empty()) return p;

  // Group terms by the exponents of the bound variables.
  std::map<Monomial, std::pair<std::vector<Exponent>, std::vector<Rational>>> groups;
  Monomial key(bound.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    for (std::size_t k = 0; k < bound.size(); ++k) key[k] = e[bound[k]];
    auto& [exps, coeffs] = groups[key];
    std::size_t start = exps.size();
    exps.insert(exps.end(), e.begin(), e.end());
    for (std::size_t k : bound) exps[start + k] = 0;
    coeffs.push_back(p.coeff(i));
  }

  std::vector<std::vector<Poly>> powers(bound.size());
  auto power = [&](std::size_t k, Exponent e) -> const Poly& {
    auto& table = powers[k];
    if (table.empty()) table.push_back(Poly::constant(p.vars(), Rational(1)));
    while (table.size() <= e) table.push_back(mul(table.back(), *repl[k]));
    return table[e];
  };

  Poly result(p.vars());
  for (auto& [mono, storage] : groups) {
    Poly rest = PolyAccess::build(p.vars(), std::move(storage.first), std::move(storage.second));
    Poly factor = Poly::constant(p.vars(), Rational(1));
    for (std::size_t k = 0; k < bound.size(); ++k) {
      if (mono[k] != 0) factor = mul(factor, power(k, mono[k]));
    }
    result += mul(rest, factor);
  }
  return result;
}

Poly subst(const Poly& p, const std::map<std::string, Rational>& values) {
  Bindings b;
  for (const auto& [name, q] : values) b.emplace(name, Poly::constant(p.vars(), q));
  return subst(p, b);
}

Poly with_vars(const Poly& p, VarSetPtr vars) {
  if (same_vars(p.vars(), vars)) {
    Poly q = p;
    return PolyAccess::adopt(std::move(vars), std::move(PolyAccess::exps(q)), std::move(PolyAccess::coeffs(q)));
  }
  const std::size_t n = p.num_vars(), m = vars->size();
  std::vector<std::optional<std::size_t>> map(n);
  auto used = p.max_exponents();
  for (std::size_t j = 0; j < n; ++j) {
    map[j] = vars->find(p.vars()->name(j));
    if (!map[j] && used[j] != 0) {
      throw UsageError("polynomial uses '" + p.vars()->name(j) + "' which the target variable set lacks");
    }
  }
  std::vector<Exponent> exps(p.size() * m, 0);
  std::vector<Rational> coeffs;
  coeffs.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto e = p.exponents(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (map[j]) exps[i * m + *map[j]] = e[j];
    }
    coeffs.push_back(p.coeff(i));
  }
  return PolyAccess::build(std::move(vars), std::move(exps), std::move(coeffs));
}

Poly restrict_vars(const Poly& p, std::vector<std::string> keep) {
  for (auto& name : p.used_variables()) keep.push_back(name);
  return with_vars(p, canonical_varset(std::move(keep)));
}

Rational eval_exact(const Poly& p, std::span<const Rational> point) {
  if (point.size() != p.num_vars()) throw UsageError("evaluation point has wrong dimension");
  Rational sum = 0;
  Rational t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    t = p.coeff(i);
    auto e = p.exponents(i);
    for (std::size_t j = 0; j < e.size(); ++j) {
      if (e[j] != 0) t *= pow(point[j], e[j]);
    }
    sum += t;
  }
  return sum;
}

Rational eval_exact(const Poly& p, const std::map<std::string, Rational>& point) {
  std::vector<Rational> values(p.num_vars());
  auto used = p.max_exponents();
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    auto it = point.find(p.vars()->name(j));
    if (it != point.end()) {
      values[j] = it->second;
    } else if (used[j] != 0) {
      throw UsageError("no value bound for variable '" + p.vars()->name(j) + "'");
    }
  }
  return eval_exact(p, values);
}

FloatPoly::FloatPoly(const Poly& p) : num_vars_(p.num_vars()) {
  coeffs_.reserve(p.size());
  exps_.reserve(p.size() * num_vars_);
  for (std::size_t i = 0; i < p.size(); ++i) {
    coeffs_.push_back(to_long_double(p.coeff(i)));
    auto e = p.exponents(i);
    exps_.insert(exps_.end(), e.begin(), e.end());
  }
}

double FloatPoly::operator()(std::span<const double> point) const { return static_cast<double>(evaluate(point)); }

long double FloatPoly::evaluate(std::span<const double> point) const {
  if (point.size() != num_vars_) throw UsageError("evaluation point has wrong dimension");
  long double sum = 0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    long double t = coeffs_[i];
    const Exponent* e = exps_.data() + i * num_vars_;
    for (std::size_t j = 0; j < num_vars_; ++j) {
      for (Exponent r = 0; r < e[j]; ++r) t *= point[j];
    }
    sum += t;
  }
  return sum;
}

double eval_float(const Poly& p, std::span<const double> point) { return FloatPoly(p)(point); }

double eval_float(const Poly& p, const std::map<std::string, double>& point) {
  std::vector<double> values(p.num_vars(), 0.0);
  auto used = p.max_exponents();
  for (std::size_t j = 0; j < p.num_vars(); ++j) {
    auto it = point.find(p.vars()->name(j));
    if (it != point.end()) {
      values[j] = it->second;
    } else if (used[j] != 0) {
      throw UsageError("no value bound for variable '" + p.vars()->name(j) + "'");
    }
  }
  return eval_float(p, values);
}

namespace {

struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const { return grlex_greater(a, b); }
};

}  // namespace

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  require_same(a, b);
  if (b.is_zero()) throw UsageError("division by the zero polynomial");
  const std::size_t n = a.num_vars();
  // Ordered with the leading (grlex-greatest) monomial first.
  std::map<Monomial, Rational, GrlexLess> rem;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto e = a.exponents(i);
    rem.emplace(Monomial(e.begin(), e.end()), a.coeff(i));
  }
  auto lead_b = b.exponents(0);
  const Rational& lead_c = b.coeff(0);
  std::vector<std::pair<Monomial, Rational>> quotient;
  Monomial t(n);
  while (!rem.empty()) {
    auto top = rem.begin();
    for (std::size_t k = 0; k < n; ++k) {
      if (top->first[k] < lead_b[k]) return std::nullopt;
      t[k] = static_cast<Exponent>(top->first[k] - lead_b[k]);
    }
    Rational q = top->second / lead_c;
    quotient.emplace_back(t, q);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto eb = b.exponents(j);
      Monomial m(n);
      for (std::size_t k = 0; k < n; ++k) m[k] = static_cast<Exponent>(t[k] + eb[k]);
      auto [it, inserted] = rem.try_emplace(std::move(m), 0);
      it->second -= q * b.coeff(j);
      if (it->second == 0) rem.erase(it);
    }
  }
  return Poly::from_terms(a.vars(), std::move(quotient));
}

Rational max_abs_coefficient(const Poly& p) {
  Rational best = 0;
  for (std::size_t i = 0; i < p.size(); ++i) best = std::max(best, abs(p.coeff(i)));
  return best;
}

std::string monomial_string(const VarSet& vars, MonomialView exps) {
  std::string out;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    if (exps[j] == 0) continue;
    if (!out.empty()) out += '*';
    out += vars.name(j);
    if (exps[j] > 1) out += '^' + std::to_string(exps[j]);
  }
  return out;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Rational& c = p.coeff(i);
    std::string mono = monomial_string(*p.vars(), p.exponents(i));
    bool negative = c < 0;
    Rational mag = abs(c);
    if (i == 0) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    if (mono.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += to_string(mag) + '*' + mono;
    }
  }
  return out;
}

}  // namespace rogue
