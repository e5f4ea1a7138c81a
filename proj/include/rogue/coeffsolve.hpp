#pragma once

#include "rogue/ansatz.hpp"
#include "rogue/poly.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>

#include <map>
#include <random>
#include <string>
#include <vector>

namespace rogue {

/// Coefficient-matching system: one polynomial equation in the unknowns per
/// monomial of the collected variables.
struct CoeffSystem {
  std::vector<std::string> unknowns;        // declared order
  VarSetPtr unknown_vars;                   // VarSet of the equations
  std::vector<std::string> outer;           // variables collected over
  std::vector<Poly> equations;              // none is zero
  std::vector<Monomial> source_monomials;   // exponents over `outer`
};

/// Collects `residual` over whichever of v, y, mu, nu it carries. Usage
/// error if it uses a variable outside those and `unknowns`.
CoeffSystem extract_system(const Poly& residual, const std::vector<std::string>& unknowns);

/// Order-specific system for numeric work: unknown-mode xi with mu, nu and
/// the free parameters bound to numbers.
CoeffSystem build_numeric_system(int order, const Params& params, const FreeValues& free_values);

struct EquationCheck {
  Monomial source;
  std::string value;  // canonical text of the nonzero remainder
};

struct VerificationReport {
  bool pass = false;
  std::string route;                 // "per-equation" or "residual"
  std::vector<std::string> outer;
  /// per-equation: equations substituted. residual: nonzero coefficients
  /// of the collected residual, so 0 on a pass.
  std::size_t equations_checked = 0;
  std::size_t failing = 0;
  std::vector<EquationCheck> failures;  // first `kMaxReportedFailures`
};

inline constexpr std::size_t kMaxReportedFailures = 50;

/// Substitutes the solution into every equation. Values may keep free
/// parameters symbolic but must not mention collected variables.
VerificationReport verify_exact(const CoeffSystem& system, const Solution& solution);

/// Substitutes the solution into xi, recomputes the residual and collects
/// it. Collection commutes with substitution, so this checks the same
/// equations without expanding the unknown-mode residual; values may depend
/// on mu and nu.
VerificationReport verify_solution(const AnsatzSpec& unknown_spec, const Params& params, const Solution& solution);

/// d(equation i)/d(unknown j) as compiled float polynomials.
class Jacobian {
 public:
  Jacobian() = default;
  Jacobian(const std::vector<Poly>& equations, const std::vector<std::size_t>& columns);

  Eigen::MatrixXd evaluate(std::span<const double> point) const;
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<FloatPoly> entries_;  // row-major; empty polys are zero
  std::vector<bool> nonzero_;
};

Jacobian jacobian(const CoeffSystem& system);

/// p(scale_0 z_0, scale_1 z_1, ...).
Poly scale_variables(const Poly& p, const std::vector<Rational>& scale);

/// p divided by the largest monomial dividing every term.
Poly strip_monomial_content(const Poly& p);

struct SolveOptions {
  int max_iter = 200;
  double tol = 1e-12;
  double initial_damping = 1e-3;
  double damping_factor = 10;
  double damping_cap = 1e12;
  /// Divide each equation by its largest |coefficient| first.
  bool normalize = true;
  /// Remove the largest monomial factor shared by all terms of an equation.
  /// Discards only roots with some unknown equal to zero, where the ansatz
  /// degenerates; without it the order-1 system has a spurious basin around
  /// z1 = 0 that traps seeds such as (1, 1).
  bool strip_monomial_content = true;
  /// Solve for w_j = z_j / 2^round(log2 |seed_j|) so large unknowns do not
  /// push the float evaluation onto a cancellation floor.
  bool scale_unknowns = true;
};

struct SolveResult {
  std::map<std::string, double> assignment;
  std::map<std::string, double> start_point;
  /// Norm of the solver's internal (scaled, stripped, normalized) system.
  double residual_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::string status;                       // converged | stalled | max_iter
  int jacobian_rank = 0;
  std::vector<std::string> unconstrained;   // unknowns absent from every equation
};

/// Damped Gauss-Newton (Levenberg-Marquardt) on F(z) = 0. Never throws on
/// non-convergence; the best iterate is returned with converged = false.
SolveResult solve_numeric(const CoeffSystem& system, const std::map<std::string, double>& seed,
                          const SolveOptions& options = {});

/// The reduced equation R[u] evaluated at fixed (v, y) points as a function
/// of the unknowns. Stands in for the coefficient system where expanding it
/// is too expensive; every root of the coefficient system is a root here.
/// Derivatives of ln xi come from truncated Taylor series at each point, and
/// the Jacobian is exact (tangent mode) because xi is affine in the unknowns.
class SampledSystem {
 public:
  /// xi over {v, y} and `unknowns`, of degree at most 1 in the unknowns.
  SampledSystem(const Poly& xi, std::vector<std::string> unknowns, const Params& params,
                std::vector<std::array<double, 2>> points);

  std::size_t num_equations() const noexcept { return points_.size(); }
  const std::vector<std::string>& unknowns() const noexcept { return unknowns_; }

  Eigen::VectorXd residual(std::span<const double> z) const;
  Eigen::MatrixXd jacobian(std::span<const double> z) const;

 private:
  static constexpr std::size_t kCells = 7 * 3;  // v order <= 6, y order <= 2
  using Table = std::array<double, kCells>;
  Table table_at(std::size_t point, std::span<const double> z) const;

  std::vector<std::string> unknowns_;
  double alpha_, beta_, k_, c_;
  std::vector<std::array<double, 2>> points_;
  // tables_[point][0] is the unknown-free part, tables_[point][1 + j] the
  // part multiplying unknown j.
  std::vector<std::vector<Table>> tables_;
};

/// Unknown-mode xi with mu, nu and free parameters bound, sampled at
/// `count` points drawn uniformly from [-radius, radius]^2.
SampledSystem build_sampled_system(int order, const Params& params, const FreeValues& free_values,
                                   std::size_t count, std::uint64_t seed, double radius = 1);

/// Levenberg-Marquardt on a sampled system, unknowns scaled by their seed
/// magnitudes as in solve_numeric.
SolveResult solve_sampled(const SampledSystem& system, const std::map<std::string, double>& seed,
                          const SolveOptions& options = {});

/// Closed-form values with mu, nu and free parameters bound, as doubles.
std::map<std::string, double> closed_form_values(int order, const Params& params, const FreeValues& free_values);

/// closed_form_values with each entry multiplied by (1 + U(-fraction, fraction)).
std::map<std::string, double> perturbed_seed(int order, const Params& params, const FreeValues& free_values,
                                             double fraction, std::mt19937_64& rng);

}  // namespace rogue
