#include "generators.hpp"
#include "rogue/coeffsolve.hpp"
#include "rogue/residual.hpp"

#include <doctest.h>

#include <cmath>

using namespace rogue;

namespace {

CoeffSystem toy_system() {
  auto vars = make_varset({"v", "y", "z0", "z1"});
  Poly residual = parse_poly(vars, "(z0 - 1)*v^2 + (z1 - 2)*v*y + 3*z0*z1 - 6");
  return extract_system(residual, {"z0", "z1"});
}

Solution constant_solution(const VarSetPtr& vars, std::map<std::string, Rational> values) {
  Solution s;
  for (auto& [k, v] : values) s.assignment.emplace(k, Poly::constant(vars, v));
  return s;
}

double max_relative_error(const std::map<std::string, double>& got, const std::map<std::string, double>& want) {
  double worst = 0;
  for (const auto& [k, w] : want) {
    double scale = std::max(std::fabs(w), 1e-300);
    worst = std::max(worst, std::fabs(got.at(k) - w) / scale);
  }
  return worst;
}

}  // namespace

TEST_SUITE("coeffsolve") {
  TEST_CASE("extracting a coefficient system") {
    CoeffSystem sys = toy_system();
    CHECK(sys.outer == std::vector<std::string>{"v", "y"});
    REQUIRE(sys.equations.size() == 3);
    auto uv = sys.unknown_vars;
    CHECK(sys.equations[0] == parse_poly(uv, "z0 - 1"));
    CHECK(sys.equations[1] == parse_poly(uv, "z1 - 2"));
    CHECK(sys.equations[2] == parse_poly(uv, "3*z0*z1 - 6"));
    CHECK(sys.source_monomials[0] == Monomial{2, 0});

    auto vars = make_varset({"v", "w", "z0"});
    CHECK_THROWS_AS(extract_system(parse_poly(vars, "w*v + z0"), {"z0"}), UsageError);
  }

  TEST_CASE("exact verification") {
    CoeffSystem sys = toy_system();
    VerificationReport ok = verify_exact(sys, constant_solution(sys.unknown_vars, {{"z0", 1}, {"z1", 2}}));
    CHECK(ok.pass);
    CHECK(ok.failing == 0);
    CHECK(ok.equations_checked == 3);
    VerificationReport bad = verify_exact(sys, constant_solution(sys.unknown_vars, {{"z0", 2}, {"z1", 2}}));
    CHECK(!bad.pass);
    CHECK(bad.failing == 2);
    REQUIRE(bad.failures.size() == 2);
    CHECK(bad.failures[0].value == "1");
  }

  TEST_CASE("order-1 system against the closed form, both routes") {
    Params p;
    AnsatzSpec unknown = build_xi(1, AnsatzMode::unknown, p);
    CoeffSystem sys = extract_system(residual_numerator(unknown.xi, p).numerator, unknown.unknowns);
    CHECK(sys.outer == std::vector<std::string>{"v", "y", "mu", "nu"});
    Solution closed = constant_solution(sys.unknown_vars, {{"z0", Rational(3, 7)}, {"z1", 7}});
    CHECK(verify_exact(sys, closed).pass);
    CHECK(verify_solution(unknown, p, closed_form_coefficients(1, p)).pass);

    Solution off = constant_solution(sys.unknown_vars, {{"z0", Rational(10, 7)}, {"z1", 7}});
    VerificationReport a = verify_exact(sys, off);
    CHECK(!a.pass);
    Solution off_ansatz = closed_form_coefficients(1, p);
    off_ansatz.assignment.at("z0") += Poly::constant(off_ansatz.assignment.at("z0").vars(), 1);
    VerificationReport b = verify_solution(unknown, p, off_ansatz);
    CHECK(!b.pass);
    CHECK(b.route == "residual");
  }

  TEST_CASE("orders 2 and 3 verify with free parameters symbolic") {
    Params p;
    p.mu = Rational(3, 2);
    p.nu = -2;
    for (int order : {2, 3}) {
      AnsatzSpec unknown = build_xi(order, AnsatzMode::unknown, p);
      VerificationReport r = verify_solution(unknown, p, closed_form_coefficients(order, p, {}, true));
      INFO("order " << order);
      CHECK(r.pass);
      CHECK(r.route == "residual");
      CHECK(r.equations_checked == 0);
    }
    AnsatzOptions printed;
    printed.form = AnsatzForm::as_printed;
    AnsatzSpec unknown = build_xi(2, AnsatzMode::unknown, p, {}, printed);
    VerificationReport r = verify_solution(unknown, p, closed_form_coefficients(2, p, {}, true));
    CHECK(!r.pass);
    CHECK(r.failures.size() <= kMaxReportedFailures);
  }

  TEST_CASE("Jacobian of a linear system is its coefficient matrix") {
    auto vars = make_varset({"v", "z0", "z1"});
    CoeffSystem sys = extract_system(parse_poly(vars, "(z0 - 1)*v + z1 - 2"), {"z0", "z1"});
    Jacobian jac = jacobian(sys);
    std::vector<double> pt = {5, -3};
    Eigen::MatrixXd J = jac.evaluate(pt);
    CHECK(J.rows() == 2);
    CHECK(J.cols() == 2);
    CHECK(J.isApprox(Eigen::Matrix2d::Identity()));
  }

  TEST_CASE("analytic Jacobian matches finite differences") {
    Params p;
    CoeffSystem sys = build_numeric_system(2, p, default_free_values(2));
    Jacobian jac = jacobian(sys);
    std::vector<FloatPoly> eqs(sys.equations.begin(), sys.equations.end());
    std::mt19937_64 rng(5);
    auto base = closed_form_values(2, p, default_free_values(2));
    for (int trial = 0; trial < 5; ++trial) {
      auto seed = perturbed_seed(2, p, default_free_values(2), 0.1, rng);
      std::vector<double> z;
      for (const auto& name : sys.unknowns) z.push_back(seed.at(name));
      Eigen::MatrixXd J = jac.evaluate(z);
      for (std::size_t j = 0; j < z.size(); ++j) {
        double h = 1e-6 * std::max(1.0, std::fabs(z[j]));
        auto hi = z, lo = z;
        hi[j] += h;
        lo[j] -= h;
        for (std::size_t i = 0; i < eqs.size(); ++i) {
          double fd = (static_cast<double>(eqs[i].evaluate(hi)) - static_cast<double>(eqs[i].evaluate(lo))) / (2 * h);
          double scale = 1 + std::fabs(J(i, j));
          CHECK(std::fabs(fd - J(i, j)) <= 1e-5 * scale * std::max(1.0, std::fabs(static_cast<double>(eqs[i].evaluate(z)))));
        }
      }
    }
    (void)base;
  }

  TEST_CASE("helpers: variable scaling and monomial content") {
    auto vars = make_varset({"z0", "z1"});
    CHECK(scale_variables(parse_poly(vars, "z0^2*z1 + 3"), {2, Rational(1, 3)}) ==
          parse_poly(vars, "4/3*z0^2*z1 + 3"));
    CHECK(strip_monomial_content(parse_poly(vars, "z0^3*z1 + 2*z0*z1^2")) == parse_poly(vars, "z0^2 + 2*z1"));
    CHECK(strip_monomial_content(parse_poly(vars, "z0 + 1")) == parse_poly(vars, "z0 + 1"));
  }

  TEST_CASE("order-1 solve from (1, 1)") {
    Params p;
    CoeffSystem sys = build_numeric_system(1, p, {});
    SolveResult r = solve_numeric(sys, {{"z0", 1}, {"z1", 1}});
    CHECK(r.converged);
    CHECK(r.status == "converged");
    CHECK(r.jacobian_rank == 2);
    CHECK(std::fabs(r.assignment.at("z0") - 3.0 / 7.0) < 1e-10);
    CHECK(std::fabs(r.assignment.at("z1") - 7.0) < 1e-10);
    CHECK(r.start_point.at("z0") == 1.0);
  }

  TEST_CASE("a seed at the root needs at most one iteration") {
    Params p;
    CoeffSystem sys = build_numeric_system(1, p, {});
    SolveResult r = solve_numeric(sys, {{"z0", 3.0 / 7.0}, {"z1", 7.0}});
    CHECK(r.converged);
    CHECK(r.iterations <= 1);
  }

  TEST_CASE("equation scaling does not move the root") {
    Params p;
    CoeffSystem sys = build_numeric_system(1, p, {});
    CoeffSystem scaled = sys;
    for (auto& e : scaled.equations) e *= Rational(1000);
    SolveOptions raw;
    raw.normalize = false;
    SolveResult a = solve_numeric(sys, {{"z0", 1}, {"z1", 1}});
    SolveResult b = solve_numeric(scaled, {{"z0", 1}, {"z1", 1}});
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(std::fabs(a.assignment.at("z0") - b.assignment.at("z0")) < 1e-12);
    CHECK(std::fabs(a.assignment.at("z1") - b.assignment.at("z1")) < 1e-12);
  }

  TEST_CASE("random starts find no second root with positive z0 and z1") {
    Params p;
    CoeffSystem sys = build_numeric_system(1, p, {});
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-10, 10);
    int hits = 0;
    for (int i = 0; i < 20; ++i) {
      SolveResult r = solve_numeric(sys, {{"z0", u(rng)}, {"z1", u(rng)}});
      if (!r.converged) continue;
      double z0 = r.assignment.at("z0"), z1 = r.assignment.at("z1");
      if (z0 > 0 && z1 > 0) {
        ++hits;
        CHECK(std::fabs(z0 - 3.0 / 7.0) < 1e-9);
        CHECK(std::fabs(z1 - 7.0) < 1e-9);
      }
    }
    CHECK(hits >= 1);
  }

  TEST_CASE("non-convergence is reported, not thrown") {
    Params p;
    CoeffSystem sys = build_numeric_system(1, p, {});
    SolveOptions opt;
    opt.max_iter = 1;
    SolveResult r;
    CHECK_NOTHROW(r = solve_numeric(sys, {{"z0", -9}, {"z1", 9}}, opt));
    CHECK(!r.converged);
    CHECK(r.status == "max_iter");
    CHECK_THROWS_AS(solve_numeric(sys, {{"z0", 1}}), UsageError);
  }

  TEST_CASE("order-2 recovery from a perturbed seed") {
    Params p;
    p.mu = 1;
    p.nu = 1;
    FreeValues free = default_free_values(2);
    CoeffSystem sys = build_numeric_system(2, p, free);
    auto want = closed_form_values(2, p, free);
    std::mt19937_64 rng(1);
    auto seed = perturbed_seed(2, p, free, 0.01, rng);
    SolveResult r = solve_numeric(sys, seed);
    CHECK(r.converged);
    CHECK(r.unconstrained.empty());
    CHECK(max_relative_error(r.assignment, want) < 1e-8);
  }

  TEST_CASE("order-2 at the origin leaves four unknowns unconstrained") {
    Params p;
    FreeValues free = default_free_values(2);
    CoeffSystem sys = build_numeric_system(2, p, free);
    std::mt19937_64 rng(1);
    SolveResult r = solve_numeric(sys, perturbed_seed(2, p, free, 0.01, rng));
    CHECK(r.converged);
    CHECK(r.unconstrained == std::vector<std::string>{"z19", "z20", "z22", "z23"});
  }

  TEST_CASE("sampled system") {
    Params p;
    p.mu = 1;
    p.nu = 1;
    FreeValues none;
    SampledSystem order1 = build_sampled_system(1, p, none, 30, 3);
    CHECK(order1.num_equations() == 30);
    std::vector<double> root = {3.0 / 7.0, 7.0};
    CHECK(order1.residual(root).norm() < 1e-9);
    std::vector<double> z = {0.9, 5.0};
    Eigen::MatrixXd J = order1.jacobian(z);
    for (std::size_t j = 0; j < 2; ++j) {
      auto hi = z, lo = z;
      hi[j] += 1e-6;
      lo[j] -= 1e-6;
      Eigen::VectorXd fd = (order1.residual(hi) - order1.residual(lo)) / 2e-6;
      CHECK((fd - J.col(static_cast<Eigen::Index>(j))).norm() <= 1e-5 * (1 + J.col(static_cast<Eigen::Index>(j)).norm()));
    }
    // Far seeds can slide toward large z1, where xi flattens and every
    // sampled residual decays; start within 20% of the root.
    SolveResult r = solve_sampled(order1, {{"z0", 0.5}, {"z1", 6}});
    CHECK(r.converged);
    CHECK(std::fabs(r.assignment.at("z1") - 7.0) < 1e-9);
  }

  TEST_CASE("order-3 recovery on the sampled system") {
    Params p;
    p.mu = 1;
    p.nu = 1;
    SampledSystem sys = build_sampled_system(3, p, {}, 200, 1);
    auto want = closed_form_values(3, p, {});
    std::vector<double> root;
    for (const auto& name : sys.unknowns()) root.push_back(want.at(name));
    Eigen::VectorXd f = sys.residual(root);
    CHECK(f.norm() / std::sqrt(double(f.size())) < 1e-6);
    std::mt19937_64 rng(1);
    SolveOptions opt;
    opt.tol = 1e-10;
    SolveResult r = solve_sampled(sys, perturbed_seed(3, p, {}, 0.01, rng), opt);
    CHECK(r.converged);
    CHECK(max_relative_error(r.assignment, want) < 1e-6);
  }
}
