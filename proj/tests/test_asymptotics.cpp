#include "doctest.h"

#include <array>
#include <cmath>
#include <random>

#include "shiftfem/asymptotics.hpp"
#include "shiftfem/error.hpp"

using namespace shiftfem;

namespace {

using Poly = std::vector<double>;

Poly deriv(const Poly& p) {
  Poly out;
  for (std::size_t j = 1; j < p.size(); ++j) out.push_back(j * p[j]);
  return out;
}

// coefficients of p″ − b p′ − rhs
Poly corrector_residual(const Poly& p, double b, const Poly& rhs) {
  Poly r(std::max(p.size(), rhs.size()) + 1, 0.0);
  const auto d1 = deriv(p);
  const auto d2 = deriv(d1);
  for (std::size_t j = 0; j < d2.size(); ++j) r[j] += d2[j];
  for (std::size_t j = 0; j < d1.size(); ++j) r[j] -= b * d1[j];
  for (std::size_t j = 0; j < rhs.size(); ++j) r[j] -= rhs[j];
  return r;
}

Poly axpy(double a, const Poly& x, const Poly& y) {
  Poly r(std::max(x.size(), y.size()), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) r[j] += a * x[j];
  for (std::size_t j = 0; j < y.size(); ++j) r[j] += y[j];
  return r;
}

using Mat2 = std::array<double, 4>;  // row major

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

// Scaling and squaring with a Taylor kernel.
Mat2 expm(Mat2 a) {
  int squarings = 0;
  double norm = std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) + std::abs(a[3]);
  while (norm > 0.1) {
    for (auto& v : a) v /= 2;
    norm /= 2;
    ++squarings;
  }
  Mat2 result{1, 0, 0, 1};
  Mat2 term{1, 0, 0, 1};
  for (int j = 1; j <= 20; ++j) {
    term = mul(term, a);
    for (auto& v : term) v /= j;
    for (int i = 0; i < 4; ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

ReducedSystem constants(double c1, double c2, double d, double g1, double g2, double alpha) {
  ReducedSystem sys;
  sys.c1 = [c1](double) { return c1; };
  sys.c2 = [c2](double) { return c2; };
  sys.d = [d](double) { return d; };
  sys.g1 = [g1](double) { return g1; };
  sys.g2 = [g2](double) { return g2; };
  sys.alpha = alpha;
  return sys;
}

}  // namespace

TEST_CASE("reduced system closed-form examples") {
  const auto sol = solve_reduced(constants(0, 0, 1, 0, 0, 1));
  for (double x : {0.0, 0.3, 1.0}) {
    CHECK(sol.V(x) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.W(x) == doctest::Approx((x - 1) / 2).epsilon(1e-12).scale(1.0));
  }
  CHECK(b21_closed(0.0, 1.0, 1.0) == doctest::Approx(-(1 - std::exp(-1.0))).epsilon(1e-14));
  CHECK(b21_closed(0.0, 1.0, 1.0) == doctest::Approx(-0.6321).epsilon(1e-4));
}

TEST_CASE("singular reduced system is detected") {
  CHECK(b21_closed(1.0, 1.0, -std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(solve_reduced(constants(1, 1, -std::exp(1.0), 1, 1, 0)), SolverError);
  ConstantReducedSystem exact;
  exact.c1 = 1.0;
  exact.c2 = 1.0;
  exact.d = -std::exp(1.0);
  exact.g1 = ExpPoly::constant(1.0);
  exact.g2 = ExpPoly::constant(1.0);
  CHECK_THROWS_AS(solve_reduced(exact), SolverError);
}

TEST_CASE("closed-form b21 matches a matrix exponential") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double C1 = u(rng), C2 = trial % 5 == 0 ? C1 : u(rng), D = u(rng);
    const Mat2 e = expm({-C1, 0.0, -D, -C2});
    CHECK(b21_closed(C1, C2, D) == doctest::Approx(e[2]).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("b21 is negative for positive d") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double c1 = u(rng), c2 = u(rng), d = 1e-3 + u(rng);
    REQUIRE(b21_closed(c1, c2, d) < 0.0);
  }
  // variable coefficients through the quadrature path
  for (int trial = 0; trial < 20; ++trial) {
    const double a = u(rng), s = u(rng), d0 = 0.1 + u(rng);
    ReducedSystem sys = constants(0, 0, 0, 1, 1, 0.3);
    sys.c1 = [a](double x) { return a * x; };
    sys.c2 = [s](double x) { return s + std::sin(3 * x); };
    sys.d = [d0](double x) { return d0 * (1 + x * x); };
    const auto sol = solve_reduced(sys);
    CHECK(sol.b21() < 0.0);
  }
}

TEST_CASE("terminal conditions and residuals") {
  ReducedSystem sys = constants(0, 0, 0, 0, 0, 0.7);
  sys.c1 = [](double x) { return 1 + x; };
  sys.c2 = [](double x) { return 2 - x * x; };
  sys.d = [](double x) { return 0.5 + std::cos(x); };
  sys.g1 = [](double x) { return std::exp(x); };
  sys.g2 = [](double x) { return x * x * x; };
  const auto sol = solve_reduced(sys);
  CHECK(sol.V(1.0) == doctest::Approx(sol.W(0.0) + 0.7).epsilon(1e-10));
  CHECK(std::abs(sol.W(1.0)) <= 1e-10);
  const double h = 1e-5;
  for (double x : {0.2, 0.5, 0.8}) {
    const double dv = (sol.V(x + h) - sol.V(x - h)) / (2 * h);
    const double dw = (sol.W(x + h) - sol.W(x - h)) / (2 * h);
    CHECK(-dv + sys.c1(x) * sol.V(x) == doctest::Approx(sys.g1(x)).epsilon(1e-7));
    CHECK(-dw + sys.c2(x) * sol.W(x) + sys.d(x) * sol.V(x) ==
          doctest::Approx(sys.g2(x)).epsilon(1e-7));
  }
}

TEST_CASE("exact and quadrature reduced solvers agree") {
  ConstantReducedSystem exact;
  exact.c1 = 1.5;
  exact.c2 = 0.5;
  exact.d = 0.8;
  exact.g1 = ExpPoly::polynomial({1.0, 2.0}) + ExpPoly::sinusoid(0.5, 3.0, 0.1);
  exact.g2 = ExpPoly::exponential(-2.0);
  exact.alpha = -0.4;
  const auto e = solve_reduced(exact);
  ReducedSystem sys = constants(1.5, 0.5, 0.8, 0, 0, -0.4);
  sys.g1 = [&](double x) { return exact.g1(x); };
  sys.g2 = [&](double x) { return exact.g2(x); };
  const auto n = solve_reduced(sys);
  CHECK(n.b21() == doctest::Approx(e.b21).epsilon(1e-12));
  for (double x : {0.0, 0.25, 0.6, 1.0}) {
    CHECK(n.V(x) == doctest::Approx(e.V(x)).epsilon(1e-11));
    CHECK(n.W(x) == doctest::Approx(e.W(x)).epsilon(1e-11).scale(1.0));
  }
  CHECK(e.V(1.0) == doctest::Approx(e.W(0.0) - 0.4).epsilon(1e-13));
}

TEST_CASE("expansion with zero data vanishes") {
  const auto zero = CoefficientFn::constant(0.0, 0.0, 2.0);
  const auto zphi = CoefficientFn::constant(0.0, -1.0, 0.0);
  const auto e = build_expansion(2.0, 3.0, 1.0, 1e-3, zero, zphi, 2);
  for (double x : {0.0, 1e-4, 0.5, 1.0, 1.0001, 1.7, 2.0}) CHECK(e(x) == 0.0);
}

TEST_CASE("order zero smooth parts") {
  const auto f = CoefficientFn::constant(3.0, 0.0, 2.0);
  const auto phi = CoefficientFn::cubic({0, 0, 1, 0}, -1.0, 0.0);
  SUBCASE("decoupled closed form") {
    const auto e = build_expansion(2.0, 3.0, 0.0, 1e-3, f, CoefficientFn::constant(0, -1, 0), 0);
    const auto& c0 = e.components()[0];
    for (double x : {1.0, 1.4, 2.0})
      CHECK(c0.S_plus(x) == doctest::Approx(1 - std::exp(1.5 * (x - 2))).epsilon(1e-13));
    CHECK(c0.P[0] == doctest::Approx(-c0.S_minus(0.0)));
  }
  SUBCASE("coupled residuals") {
    const double b = 2.0, c = 3.0, d = 1.0;
    const auto e = build_expansion(b, c, d, 1e-3, f, phi, 0);
    const auto& c0 = e.components()[0];
    for (double x : {0.1, 0.5, 0.9}) {
      CHECK(-b * c0.S_minus.derivative()(x) + c * c0.S_minus(x) ==
            doctest::Approx(3.0 - d * phi(x - 1)).epsilon(1e-12));
      CHECK(-b * c0.S_plus.derivative()(x + 1) + c * c0.S_plus(x + 1) + d * c0.S_minus(x) ==
            doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK(std::abs(c0.S_plus(2.0)) < 1e-13);
    CHECK(c0.S_minus(1.0) == doctest::Approx(c0.S_plus(1.0)).epsilon(1e-13));
  }
}

TEST_CASE("corrector polynomials") {
  const double b = 2.0, c = 3.0, d = 1.5;
  const auto f = CoefficientFn::constant(3.0, 0.0, 2.0);
  const auto phi = CoefficientFn::cubic({0, 0, 1, 0}, -1.0, 0.0);
  const auto e = build_expansion(b, c, d, 1e-3, f, phi, 3);
  Poly P_prev;
  Poly Q_prev;
  for (const auto& comp : e.components()) {
    const int i = comp.order;
    CHECK(comp.P.size() == static_cast<std::size_t>(i + 1));
    CHECK(comp.Q.size() == static_cast<std::size_t>(i + 2));
    CHECK(comp.P[0] == doctest::Approx(-comp.S_minus(0.0)).epsilon(1e-14));
    double scale = 1e-300;
    for (double v : comp.P) scale = std::max(scale, std::abs(v));
    for (double v : corrector_residual(comp.P, b, axpy(c, P_prev, {})))
      CHECK(std::abs(v) <= 1e-12 * scale * b * b);
    scale = 1e-300;
    for (double v : comp.Q) scale = std::max(scale, std::abs(v));
    for (double v : corrector_residual(comp.Q, b, axpy(c, Q_prev, axpy(d, comp.P, {}))))
      CHECK(std::abs(v) <= 1e-12 * scale * b * b);
    P_prev = comp.P;
    Q_prev = comp.Q;
  }
}

TEST_CASE("jumps at the shift point") {
  const auto f = CoefficientFn::constant(3.0, 0.0, 2.0);
  const auto phi = CoefficientFn::cubic({0, 0, 1, 0}, -1.0, 0.0);
  for (int k : {1, 2}) {
    std::vector<double> deltas;
    for (double eps : {1e-2, 1e-3}) {
      const auto e = build_expansion(2.0, 3.0, 1.0, eps, f, phi, k);
      CHECK(std::abs(e.jump_derivative()) <= 1e-10);
      deltas.push_back(std::abs(e.jump_delta()));
      CHECK(deltas.back() <= std::pow(eps, k));
    }
    // scales at least like ε^k
    CHECK(deltas[0] / deltas[1] >= std::pow(10.0, k) * 0.9);
  }
  // order zero: the weak layer introduces an O(ε) value jump
  const auto e0 = build_expansion(2.0, 3.0, 1.0, 1e-3, f, phi, 0);
  const auto e1 = build_expansion(2.0, 3.0, 1.0, 1e-4, f, phi, 0);
  CHECK(e0.jump_delta() / e1.jump_delta() == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(std::abs(e0.interior_layer(1.0)) ==
        doctest::Approx(1e-3 * std::abs(e0.components()[0].Q[0])).epsilon(1e-14));
}

TEST_CASE("problem-level builder") {
  auto p = paper_example(1e-3);
  CHECK_THROWS_AS(build_expansion(p, 1), ConfigError);
  ConstantData data;
  data.b = 2.0;
  data.c = 3.0;
  data.d = 1.0;
  data.f = 3.0;
  data.eps = 1e-3;
  auto q = constant_problem(data);
  q.shift_sign = -1;
  const auto e = build_expansion(q, 1);
  CHECK(e.d() == -1.0);
  CHECK(std::abs(e.boundary_beta()) < 1e-12);
  CHECK(std::abs(e(0.0)) < 1e-14);
}

TEST_CASE("sample grid") {
  const auto g = layer_sample_grid(1e-3);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 2.0);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(g.size() > 2001);
}
