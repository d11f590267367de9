#include "doctest.h"

#include <cmath>
#include <random>

#include "shiftfem/analysis.hpp"
#include "shiftfem/error.hpp"
#include "shiftfem/femcore.hpp"
#include "shiftfem/quadrature.hpp"

using namespace shiftfem;

namespace {

ProblemData constant_data(double b, double c, double d, double f, double eps, int sign = 1) {
  ProblemData p;
  p.b = CoefficientFn::constant(b, 0.0, 2.0);
  p.c = CoefficientFn::constant(c, 0.0, 2.0);
  p.d = CoefficientFn::constant(d, 0.0, 2.0);
  p.f = CoefficientFn::constant(f, 0.0, 2.0);
  p.phi = CoefficientFn::constant(0.0, -1.0, 0.0);
  p.eps = eps;
  p.shift_sign = sign;
  return p;
}

SpacePtr stype_space(MeshFamily family, int N, double eps, double sigma, double beta, int k) {
  MeshSpec s;
  s.family = family;
  s.N = N;
  s.eps = eps;
  s.sigma = sigma;
  s.beta_lb = beta;
  s.k = k;
  return make_space(build_mesh(s), k);
}

DiscreteSolution unit(const SpacePtr& space, int dof) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(space->dof_count());
  e[dof] = 1.0;
  return DiscreteSolution::from_dofs(space, e);
}

// B(u, v) by direct quadrature through point evaluation, independent of assemble().
double bilinear(const ProblemData& p, const ScalarFn& u, const ScalarFn& du,
                const DiscreteSolution& v) {
  const auto& mesh = v.space().mesh();
  const auto& rule = gauss(20);
  double sum = 0.0;
  for (int cell = 0; cell < mesh.cells(); ++cell) {
    const double a = mesh.node(cell);
    const double b = mesh.node(cell + 1);
    std::vector<double> cuts{a, b};
    for (double node : mesh.nodes())
      if (node + 1.0 > a && node + 1.0 < b) cuts.push_back(node + 1.0);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      sum += integrate(
          [&](double x) {
            const double vv = v.value_in_cell(cell, x);
            const double dv = v.derivative_in_cell(cell, x);
            double r = p.eps * du(x) * dv + (p.c(x) * u(x) - p.b(x) * du(x)) * vv;
            if (x > 1.0) r += p.shift_sign * p.d(x) * u(x - 1.0) * vv;
            return r;
          },
          cuts[j], cuts[j + 1], rule);
    }
  }
  return sum;
}

}  // namespace

TEST_CASE("Lagrange basis") {
  for (int k = 1; k <= 8; ++k) {
    LagrangeBasis basis(k);
    std::vector<double> v(k + 1);
    std::vector<double> dv(k + 1);
    for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      basis.values(t, v);
      basis.derivatives(t, dv);
      double s = 0.0;
      double ds = 0.0;
      double first = 0.0;
      for (int j = 0; j <= k; ++j) {
        s += v[j];
        ds += dv[j];
        first += dv[j] * basis.points()[j];
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(ds == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
      CHECK(first == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (int i = 0; i <= k; ++i) {
      basis.values(basis.points()[i], v);
      for (int j = 0; j <= k; ++j) CHECK(v[j] == (i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("space layout") {
  auto space = make_space(build_uniform(8), 3);
  CHECK(space->node_count() == 25);
  CHECK(space->dof_count() == 23);
  CHECK(space->global_index(2, 3) == space->global_index(3, 0));
  CHECK(space->point(3) == doctest::Approx(0.25));
  CHECK(space->point(4) == doctest::Approx(0.25 + 0.25 / 3));
}

TEST_CASE("stiffness block for pure diffusion") {
  const double eps = 0.3;
  const auto p = constant_data(0.0, 0.0, 0.0, 1.0, eps);
  auto space = make_space(build_uniform(8), 1);
  const auto sys = assemble(p, *space);
  const Eigen::MatrixXd a(sys.matrix.core);
  const double h = 0.25;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double expect = i == j ? 2 * eps / h : (std::abs(i - j) == 1 ? -eps / h : 0.0);
      CHECK(a(i, j) == doctest::Approx(expect).epsilon(1e-13).scale(1.0));
    }
    CHECK(sys.rhs[i] == doctest::Approx(h));
  }
  CHECK(sys.matrix.shift.nonZeros() == 0);
}

TEST_CASE("shift block equals the shifted mass pattern on aligned meshes") {
  const int N = 16;
  auto p = constant_data(2.0, 3.0, 1.0, 1.0, 1e-3);
  auto space = stype_space(MeshFamily::bakhvalov_s, N, 1e-3, 2.0, 2.0, 1);
  const auto sys = assemble(p, *space);
  const Eigen::MatrixXd shift(sys.matrix.shift);
  const auto& mesh = space->mesh();
  auto mass = [&](int i, int j) {
    // ∫_(0,1) φ_i φ_j with φ_0 restricted to its right cell
    if (i == j) {
      double s = 0.0;
      if (i >= 1) s += mesh.width(i - 1) / 3;
      if (i < N / 2) s += mesh.width(i) / 3;
      return s;
    }
    if (std::abs(i - j) == 1) return mesh.width(std::min(i, j)) / 6;
    return 0.0;
  };
  for (int row = 0; row < shift.rows(); ++row) {
    for (int col = 0; col < shift.cols(); ++col) {
      const int gt = row + 1;
      const int gs = col + 1;
      double expect = 0.0;
      if (gt >= N / 2 && gs <= N / 2) expect = mass(gt - N / 2, gs);
      CHECK(shift(row, col) == doctest::Approx(expect).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("builtin example shift rows touch only adjacent trial cells") {
  for (int k : {1, 2}) {
    const int N = 32;
    const auto p = paper_example(1e-4, k + 1);
    auto space = stype_space(MeshFamily::bakhvalov_s, N, 1e-4, k + 1, 2.0, k);
    const auto sys = assemble(p, *space);
    const auto& shift = sys.matrix.shift;
    for (int col = 0; col < shift.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(shift, col); it; ++it) {
        if (it.value() == 0.0) continue;
        const int gt = static_cast<int>(it.row()) + 1;
        const int gs = static_cast<int>(it.col()) + 1;
        REQUIRE(gt >= N * k / 2);
        REQUIRE(gs <= N * k / 2);
        // trial and test supports must overlap after shifting by one
        const int tcell_lo = std::max(0, (gt - N * k / 2 - 1) / k);
        const int tcell_hi = std::min(N / 2 - 1, (gt - N * k / 2) / k);
        const int scell_lo = std::max(0, (gs - 1) / k);
        const int scell_hi = std::min(N / 2 - 1, gs / k);
        CHECK(scell_lo <= tcell_hi);
        CHECK(tcell_lo <= scell_hi);
      }
    }
  }
}

TEST_CASE("assembled matrix reproduces B on polynomials") {
  auto p = paper_example(1e-2, 3.0);
  p.shift_sign = 1;
  for (int k = 2; k <= 4; ++k) {
    auto space = stype_space(MeshFamily::bakhvalov_s, 16, 1e-2, k + 1, 2.0, k);
    auto u = [](double x) { return x * (2 - x); };
    auto du = [](double x) { return 2 - 2 * x; };
    const auto ui = interpolate(u, space, BoundaryPolicy::keep);
    AssemblyOptions opts;
    opts.extra_points = 12;
    const auto sys = assemble(p, *space, opts);
    const Eigen::VectorXd applied = sys.matrix.full() * ui.dofs();
    for (int i = 0; i < space->dof_count(); i += 3) {
      const double direct = bilinear(p, u, du, unit(space, i));
      CHECK(std::abs(applied[i] - direct) <= 1e-12 * applied.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("solve basics") {
  const auto p = paper_example(1e-6, 3.0);
  auto space = stype_space(MeshFamily::bakhvalov_s, 64, 1e-6, 3.0, 2.0, 2);
  const auto sys = assemble(p, *space);
  SUBCASE("zero right-hand side") {
    const auto u = solve(space, sys.matrix, Eigen::VectorXd::Zero(space->dof_count()));
    CHECK(u.dofs().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("Galerkin residual") {
    const auto u = solve(space, sys.matrix, sys.rhs);
    const Eigen::VectorXd r = sys.matrix.full() * u.dofs() - sys.rhs;
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-9 * sys.rhs.cwiseAbs().maxCoeff());
    CHECK(evaluate(u, 0.0) == 0.0);
    CHECK(evaluate(u, 2.0) == 0.0);
    const auto& mesh = space->mesh();
    for (int i = 1; i < mesh.cells(); ++i) {
      const double x = mesh.node(i);
      CHECK(u.value_in_cell(i - 1, x) == doctest::Approx(u.value_in_cell(i, x)).epsilon(1e-12));
      CHECK(evaluate(u, x) == u.values()[static_cast<std::size_t>(space->global_index(i, 0))]);
    }
  }
  SUBCASE("mismatched eps") {
    auto q = p;
    q.eps = 1e-4;
    CHECK_THROWS_AS(assemble(q, *space), ConfigError);
  }
  SUBCASE("singular matrix") {
    SystemMatrix m;
    m.core.resize(space->dof_count(), space->dof_count());
    m.shift.resize(space->dof_count(), space->dof_count());
    CHECK_THROWS_AS(solve(space, m, sys.rhs), SolverError);
    const int n = space->dof_count();
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n - 2; ++i) t.emplace_back(i, i, 1.0);
    for (int i : {n - 2, n - 1}) {
      t.emplace_back(i, n - 2, 1.0);
      t.emplace_back(i, n - 1, 1.0);
    }
    m.core.setFromTriplets(t.begin(), t.end());
    CHECK_THROWS_AS(solve(space, m, sys.rhs), SolverError);
  }
}

TEST_CASE("interpolation") {
  auto space = stype_space(MeshFamily::shishkin, 16, 1e-3, 3.0, 1.0, 3);
  auto cubic = [](double x) { return x * (2 - x) * (x - 0.3); };
  const auto ic = interpolate(cubic, space);
  for (double x : {0.001, 0.37, 1.0, 1.41, 1.999})
    CHECK(evaluate(ic, x) == doctest::Approx(cubic(x)).epsilon(1e-12).scale(1.0));
  const auto iz = interpolate([](double) { return 0.0; }, space);
  for (double v : iz.values()) CHECK(v == 0.0);
  double dropped = 0.0;
  interpolate([](double x) { return 1.0 + x; }, space, BoundaryPolicy::force_zero, &dropped);
  CHECK(dropped == 3.0);

  auto sq = make_space(build_uniform(8), 2);
  const auto isq = interpolate([](double x) { return x * x; }, sq, BoundaryPolicy::keep);
  const auto& rule = gauss(4);
  for (double t : rule.nodes) {
    const double x = 0.75 + 0.125 * (t + 1);
    CHECK(evaluate_deriv(isq, x) == doctest::Approx(2 * x).epsilon(1e-12));
  }
  CHECK_THROWS_AS(evaluate(isq, 2.5), DomainError);
}

TEST_CASE("coercivity on random discrete functions") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> eps_exp(-6.0, -1.0);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = std::pow(10.0, eps_exp(rng));
    const int k = 1 + trial % 4;
    const double b = 1.5 + u(rng);
    const double d = 1.0 + u(rng);
    const double c = 1.0 + d / 2 + std::abs(u(rng));
    auto p = constant_data(b, c, d, 1.0, eps);
    p.gamma = c - d / 2;
    const auto family = trial % 2 ? MeshFamily::shishkin : MeshFamily::coarse_bakhvalov_s;
    SpacePtr space;
    try {
      space = stype_space(family, 16, eps, k + 1, b, k);
    } catch (const ConfigError&) {
      space = make_space(build_uniform(16), k);
    }
    const auto sys = assemble(p, *space);
    Eigen::VectorXd v(space->dof_count());
    for (auto& x : v) x = u(rng);
    const double bvv = v.dot(sys.matrix.full() * v);
    const double norm = energy_norm_for(p)(DiscreteSolution::from_dofs(space, v));
    if (bvv < (1 - 1e-10) * norm * norm) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("manufactured solution converges at rate k") {
  for (int k = 1; k <= 3; ++k) {
    const auto m = manufactured_problem(2.0, 3.0, 1.0, 1, 1e-2);
    std::vector<double> errors;
    for (int N : {32, 64, 128, 256}) {
      auto space = stype_space(MeshFamily::shishkin, N, 1e-2, k + 1, 2.0, k);
      const auto uh = solve(m.problem, space);
      errors.push_back(energy_error(uh, m.exact, m.exact_derivative, energy_norm_for(m.problem)));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
      CHECK(std::log2(errors[i] / errors[i + 1]) >= k - 0.1);
  }
}
