#include "doctest.h"

#include <cmath>

#include "shiftfem/error.hpp"
#include "shiftfem/mesh.hpp"

using namespace shiftfem;

namespace {

MeshSpec spec(MeshFamily family, int N, double eps, double sigma, double beta, int k = 1) {
  MeshSpec s;
  s.family = family;
  s.N = N;
  s.eps = eps;
  s.sigma = sigma;
  s.beta_lb = beta;
  s.k = k;
  return s;
}

}  // namespace

TEST_CASE("transition points") {
  CHECK(transition_lambda(spec(MeshFamily::shishkin, 16, 0.01, 2, 2)) ==
        doctest::Approx(0.0277259).epsilon(1e-6));
  CHECK(transition_lambda(spec(MeshFamily::shishkin, 16, 1e-14, 2, 2)) < 1e-12);
  CHECK_THROWS_AS(transition_lambda(spec(MeshFamily::shishkin, 16, 0.2, 5, 1)), ConfigError);
  CHECK(transition_mu(1e-4, 1.0, 2) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(transition_mu(0.3, 1.0, 1) == 0.5);
  CHECK(transition_mu(1e-6, 1.0, 3) == doctest::Approx(1e-4).epsilon(1e-10));
  CHECK_THROWS_AS(transition_mu(0.5, 1.0, 2), ConfigError);
}

TEST_CASE("S-type node formulas") {
  const Mesh sh = build_stype(spec(MeshFamily::shishkin, 8, 0.01, 2, 2));
  CHECK(sh.node(1) == doctest::Approx(0.0103972).epsilon(1e-6));
  CHECK(sh.quality() == doctest::Approx(2 * std::log(8.0)));
  const Mesh bs = build_stype(spec(MeshFamily::bakhvalov_s, 8, 0.01, 2, 2));
  CHECK(bs.quality() == 2.0);
  CHECK(bs.node(1) == doctest::Approx(0.01 * -std::log(1 - 0.5 * (1 - 1.0 / 8))));
}

TEST_CASE("coarse node formulas") {
  const Mesh m = build_coarse(spec(MeshFamily::coarse_shishkin, 16, 1e-4, 3, 1, 2));
  CHECK(m.node(12) == doctest::Approx(1.01).epsilon(1e-13));
  CHECK(m.node(13) == doctest::Approx(1.2575).epsilon(1e-13));
  CHECK(m.width(8) * 16 / 4 == doctest::Approx(m.mu()).epsilon(1e-13));
  const Mesh k1 = build_coarse(spec(MeshFamily::coarse_bakhvalov_s, 16, 1e-4, 2, 1, 1));
  CHECK(k1.node(12) == doctest::Approx(1.5));
  for (int i = 8; i < 16; ++i) CHECK(k1.width(i) == doctest::Approx(0.125));
}

TEST_CASE("mesh invariants over a parameter grid") {
  int checked = 0;
  for (auto family : {MeshFamily::shishkin, MeshFamily::bakhvalov_s, MeshFamily::coarse_shishkin,
                      MeshFamily::coarse_bakhvalov_s}) {
    for (int N = 8; N <= 1024; N *= 2) {
      for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        for (int k = 1; k <= 5; ++k) {
          const auto s = spec(family, N, eps, k + 1, 1.0, k);
          Mesh m = [&] {
            try {
              return build_mesh(s);
            } catch (const ConfigError&) {
              return Mesh({0.0, 2.0}, MeshFamily::uniform, 0, 0, 0);
            }
          }();
          if (m.cells() == 1) continue;  // transition > 1/2 for this combination
          ++checked;
          REQUIRE(m.cells() == N);
          CHECK(m.node(0) == 0.0);
          CHECK(m.node(N) == 2.0);
          for (int i = 0; i < N; ++i) REQUIRE(m.width(i) > 0.0);
          CHECK(m.node(N / 4) == doctest::Approx(m.lambda()).epsilon(1e-14));
          CHECK(m.node(N / 2) == 1.0);
          const bool shishkin =
              family == MeshFamily::shishkin || family == MeshFamily::coarse_shishkin;
          // h = σε/β·(φ(2/N) − φ(0)), the first cell
          const double phi1 = shishkin ? 4.0 / N * std::log(double(N))
                                       : -std::log1p(-4.0 / N * (1.0 - 1.0 / N));
          double smallest_layer = m.width(0);
          for (int i = 0; i < N / 4; ++i) smallest_layer = std::min(smallest_layer, m.width(i));
          CHECK(smallest_layer == doctest::Approx(s.sigma * eps * phi1).epsilon(1e-9));
          if (is_coarse(family)) {
            CHECK(m.node(3 * N / 4) == doctest::Approx(1.0 + m.mu()).epsilon(1e-14));
            for (int i = N / 4; i < N / 2; ++i)
              REQUIRE(m.width(i) == doctest::Approx(m.width(N / 4)).epsilon(1e-9));
            for (int i = N / 2; i < 3 * N / 4; ++i)
              REQUIRE(m.width(i) == doctest::Approx(m.width(N / 2)).epsilon(1e-9));
            for (int i = 3 * N / 4; i < N; ++i)
              REQUIRE(m.width(i) == doctest::Approx(m.width(3 * N / 4)).epsilon(1e-9));
          } else {
            for (int i = 0; i <= N / 2; ++i)
              REQUIRE(m.node(i + N / 2) - 1.0 == doctest::Approx(m.node(i)).epsilon(1e-12));
          }
          for (int i = 1; i < N / 4; ++i) {
            if (shishkin)
              REQUIRE(m.width(i) == doctest::Approx(m.width(0)).epsilon(1e-9));
            else
              REQUIRE(m.width(i) > m.width(i - 1));
          }
        }
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("locate") {
  const Mesh m = build_uniform(8);
  CHECK(m.locate(0.0) == 0);
  CHECK(m.locate(0.25) == 1);
  CHECK(m.locate(0.3) == 1);
  CHECK(m.locate(2.0) == 7);
  CHECK_THROWS_AS(m.locate(2.1), DomainError);
}

TEST_CASE("assumption on eps and tabulated bounds on N") {
  CHECK(max_N(1e-2, 3).value == 10);
  CHECK(max_N(1e-4, 4).value == 28);
  CHECK(max_N(1e-4, 3).value == 47675);
  CHECK(check_assumption_eps(0.5, 1, 1e9));
  CHECK(check_assumption_eps(1e-4, 4, 28));
  CHECK_FALSE(check_assumption_eps(1e-4, 4, 29));
  CHECK(check_assumption_eps(1e-3, 4, 6));
  CHECK_FALSE(check_assumption_eps(1e-3, 4, 64));
  const auto big = max_N(1e-6, 2);
  CHECK(big.saturated);
  CHECK(big.log10 == doctest::Approx(434.3).epsilon(1e-3));
  CHECK_THROWS_AS(max_N(1e-3, 1), ConfigError);
  CHECK_THROWS_AS(build_uniform(10), ConfigError);
}
