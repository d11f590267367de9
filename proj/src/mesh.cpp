#include "shiftfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftfem/error.hpp"

namespace shiftfem {

std::string_view to_string(MeshFamily family) {
  switch (family) {
    case MeshFamily::shishkin: return "shishkin";
    case MeshFamily::bakhvalov_s: return "bakhvalov-s";
    case MeshFamily::coarse_shishkin: return "coarse-shishkin";
    case MeshFamily::coarse_bakhvalov_s: return "coarse-bakhvalov-s";
    case MeshFamily::uniform: return "uniform";
  }
  return "?";
}

MeshFamily parse_family(std::string_view name) {
  for (auto f : {MeshFamily::shishkin, MeshFamily::bakhvalov_s, MeshFamily::coarse_shishkin,
                 MeshFamily::coarse_bakhvalov_s, MeshFamily::uniform}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown mesh family '" + std::string(name) + "'");
}

bool is_coarse(MeshFamily family) {
  return family == MeshFamily::coarse_shishkin || family == MeshFamily::coarse_bakhvalov_s;
}

Mesh::Mesh(std::vector<double> nodes, MeshFamily family, double lambda, double mu,
           double quality, double eps)
    : nodes_(std::move(nodes)),
      family_(family),
      lambda_(lambda),
      mu_(mu),
      quality_(quality),
      eps_(eps) {
  if (nodes_.size() < 2) throw ConfigError("mesh needs at least one cell");
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1]))
      throw ConfigError("mesh nodes not strictly increasing at index " + std::to_string(i));
  }
}

int Mesh::locate(double x) const {
  if (x < nodes_.front() || x > nodes_.back() || std::isnan(x))
    throw DomainError("point " + std::to_string(x) + " outside the mesh");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const int cell = static_cast<int>(it - nodes_.begin()) - 1;
  return std::min(cell, cells() - 1);
}

namespace {

void check_N(int N) {
  if (N < 8 || N % 4 != 0)
    throw ConfigError("N must be at least 8 and divisible by 4 (got " + std::to_string(N) + ")");
}

// Mesh generating function φ with φ(0) = 0, φ(1/2) = ln N.
double generator(MeshFamily family, double t, int N) {
  const double logN = std::log(static_cast<double>(N));
  switch (family) {
    case MeshFamily::shishkin:
    case MeshFamily::coarse_shishkin:
      return 2.0 * t * logN;
    case MeshFamily::bakhvalov_s:
    case MeshFamily::coarse_bakhvalov_s:
      return -std::log1p(-2.0 * t * (1.0 - 1.0 / N));
    case MeshFamily::uniform:
      break;
  }
  throw ConfigError("uniform meshes have no generating function");
}

double generator_quality(MeshFamily family, int N) {
  switch (family) {
    case MeshFamily::shishkin:
    case MeshFamily::coarse_shishkin:
      return 2.0 * std::log(static_cast<double>(N));
    case MeshFamily::bakhvalov_s:
    case MeshFamily::coarse_bakhvalov_s:
      return 2.0;
    case MeshFamily::uniform:
      return 0.0;
  }
  return 0.0;
}

// Branches one and two on [0, 1]; fills x_0..x_{N/2}.
std::vector<double> layer_part(const MeshSpec& spec, double lambda) {
  const int N = spec.N;
  std::vector<double> x(static_cast<std::size_t>(N) + 1, 0.0);
  const double scale = spec.sigma * spec.eps / spec.beta_lb;
  for (int i = 1; i < N / 4; ++i)
    x[i] = scale * generator(spec.family, 2.0 * i / N, N);
  x[N / 4] = lambda;
  for (int i = N / 4 + 1; i < N / 2; ++i)
    x[i] = 4.0 * i / N * (1.0 - lambda) + 2.0 * lambda - 1.0;
  x[N / 2] = 1.0;
  return x;
}

}  // namespace

double transition_lambda(const MeshSpec& spec) {
  check_N(spec.N);
  if (!(spec.eps > 0.0) || !(spec.beta_lb > 0.0) || !(spec.sigma > 0.0))
    throw ConfigError("transition point needs eps, beta, sigma > 0");
  const double lambda = spec.sigma * spec.eps / spec.beta_lb * std::log(static_cast<double>(spec.N));
  if (lambda > 0.5)
    throw ConfigError("transition point lambda = " + std::to_string(lambda) +
                      " exceeds 1/2: eps is too large for N = " + std::to_string(spec.N));
  return lambda;
}

double transition_mu(double eps, double beta_lb, int k) {
  if (k < 1) throw ConfigError("polynomial degree must be at least 1");
  if (k == 1) return 0.5;
  const double mu = std::pow(eps, static_cast<double>(k - 1) / k) / beta_lb;
  if (mu > 0.5)
    throw ConfigError("transition point mu = " + std::to_string(mu) + " exceeds 1/2");
  return mu;
}

double transition_mu(const MeshSpec& spec) {
  if (!spec.mu_log || spec.k == 1) return transition_mu(spec.eps, spec.beta_lb, spec.k);
  const double mu = spec.sigma * std::pow(spec.eps, static_cast<double>(spec.k - 1) / spec.k) /
                    spec.beta_lb * std::log(static_cast<double>(spec.N));
  if (mu > 0.5)
    throw ConfigError("transition point mu = " + std::to_string(mu) + " exceeds 1/2");
  return mu;
}

Mesh build_stype(const MeshSpec& spec) {
  if (spec.family != MeshFamily::shishkin && spec.family != MeshFamily::bakhvalov_s)
    throw ConfigError("build_stype needs a Shishkin or Bakhvalov-S family");
  const double lambda = transition_lambda(spec);
  auto x = layer_part(spec, lambda);
  const int N = spec.N;
  for (int i = N / 2 + 1; i <= N; ++i) x[i] = 1.0 + x[i - N / 2];
  return Mesh(std::move(x), spec.family, lambda, 0.0, generator_quality(spec.family, N),
              spec.eps);
}

Mesh build_coarse(const MeshSpec& spec) {
  if (!is_coarse(spec.family)) throw ConfigError("build_coarse needs a coarse family");
  const double lambda = transition_lambda(spec);
  const double mu = transition_mu(spec);
  auto x = layer_part(spec, lambda);
  const int N = spec.N;
  for (int i = N / 2 + 1; i < 3 * N / 4; ++i) x[i] = 1.0 + mu * (4.0 * i / N - 2.0);
  x[3 * N / 4] = 1.0 + mu;
  for (int i = 3 * N / 4 + 1; i < N; ++i) x[i] = 4.0 * i / N * (1.0 - mu) + 4.0 * mu - 2.0;
  x[N] = 2.0;
  return Mesh(std::move(x), spec.family, lambda, mu, generator_quality(spec.family, N),
              spec.eps);
}

Mesh build_uniform(int N) {
  check_N(N);
  std::vector<double> x(static_cast<std::size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) x[i] = 2.0 * i / N;
  x[N / 2] = 1.0;
  x[N] = 2.0;
  return Mesh(std::move(x), MeshFamily::uniform, 0.5, 0.0, 0.0);
}

Mesh build_mesh(const MeshSpec& spec) {
  switch (spec.family) {
    case MeshFamily::shishkin:
    case MeshFamily::bakhvalov_s:
      return build_stype(spec);
    case MeshFamily::coarse_shishkin:
    case MeshFamily::coarse_bakhvalov_s:
      return build_coarse(spec);
    case MeshFamily::uniform:
      return build_uniform(spec.N);
  }
  throw ConfigError("unknown mesh family");
}

bool check_assumption_eps(double eps, int k, double N) {
  if (k <= 1) return true;
  // e^{−ε^{−1/k}} ≤ N^{1−k}  ⇔  −ε^{−1/k} ≤ (1−k) ln N
  return -std::pow(eps, -1.0 / k) <= (1.0 - k) * std::log(N);
}

MaxN max_N(double eps, int k) {
  if (k < 2) throw ConfigError("max_N needs k >= 2");
  const double exponent = 1.0 / ((k - 1) * std::pow(eps, 1.0 / k));
  MaxN out;
  out.log10 = exponent / std::log(10.0);
  constexpr auto cap = std::numeric_limits<std::int64_t>::max();
  if (exponent >= std::log(static_cast<double>(cap))) {
    out.value = cap;
    out.saturated = true;
  } else {
    out.value = static_cast<std::int64_t>(std::floor(std::exp(exponent)));
  }
  return out;
}

}  // namespace shiftfem
