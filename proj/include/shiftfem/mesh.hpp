#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shiftfem {

enum class MeshFamily { shishkin, bakhvalov_s, coarse_shishkin, coarse_bakhvalov_s, uniform };

std::string_view to_string(MeshFamily family);
MeshFamily parse_family(std::string_view name);

bool is_coarse(MeshFamily family);

struct MeshSpec {
  MeshFamily family = MeshFamily::bakhvalov_s;
  int N = 16;
  double eps = 1e-2;
  double sigma = 2.0;
  double beta_lb = 1.0;
  int k = 1;
  /// Use μ = σ ε^{(k−1)/k}/β · ln N on coarse meshes.
  bool mu_log = false;
};

/// Nodes x_0 = 0 < ... < x_N = 2 with x_{N/4} = λ and x_{N/2} = 1.
class Mesh {
public:
  Mesh(std::vector<double> nodes, MeshFamily family, double lambda, double mu, double quality,
       double eps = 0.0);

  std::span<const double> nodes() const { return nodes_; }
  double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  int cells() const { return static_cast<int>(nodes_.size()) - 1; }
  double width(int cell) const { return node(cell + 1) - node(cell); }

  MeshFamily family() const { return family_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  /// max|ψ′| of the mesh generating function (0 for uniform meshes).
  double quality() const { return quality_; }
  /// ε the mesh was graded for; 0 when the mesh does not depend on ε.
  double eps() const { return eps_; }

  /// Cell containing x; x on an interior node belongs to the cell on its right,
  /// x = 2 to the last cell.
  int locate(double x) const;

  /// Transition point of the second layer region: μ on coarse meshes, λ otherwise.
  double second_transition() const { return mu_ > 0.0 ? mu_ : lambda_; }

private:
  std::vector<double> nodes_;
  MeshFamily family_;
  double lambda_;
  double mu_;
  double quality_;
  double eps_;
};

/// λ = σε/β · ln N; throws ConfigError when λ > 1/2.
double transition_lambda(const MeshSpec& spec);

/// μ = ε^{(k−1)/k}/β (1/2 for k = 1); throws ConfigError when μ > 1/2.
double transition_mu(double eps, double beta_lb, int k);
double transition_mu(const MeshSpec& spec);

Mesh build_stype(const MeshSpec& spec);
Mesh build_coarse(const MeshSpec& spec);
Mesh build_uniform(int N);
Mesh build_mesh(const MeshSpec& spec);

/// e^{−ε^{−1/k}} ≤ N^{1−k}
bool check_assumption_eps(double eps, int k, double N);

struct MaxN {
  std::int64_t value = 0;
  bool saturated = false;  // bound exceeds 2^63−1
  double log10 = 0.0;      // log10 of the unfloored bound
};

/// Largest N admitted by the coarse-mesh assumption: floor(e^{1/((k−1)ε^{1/k})}), k ≥ 2.
MaxN max_N(double eps, int k);

}  // namespace shiftfem
