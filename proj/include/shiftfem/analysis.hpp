#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftfem/femcore.hpp"
#include "shiftfem/mesh.hpp"
#include "shiftfem/problem.hpp"

namespace shiftfem {

/// |||v|||² = ε‖v′‖² + γ‖v‖² on (0,2).
struct EnergyNorm {
  double eps = 1.0;
  double gamma = 1.0;

  double combine(double l2_sq, double h1_sq) const { return eps * h1_sq + gamma * l2_sq; }
  double operator()(const DiscreteSolution& v) const;
};

using Interval = std::pair<double, double>;

/// Squared L² norms of (u − v) and (u − v)′, integrated on the union
/// refinement of both meshes, optionally restricted to a subinterval.
struct ErrorSquares {
  double l2 = 0.0;
  double h1 = 0.0;
};

ErrorSquares difference_squares(const DiscreteSolution& u, const DiscreteSolution& v,
                                std::optional<Interval> region = {});

double energy_error(const DiscreteSolution& u, const DiscreteSolution& ref,
                    const EnergyNorm& norm, std::optional<Interval> region = {});

/// Error against a smooth exact solution, integrated cell by cell.
double energy_error(const DiscreteSolution& u, const ScalarFn& exact,
                    const ScalarFn& exact_derivative, const EnergyNorm& norm);

EnergyNorm energy_norm_for(const ProblemData& p);

struct ReferenceSpec {
  int k = 3;
  int N = 32;
  double sigma = 4.0;
  MeshFamily family = MeshFamily::bakhvalov_s;
};

/// Degree k + 2 on a Bakhvalov-S mesh with 2·N_max cells and σ = k + 3.
ReferenceSpec reference_spec(int k, int N_max);

struct ReferenceSolution {
  ReferenceSpec spec;
  DiscreteSolution solution;
};

ReferenceSolution reference_solution(const ProblemData& p, const ReferenceSpec& spec);
ReferenceSolution reference_solution(const ProblemData& p, int k, int N_max);

/// |||u_ref(2·N_max) − u_ref(4·N_max)||| for the reference protocol of (k, N_max).
double reference_self_difference(const ProblemData& p, int k, int N_max);

struct ConvergenceRow {
  int N = 0;
  double error = 0.0;
  std::optional<double> rate;  // log2(e_N / e_2N)
};

struct ConvergenceTable {
  MeshFamily family = MeshFamily::bakhvalov_s;
  int k = 1;
  double eps = 0.0;
  double sigma = 0.0;
  std::vector<ConvergenceRow> rows;
};

/// Fill in rates between consecutive rows (N doubling).
void compute_rates(std::vector<ConvergenceRow>& rows);

struct StudyOptions {
  int jobs = 1;
  bool mu_log = false;
};

/// One solve per N with σ = p.sigma, measured against a shared reference.
ConvergenceTable convergence_study(const ProblemData& p, MeshFamily family, int k,
                                   const std::vector<int>& N_list, const DiscreteSolution& ref,
                                   const StudyOptions& options = {});

/// Runs fn(i) for i in [0, count) on up to `jobs` threads; results are placed
/// by index, so the outcome does not depend on the thread count.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

enum class LayerModel { E, W, smooth, composite };

std::string_view to_string(LayerModel model);
LayerModel parse_layer_model(std::string_view name);

/// Model layer functions with β = 1:
/// E = e^{−x/ε}, W = ε e^{−(x−1)/ε} on [1,2] (0 before), smooth = sin(πx/2),
/// composite = smooth + E + W.
struct ModelFunction {
  /// `left` selects the one-sided value at x = 1 from cells on (0,1).
  std::function<double(double x, bool left)> value;
  std::function<double(double x, bool left)> derivative;
};

ModelFunction layer_model(LayerModel model, double eps);

struct InterpolationRow {
  int N = 0;
  double l2 = 0.0;      // ‖g − Ig‖ on (0,2)
  double h1 = 0.0;      // ‖(g − Ig)′‖ on (0,2)
  double energy = 0.0;  // |||g − Ig||| with γ = 1
  /// L² errors on (0,λ), (λ,1), (1,1+t), (1+t,2), t = μ on coarse meshes and λ otherwise.
  std::array<double, 4> region_l2{};
};

struct InterpolationTable {
  LayerModel model = LayerModel::E;
  MeshFamily family = MeshFamily::bakhvalov_s;
  int k = 1;
  double eps = 0.0;
  std::vector<InterpolationRow> rows;
};

/// Cellwise Lagrange interpolation of a model function on meshes with
/// σ = k + 1 and β = 1; errors integrated with geometric grading inside cells.
InterpolationTable interpolation_study(LayerModel model, MeshFamily family, int k, double eps,
                                       const std::vector<int>& N_list, bool mu_log = false);

/// log2(a/b) for consecutive entries.
std::vector<double> observed_rates(const std::vector<double>& errors);

/// "%.5e"
std::string format_sci(double value);

/// CSV with header "N,error,rate"; the last row has an empty rate.
std::string convergence_csv(const ConvergenceTable& table);

}  // namespace shiftfem
