#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <span>
#include <vector>

#include "shiftfem/mesh.hpp"
#include "shiftfem/problem.hpp"

namespace shiftfem {

/// Lagrange basis of degree k on [0, 1] with equidistant points j/k.
class LagrangeBasis {
public:
  explicit LagrangeBasis(int k);

  int degree() const { return static_cast<int>(points_.size()) - 1; }
  std::span<const double> points() const { return points_; }

  void values(double t, std::span<double> out) const;
  /// d/dt of each basis function.
  void derivatives(double t, std::span<double> out) const;

private:
  std::vector<double> points_;
  std::vector<double> weights_;  // barycentric weights
};

/// Continuous piecewise P_k on a mesh of (0, 2). Global Lagrange points are
/// numbered cell·k + j; the N·k − 1 interior ones carry degrees of freedom.
class DiscreteSpace {
public:
  DiscreteSpace(Mesh mesh, int k);

  const Mesh& mesh() const { return mesh_; }
  int degree() const { return k_; }
  const LagrangeBasis& basis() const { return basis_; }

  int node_count() const { return mesh_.cells() * k_ + 1; }
  int dof_count() const { return mesh_.cells() * k_ - 1; }
  int global_index(int cell, int local) const { return cell * k_ + local; }
  /// Coordinate of global Lagrange point g.
  double point(int g) const;

private:
  Mesh mesh_;
  int k_;
  LagrangeBasis basis_;
};

using SpacePtr = std::shared_ptr<const DiscreteSpace>;

SpacePtr make_space(Mesh mesh, int k);

/// Nodal values on every Lagrange point of a space, boundary included.
class DiscreteSolution {
public:
  DiscreteSolution(SpacePtr space, std::vector<double> values);

  /// Zero boundary values plus the given interior degrees of freedom.
  static DiscreteSolution from_dofs(SpacePtr space, const Eigen::VectorXd& dofs);

  const DiscreteSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::span<const double> values() const { return values_; }
  Eigen::VectorXd dofs() const;

  double value_in_cell(int cell, double x) const;
  double derivative_in_cell(int cell, double x) const;

private:
  SpacePtr space_;
  std::vector<double> values_;
};

double evaluate(const DiscreteSolution& u, double x);
double evaluate_deriv(const DiscreteSolution& u, double x);

/// Banded core (half bandwidth k in dof ordering) plus the nonlocal block
/// coupling test functions on (1, 2) to trial functions on (0, 1).
struct SystemMatrix {
  Eigen::SparseMatrix<double> core;
  Eigen::SparseMatrix<double> shift;
  int half_bandwidth = 0;

  Eigen::SparseMatrix<double> full() const { return core + shift; }
};

struct LinearSystem {
  SystemMatrix matrix;
  Eigen::VectorXd rhs;
};

struct AssemblyOptions {
  /// Gauss points per (sub)cell are k + extra_points.
  int extra_points = 3;
};

/// Entries B(φ_j, φ_i) and F(φ_i) of the Galerkin system.
LinearSystem assemble(const ProblemData& p, const DiscreteSpace& space,
                      const AssemblyOptions& options = {});

/// Sparse LU with partial pivoting; throws SolverError on a singular matrix or a
/// failed residual check.
DiscreteSolution solve(SpacePtr space, const SystemMatrix& matrix, const Eigen::VectorXd& rhs);

DiscreteSolution solve(const ProblemData& p, SpacePtr space, const AssemblyOptions& options = {});

enum class BoundaryPolicy { force_zero, keep };

/// Lagrange interpolant. With force_zero the end values are set to 0 and the
/// largest discarded |g(0)|, |g(2)| is written to dropped_boundary.
DiscreteSolution interpolate(const ScalarFn& g, SpacePtr space,
                             BoundaryPolicy policy = BoundaryPolicy::force_zero,
                             double* dropped_boundary = nullptr);

}  // namespace shiftfem
