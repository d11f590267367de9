#include "shiftfem/femcore.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "shiftfem/error.hpp"
#include "shiftfem/quadrature.hpp"

namespace shiftfem {

LagrangeBasis::LagrangeBasis(int k) {
  if (k < 1 || k > 12) throw ConfigError("polynomial degree must be in [1, 12]");
  points_.resize(k + 1);
  weights_.resize(k + 1);
  for (int j = 0; j <= k; ++j) points_[j] = static_cast<double>(j) / k;
  for (int j = 0; j <= k; ++j) {
    double w = 1.0;
    for (int m = 0; m <= k; ++m) {
      if (m != j) w *= points_[j] - points_[m];
    }
    weights_[j] = 1.0 / w;
  }
}

void LagrangeBasis::values(double t, std::span<double> out) const {
  const int n = static_cast<int>(points_.size());
  double ell = 1.0;
  for (int m = 0; m < n; ++m) {
    const double diff = t - points_[m];
    if (diff == 0.0) {
      std::fill(out.begin(), out.begin() + n, 0.0);
      out[m] = 1.0;
      return;
    }
    ell *= diff;
  }
  for (int j = 0; j < n; ++j) out[j] = ell * weights_[j] / (t - points_[j]);
}

void LagrangeBasis::derivatives(double t, std::span<double> out) const {
  const int n = static_cast<int>(points_.size());
  for (int i = 0; i < n; ++i) {
    if (t == points_[i]) {
      double diag = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        out[j] = weights_[j] / weights_[i] / (points_[i] - points_[j]);
        diag -= out[j];
      }
      out[i] = diag;
      return;
    }
  }
  std::vector<double> vals(n);
  values(t, vals);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m != j) s += 1.0 / (t - points_[m]);
    }
    out[j] = vals[j] * s;
  }
}

DiscreteSpace::DiscreteSpace(Mesh mesh, int k) : mesh_(std::move(mesh)), k_(k), basis_(k) {}

double DiscreteSpace::point(int g) const {
  const int cell = std::min(g / k_, mesh_.cells() - 1);
  const int local = g - cell * k_;
  return mesh_.node(cell) + basis_.points()[local] * mesh_.width(cell);
}

SpacePtr make_space(Mesh mesh, int k) {
  return std::make_shared<const DiscreteSpace>(std::move(mesh), k);
}

DiscreteSolution::DiscreteSolution(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != space_->node_count())
    throw ConfigError("nodal value count does not match the space");
}

DiscreteSolution DiscreteSolution::from_dofs(SpacePtr space, const Eigen::VectorXd& dofs) {
  if (dofs.size() != space->dof_count()) throw ConfigError("dof vector has wrong length");
  std::vector<double> values(static_cast<std::size_t>(space->node_count()), 0.0);
  for (int i = 0; i < dofs.size(); ++i) values[i + 1] = dofs[i];
  return DiscreteSolution(std::move(space), std::move(values));
}

Eigen::VectorXd DiscreteSolution::dofs() const {
  Eigen::VectorXd out(space_->dof_count());
  for (int i = 0; i < out.size(); ++i) out[i] = values_[i + 1];
  return out;
}

double DiscreteSolution::value_in_cell(int cell, double x) const {
  const auto& sp = *space_;
  const int k = sp.degree();
  const double h = sp.mesh().width(cell);
  double phi[13];
  sp.basis().values((x - sp.mesh().node(cell)) / h, std::span<double>(phi, k + 1));
  double v = 0.0;
  for (int j = 0; j <= k; ++j) v += values_[sp.global_index(cell, j)] * phi[j];
  return v;
}

double DiscreteSolution::derivative_in_cell(int cell, double x) const {
  const auto& sp = *space_;
  const int k = sp.degree();
  const double h = sp.mesh().width(cell);
  double dphi[13];
  sp.basis().derivatives((x - sp.mesh().node(cell)) / h, std::span<double>(dphi, k + 1));
  double v = 0.0;
  for (int j = 0; j <= k; ++j) v += values_[sp.global_index(cell, j)] * dphi[j];
  return v / h;
}

double evaluate(const DiscreteSolution& u, double x) {
  return u.value_in_cell(u.space().mesh().locate(x), x);
}

double evaluate_deriv(const DiscreteSolution& u, double x) {
  return u.derivative_in_cell(u.space().mesh().locate(x), x);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Reference-cell table of basis values and t-derivatives at the rule points.
struct BasisTable {
  std::vector<double> t;
  std::vector<double> w;
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> dphi;

  BasisTable(const LagrangeBasis& basis, const GaussRule& rule) {
    const int k = basis.degree();
    for (int q = 0; q < rule.n; ++q) {
      t.push_back(0.5 * (rule.nodes[q] + 1.0));
      w.push_back(0.5 * rule.weights[q]);
      phi.emplace_back(k + 1);
      dphi.emplace_back(k + 1);
      basis.values(t.back(), phi.back());
      basis.derivatives(t.back(), dphi.back());
    }
  }
};

void add_entry(Triplets& out, const DiscreteSpace& space, int row_g, int col_g, double v) {
  const int last = space.node_count() - 1;
  if (row_g == 0 || row_g == last || col_g == 0 || col_g == last) return;
  out.emplace_back(row_g - 1, col_g - 1, v);
}

}  // namespace

LinearSystem assemble(const ProblemData& p, const DiscreteSpace& space,
                      const AssemblyOptions& options) {
  const Mesh& mesh = space.mesh();
  if (mesh.eps() > 0.0 && std::abs(mesh.eps() - p.eps) > 1e-12 * p.eps)
    throw ConfigError("mesh was graded for eps = " + std::to_string(mesh.eps()) +
                      " but the problem has eps = " + std::to_string(p.eps));

  const int k = space.degree();
  const int n = space.dof_count();
  const double s = p.shift_sign;
  const auto d_const = p.d.constant_value();
  const bool has_shift = !(d_const && *d_const == 0.0);
  const auto& rule = gauss(k + options.extra_points);
  const BasisTable table(space.basis(), rule);

  Triplets core;
  Triplets shift;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<double> local((k + 1) * (k + 1));
  std::vector<double> local_rhs(k + 1);

  for (int cell = 0; cell < mesh.cells(); ++cell) {
    const double xl = mesh.node(cell);
    const double h = mesh.width(cell);
    const bool left_half = mesh.node(cell + 1) <= 1.0;
    std::fill(local.begin(), local.end(), 0.0);
    std::fill(local_rhs.begin(), local_rhs.end(), 0.0);

    for (std::size_t q = 0; q < table.t.size(); ++q) {
      const double x = xl + h * table.t[q];
      const double wq = table.w[q] * h;
      const double bq = p.b(x);
      const double cq = p.c(x);
      double load = p.f(x);
      if (left_half) load -= s * p.d(x) * p.phi(x - 1.0);
      const auto& phi = table.phi[q];
      const auto& dphi = table.dphi[q];
      for (int i = 0; i <= k; ++i) {
        local_rhs[i] += wq * load * phi[i];
        for (int j = 0; j <= k; ++j) {
          const double dj = dphi[j] / h;
          local[i * (k + 1) + j] +=
              wq * (p.eps * dj * dphi[i] / h + cq * phi[j] * phi[i] - bq * dj * phi[i]);
        }
      }
    }

    for (int i = 0; i <= k; ++i) {
      const int gi = space.global_index(cell, i);
      if (gi > 0 && gi < space.node_count() - 1) rhs[gi - 1] += local_rhs[i];
      for (int j = 0; j <= k; ++j)
        add_entry(core, space, gi, space.global_index(cell, j), local[i * (k + 1) + j]);
    }

    if (left_half || !has_shift) continue;

    // Shift coupling: trial functions evaluated at x − 1, split at node images.
    std::vector<double> cuts{xl, xl + h};
    for (double node : mesh.nodes()) {
      const double image = node + 1.0;
      if (image > xl && image < xl + h) cuts.push_back(image);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> phi_test(k + 1);
    std::vector<double> phi_trial(k + 1);
    std::vector<double> block((k + 1) * (k + 1));
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double a = cuts[piece];
      const double len = cuts[piece + 1] - a;
      const int trial_cell = mesh.locate(a + 0.5 * len - 1.0);
      const double tl = mesh.node(trial_cell);
      const double th = mesh.width(trial_cell);
      std::fill(block.begin(), block.end(), 0.0);
      for (std::size_t q = 0; q < table.t.size(); ++q) {
        const double x = a + len * table.t[q];
        const double wq = table.w[q] * len * s * p.d(x);
        space.basis().values((x - xl) / h, phi_test);
        space.basis().values((x - 1.0 - tl) / th, phi_trial);
        for (int i = 0; i <= k; ++i)
          for (int j = 0; j <= k; ++j) block[i * (k + 1) + j] += wq * phi_trial[j] * phi_test[i];
      }
      for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= k; ++j)
          add_entry(shift, space, space.global_index(cell, i),
                    space.global_index(trial_cell, j), block[i * (k + 1) + j]);
    }
  }

  LinearSystem sys;
  sys.matrix.core.resize(n, n);
  sys.matrix.core.setFromTriplets(core.begin(), core.end());
  sys.matrix.shift.resize(n, n);
  sys.matrix.shift.setFromTriplets(shift.begin(), shift.end());
  sys.matrix.half_bandwidth = k;
  sys.rhs = std::move(rhs);
  return sys;
}

DiscreteSolution solve(SpacePtr space, const SystemMatrix& matrix, const Eigen::VectorXd& rhs) {
  Eigen::SparseMatrix<double> a = matrix.full();
  a.makeCompressed();
  if (a.rows() != rhs.size()) throw ConfigError("right-hand side has wrong length");

  {
    Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(a.rows());
    Eigen::VectorXd col_abs = Eigen::VectorXd::Zero(a.cols());
    for (int col = 0; col < a.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
        row_abs[it.row()] += std::abs(it.value());
        col_abs[col] += std::abs(it.value());
      }
    if (a.rows() > 0 && (row_abs.minCoeff() == 0.0 || col_abs.minCoeff() == 0.0))
      throw SolverError("matrix is singular: empty row or column", 0.0);
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse LU failed: " + lu.lastErrorMessage(), 0.0);
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SolverError("sparse LU produced a non-finite solution", 0.0);

  const Eigen::VectorXd residual = a * x - rhs;
  double a_norm = 0.0;
  {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
    for (int col = 0; col < a.outerSize(); ++col)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it)
        row_sums[it.row()] += std::abs(it.value());
    a_norm = row_sums.size() > 0 ? row_sums.maxCoeff() : 0.0;
  }
  const double x_norm = x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
  const double b_norm = rhs.size() > 0 ? rhs.cwiseAbs().maxCoeff() : 0.0;
  const double r_norm = residual.size() > 0 ? residual.cwiseAbs().maxCoeff() : 0.0;
  if (r_norm > 1e-10 * (a_norm * x_norm + b_norm))
    throw SolverError("residual check failed: |Ax-b| = " + std::to_string(r_norm),
                      std::exp(lu.logAbsDeterminant() / std::max<Eigen::Index>(1, a.rows())));

  return DiscreteSolution::from_dofs(std::move(space), x);
}

DiscreteSolution solve(const ProblemData& p, SpacePtr space, const AssemblyOptions& options) {
  const auto sys = assemble(p, *space, options);
  return solve(std::move(space), sys.matrix, sys.rhs);
}

DiscreteSolution interpolate(const ScalarFn& g, SpacePtr space, BoundaryPolicy policy,
                             double* dropped_boundary) {
  const int count = space->node_count();
  std::vector<double> values(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) values[i] = g(space->point(i));
  double dropped = 0.0;
  if (policy == BoundaryPolicy::force_zero) {
    dropped = std::max(std::abs(values.front()), std::abs(values.back()));
    values.front() = 0.0;
    values.back() = 0.0;
  }
  if (dropped_boundary) *dropped_boundary = dropped;
  return DiscreteSolution(std::move(space), std::move(values));
}

}  // namespace shiftfem
