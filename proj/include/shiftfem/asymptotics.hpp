#pragma once

#include <vector>

#include "shiftfem/exppoly.hpp"
#include "shiftfem/femcore.hpp"
#include "shiftfem/problem.hpp"

namespace shiftfem {

/// −V′ + c1 V = g1,  V(1) = W(0) + α
/// −W′ + c2 W + d V = g2,  W(1) = 0,  on (0, 1).
struct ReducedSystem {
  ScalarFn c1;
  ScalarFn c2;
  ScalarFn d;
  ScalarFn g1;
  ScalarFn g2;
  double alpha = 0.0;
};

/// b̃21 = D(e^{−C1} − e^{−C2})/(C1 − C2), or −D e^{−C1} when C1 = C2.
double b21_closed(double C1, double C2, double D);

/// V and W tabulated on Gauss panels and evaluated by polynomial interpolation.
class ReducedSolution {
public:
  ReducedSolution(std::vector<double> nodes, std::vector<double> v, std::vector<double> w,
                  int panels, double b21);

  double V(double x) const;
  double W(double x) const;
  double b21() const { return b21_; }

private:
  double interpolate(const std::vector<double>& values, double x) const;

  std::vector<double> nodes_;
  std::vector<double> v_;
  std::vector<double> w_;
  int panels_;
  double b21_;
};

/// Integrating-factor solution; throws SolverError("reduced system singular")
/// when |1 − b̃21| < 1e−12.
ReducedSolution solve_reduced(const ReducedSystem& sys);

/// Constant c1, c2, d with quasi-polynomial right-hand sides: solved exactly.
struct ConstantReducedSystem {
  double c1 = 0.0;
  double c2 = 0.0;
  double d = 0.0;
  ExpPoly g1;
  ExpPoly g2;
  double alpha = 0.0;
};

struct ExactReducedSolution {
  ExpPoly V;
  ExpPoly W;
  double w0 = 0.0;
  double b21 = 0.0;
};

ExactReducedSolution solve_reduced(const ConstantReducedSystem& sys);

/// Order-i terms of the expansion: smooth parts on (0,1) and (1,2) in the
/// global variable x, the boundary corrector P_i(ξ)e^{−bξ} and the interior
/// corrector Q_{i+1}(η)e^{−bη}.
struct ExpansionComponent {
  int order = 0;
  ExpPoly S_minus;
  ExpPoly S_plus;
  std::vector<double> P;  // ascending powers of ξ = x/ε
  std::vector<double> Q;  // ascending powers of η = (x−1)/ε
};

/// u_k = Σ ε^i S_i + Σ ε^i P_i(x/ε)e^{−bx/ε} + χ_[1,2] Σ_{i=1}^{k+1} ε^i Q_i((x−1)/ε)e^{−b(x−1)/ε}
/// for −εu″ − bu′ + cu + d u(·−1) = f with constant b, c, d.
class AsymptoticExpansion {
public:
  AsymptoticExpansion(double b, double c, double d, double eps,
                      std::vector<ExpansionComponent> components);

  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }
  double eps() const { return eps_; }
  int order() const { return static_cast<int>(components_.size()) - 1; }
  const std::vector<ExpansionComponent>& components() const { return components_; }

  /// u_k(x); x = 1 takes the value from (1, 2].
  double operator()(double x) const;
  double derivative(double x) const;
  double left_limit(double x) const;
  double left_derivative(double x) const;

  double smooth(double x) const;
  double boundary_layer(double x) const;
  double interior_layer(double x) const;

  /// u_k(1⁺) − u_k(1⁻)
  double jump_delta() const;
  /// u_k′(1⁺) − u_k′(1⁻)
  double jump_derivative() const;
  /// u_k(2)
  double boundary_beta() const;

private:
  double smooth_at(double x, bool left, int deriv) const;
  double boundary_at(double x, int deriv) const;
  double interior_at(double x, int deriv) const;

  double b_;
  double c_;
  double d_;
  double eps_;
  std::vector<ExpansionComponent> components_;
};

/// f and Φ may be piecewise with a break at the shift point; each of f on (0,1),
/// f on (1,2) and Φ on (−1,0) must be a single piece.
AsymptoticExpansion build_expansion(double b, double c, double d, double eps,
                                    const CoefficientFn& f, const CoefficientFn& phi, int order);

/// Uses s·d as the shift coefficient; rejects non-constant b, c, d.
AsymptoticExpansion build_expansion(const ProblemData& p, int order);

struct DecompositionReport {
  double sup_error = 0.0;
  double worst_x = 0.0;
  double jump_delta = 0.0;
  double boundary_beta = 0.0;
  /// −ε d/dx ln|E| and −ε d/dx ln|W| fitted over a few layer widths.
  double E_decay = 0.0;
  double W_decay = 0.0;
};

DecompositionReport decomposition_report(const AsymptoticExpansion& expansion,
                                         const DiscreteSolution& u_ref);

/// Points clustered at 0 and 1⁺ on the scale ε plus a uniform 2001-point grid.
std::vector<double> layer_sample_grid(double eps);

}  // namespace shiftfem
