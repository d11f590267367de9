#pragma once

#include <string>
#include <vector>

#include "shiftfem/problem.hpp"

namespace shiftfem {

/// Green's function of −εu″ − bu′ + cu on (0,1) with u(0) = u(1) = 0 and
/// constant b, c > 0. Every quantity is evaluated in a shifted exponential form
/// that stays finite as ε → 0.
class GreensKernel {
public:
  GreensKernel(double b, double c, double eps);

  double b() const { return b_; }
  double c() const { return c_; }
  double eps() const { return eps_; }
  /// Roots of −εr² − br + c = 0.
  double r_plus() const { return rp_; }
  double r_minus() const { return -m_; }

  /// v1(0) = 0, v1′(0) = 1
  double v1(double x, int deriv = 0) const;
  /// v2(1) = 0, v2′(1) = 1; grows like e^{b(1−x)/ε}, so only usable for moderate ε.
  double v2(double x, int deriv = 0) const;
  /// w(t) = w(1) e^{(b/ε)(1−t)} with w(1) = v1(1).
  double wronskian(double t) const;

  double G(double x, double t) const;
  /// ∂G/∂x; on the diagonal the one-sided value from x > t when `from_above`.
  double Gx(double x, double t, bool from_above = false) const;
  double Gx_at_0(double t) const;
  double Gx_at_1(double t) const;

private:
  void check(double x, double t) const;

  double b_;
  double c_;
  double eps_;
  double rp_;     // r+
  double m_;      // |r−|
  double delta_;  // r+ − r−
  double scale_;  // εΔ(1 − e^{−Δ})
};

GreensKernel kernel(double b, double c, double eps);

/// ∫_0^1 G(x, t) g(t) dt with grading at t = 0, x, 1.
double apply_G(const GreensKernel& k, double x, const ScalarFn& g);

/// Representations u1 on (0,1) and u2 on (1,2) through the Green's function.
/// u2 follows the displayed formula, which lifts the boundary data with
/// (α + δ)(b̂ + ĉ) and therefore solves the shifted equation exactly only for δ = 0.
double represent_u1(const GreensKernel& k, double alpha, const ScalarFn& f, double x);
double represent_u2(const GreensKernel& k, double d, double alpha, double delta, double beta,
                    const ScalarFn& f, double x);

struct StabilityReport {
  double alpha = 0.0;
  double N_value = 0.0;
  double D_value = 0.0;
  double eps_times_D = 0.0;
  double leading_D = 0.0;  // b + d e^{−c/b}
  double data_norm = 0.0;  // |β| + |δ| + ‖f‖_∞
  double bound_ratio = 0.0;  // |α| / data_norm
  bool D_positive = true;
};

/// α = N/D for −εu″ − bu′ + cu + d u(·−1) = f on (0,2); f is sampled on [0,2].
StabilityReport alpha_stability(double b, double c, double d, double eps, const ScalarFn& f,
                                double delta, double beta);

/// The six integrals entering D and their displayed ε-expansions.
struct IntegralCheck {
  std::string name;
  double value = 0.0;
  double inv_eps_coeff = 0.0;  // coefficient of 1/ε
  double constant = 0.0;
  double expansion = 0.0;      // inv_eps_coeff/ε + constant
  double deviation = 0.0;      // value − expansion
};

std::vector<IntegralCheck> expansion_check(double b, double c, double eps);

/// D = 2 + bI1 − cI2 + (b + c)I3 + (d − c)I4 + d(bI5 − cI6) from expansion_check rows.
double denominator_from_integrals(const std::vector<IntegralCheck>& rows, double b, double c,
                                  double d);

/// ‖G(x,·)‖_{L¹(0,1)}
double green_l1_norm(const GreensKernel& k, double x);

}  // namespace shiftfem
