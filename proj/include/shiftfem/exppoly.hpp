#pragma once

#include <complex>
#include <vector>

#include "shiftfem/problem.hpp"

namespace shiftfem {

using cplx = std::complex<double>;

/// Finite sum Σ p_j(x)·e^{λ_j x} with complex rates and complex polynomial
/// coefficients that represents a real function (complex terms come in
/// conjugate pairs; evaluation returns the real part). Closed under sums, products, derivatives, shifts
/// and antiderivatives, which is all the constant-coefficient expansion needs.
class ExpPoly {
public:
  struct Term {
    cplx rate;
    std::vector<cplx> poly;  // ascending powers of x
  };

  ExpPoly() = default;

  static ExpPoly constant(double value);
  static ExpPoly polynomial(const std::vector<double>& coeffs);
  /// p(x)·e^{rate·x}
  static ExpPoly exponential(double rate, const std::vector<double>& poly = {1.0});
  /// a·sin(ωx + φ)
  static ExpPoly sinusoid(double amplitude, double omega, double phase);
  /// One piece of a CoefficientFn as a global expression.
  static ExpPoly from_piece(const CoefficientPiece& piece);

  double operator()(double x) const;
  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  ExpPoly derivative() const;
  /// An antiderivative; λ = 0 terms are integrated as polynomials.
  ExpPoly antiderivative() const;
  double integral(double a, double b) const;
  /// x ↦ g(x + s)
  ExpPoly shifted(double s) const;

  ExpPoly& operator+=(const ExpPoly& other);
  ExpPoly& operator-=(const ExpPoly& other);
  ExpPoly& operator*=(double factor);

  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }
  friend ExpPoly operator*(ExpPoly a, double s) { return a *= s; }
  friend ExpPoly operator*(double s, ExpPoly a) { return a *= s; }
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);

private:
  void add_term(cplx rate, std::vector<cplx> poly);
  void prune();

  std::vector<Term> terms_;
};

}  // namespace shiftfem
