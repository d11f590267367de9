#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shiftfem {

using ScalarFn = std::function<double(double)>;

/// a·sin(ωx + φ)
struct Sinusoid {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// One piece of a CoefficientFn: a cubic plus an optional sinusoid on [lo, hi).
struct CoefficientPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::array<double, 4> poly{};  // c0 + c1 x + c2 x^2 + c3 x^3
  Sinusoid trig{};

  double value(double x) const;
  double derivative(double x) const;
};

/// Piecewise "cubic plus sinusoid" function on a closed interval.
///
/// Pieces are half-open [lo, hi) and must tile the domain without gaps; the
/// last piece also owns the right end point of the domain.
class CoefficientFn {
public:
  CoefficientFn() = default;
  explicit CoefficientFn(std::vector<CoefficientPiece> pieces);

  static CoefficientFn constant(double value, double lo, double hi);
  static CoefficientFn cubic(std::array<double, 4> poly, double lo, double hi);

  double operator()(double x) const { return piece_at(x).value(x); }
  double derivative(double x) const { return piece_at(x).derivative(x); }

  double lo() const { return pieces_.front().lo; }
  double hi() const { return pieces_.back().hi; }
  const std::vector<CoefficientPiece>& pieces() const { return pieces_; }
  const CoefficientPiece& piece_at(double x) const;

  /// The single piece covering [a, b], if there is one.
  std::optional<CoefficientPiece> piece_covering(double a, double b) const;

  /// True when every piece is the same constant.
  std::optional<double> constant_value() const;

  CoefficientFn scaled(double factor) const;

private:
  std::vector<CoefficientPiece> pieces_;
};

/// Parse "x_lo,x_hi,c0,c1,c2,c3,a,w,phi; ..." (trailing fields optional).
/// A bare number yields a constant over [lo, hi].
CoefficientFn parse_coefficient(std::string_view text, double lo, double hi);

/// Data of −εu″ − b u′ + c u + s·d u(·−1) = f on (0,2), u(2) = 0, u = Φ on (−1,0].
struct ProblemData {
  CoefficientFn b;
  CoefficientFn c;
  CoefficientFn d;
  CoefficientFn f;
  CoefficientFn phi;
  int shift_sign = +1;
  double eps = 1e-2;
  double beta_lb = 1.0;
  double gamma = 1.0;
  double sigma = 2.0;
  std::string name = "custom";
};

/// Constant data b, c, d, f (shift_sign = +1, Φ ≡ 0 unless given).
struct ConstantData {
  double b = 1.0;
  double c = 1.0;
  double d = 0.0;
  double f = 1.0;
  double eps = 1e-2;
  std::optional<double> gamma;
  double sigma = 2.0;
};

ProblemData paper_example(double eps, double sigma = 2.0);
ProblemData constant_problem(const ConstantData& data);

/// Look up a builtin by name: "paper-example" or "constant".
ProblemData builtin_problem(std::string_view name, const ConstantData& constants);

/// Manufactured problem with exact solution u*(x) = sin(πx) and history Φ(s) = s².
/// u*(1) = 0 so Φ(0) = 0 is compatible; f carries every term of the operator.
struct ManufacturedProblem {
  ProblemData problem;
  ScalarFn exact;
  ScalarFn exact_derivative;
};
ManufacturedProblem manufactured_problem(double b, double c, double d, int shift_sign,
                                         double eps, double gamma = 1.0);

struct Violation {
  std::string assumption;
  double worst_x = 0.0;
  double margin = 0.0;  // negative amount by which the assumption fails
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<Violation> warnings;
  bool ok() const { return violations.empty(); }
};

/// Check the standing assumptions on a 1000-point sampling grid.
ValidationReport validate(const ProblemData& p);

}  // namespace shiftfem
