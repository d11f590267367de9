#include "shiftfem/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "shiftfem/error.hpp"

namespace shiftfem {

double CoefficientPiece::value(double x) const {
  double v = poly[0] + x * (poly[1] + x * (poly[2] + x * poly[3]));
  if (trig.amplitude != 0.0) v += trig.amplitude * std::sin(trig.omega * x + trig.phase);
  return v;
}

double CoefficientPiece::derivative(double x) const {
  double v = poly[1] + x * (2.0 * poly[2] + x * 3.0 * poly[3]);
  if (trig.amplitude != 0.0)
    v += trig.amplitude * trig.omega * std::cos(trig.omega * x + trig.phase);
  return v;
}

CoefficientFn::CoefficientFn(std::vector<CoefficientPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ConfigError("coefficient function needs at least one piece");
  std::sort(pieces_.begin(), pieces_.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].hi > pieces_[i].lo))
      throw ConfigError("coefficient piece has empty interval");
    if (i > 0 && pieces_[i].lo != pieces_[i - 1].hi)
      throw ConfigError("coefficient pieces leave a gap or overlap at " +
                        std::to_string(pieces_[i].lo));
  }
}

CoefficientFn CoefficientFn::constant(double value, double lo, double hi) {
  return cubic({value, 0.0, 0.0, 0.0}, lo, hi);
}

CoefficientFn CoefficientFn::cubic(std::array<double, 4> poly, double lo, double hi) {
  CoefficientPiece piece;
  piece.lo = lo;
  piece.hi = hi;
  piece.poly = poly;
  return CoefficientFn({piece});
}

const CoefficientPiece& CoefficientFn::piece_at(double x) const {
  if (pieces_.empty()) throw DomainError("empty coefficient function");
  if (x < lo() || x > hi() || std::isnan(x))
    throw DomainError("coefficient evaluated at " + std::to_string(x) + " outside [" +
                      std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const CoefficientPiece& p) { return v < p.hi; });
  if (it == pieces_.end()) return pieces_.back();
  return *it;
}

std::optional<CoefficientPiece> CoefficientFn::piece_covering(double a, double b) const {
  for (const auto& p : pieces_) {
    if (p.lo <= a && b <= p.hi) return p;
  }
  return std::nullopt;
}

std::optional<double> CoefficientFn::constant_value() const {
  const double v = pieces_.front().poly[0];
  for (const auto& p : pieces_) {
    if (p.poly[0] != v || p.poly[1] != 0.0 || p.poly[2] != 0.0 || p.poly[3] != 0.0 ||
        p.trig.amplitude != 0.0)
      return std::nullopt;
  }
  return v;
}

CoefficientFn CoefficientFn::scaled(double factor) const {
  auto pieces = pieces_;
  for (auto& p : pieces) {
    for (auto& c : p.poly) c *= factor;
    p.trig.amplitude *= factor;
  }
  return CoefficientFn(std::move(pieces));
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_number(std::string_view text) {
  const std::string s = trim(text);
  if (s == "pi") return std::numbers::pi;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace

CoefficientFn parse_coefficient(std::string_view text, double lo, double hi) {
  const std::string body = trim(text);
  if (body.empty()) throw ConfigError("empty coefficient specification");
  if (body.find(',') == std::string::npos && body.find(';') == std::string::npos)
    return CoefficientFn::constant(parse_number(body), lo, hi);

  std::vector<CoefficientPiece> pieces;
  std::stringstream all(body);
  std::string piece_text;
  while (std::getline(all, piece_text, ';')) {
    if (trim(piece_text).empty()) continue;
    std::vector<double> fields;
    std::stringstream ps(piece_text);
    std::string field;
    while (std::getline(ps, field, ',')) fields.push_back(parse_number(field));
    if (fields.size() < 3 || fields.size() > 9)
      throw ConfigError("coefficient piece needs x_lo,x_hi,c0[,c1,c2,c3,a,w,phi]: '" +
                        trim(piece_text) + "'");
    fields.resize(9, 0.0);
    CoefficientPiece p;
    p.lo = fields[0];
    p.hi = fields[1];
    p.poly = {fields[2], fields[3], fields[4], fields[5]};
    p.trig = {fields[6], fields[7], fields[8]};
    pieces.push_back(p);
  }
  CoefficientFn fn(std::move(pieces));
  if (fn.lo() > lo || fn.hi() < hi)
    throw ConfigError("coefficient pieces do not cover [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  return fn;
}

ProblemData paper_example(double eps, double sigma) {
  ProblemData p;
  p.name = "paper-example";
  p.b = CoefficientFn::cubic({2.0, 1.0, 0.0, 0.0}, 0.0, 2.0);
  p.c = CoefficientFn::cubic({3.0, 1.0, 0.0, 0.0}, 0.0, 2.0);

  CoefficientPiece left;
  left.lo = 0.0;
  left.hi = 1.0;
  left.poly = {1.0, -1.0, 0.0, 0.0};
  CoefficientPiece right;
  right.lo = 1.0;
  right.hi = 2.0;
  right.poly = {2.0, 0.0, 0.0, 0.0};
  right.trig = {1.0, 4.0 * std::numbers::pi, 0.0};
  p.d = CoefficientFn({left, right});

  p.f = CoefficientFn::constant(3.0, 0.0, 2.0);
  p.phi = CoefficientFn::cubic({0.0, 0.0, 1.0, 0.0}, -1.0, 0.0);
  p.shift_sign = -1;
  p.eps = eps;
  p.beta_lb = 2.0;
  p.gamma = 1.0;
  p.sigma = sigma;
  return p;
}

ProblemData constant_problem(const ConstantData& data) {
  ProblemData p;
  p.name = "constant";
  p.b = CoefficientFn::constant(data.b, 0.0, 2.0);
  p.c = CoefficientFn::constant(data.c, 0.0, 2.0);
  p.d = CoefficientFn::constant(data.d, 0.0, 2.0);
  p.f = CoefficientFn::constant(data.f, 0.0, 2.0);
  p.phi = CoefficientFn::constant(0.0, -1.0, 0.0);
  p.shift_sign = +1;
  p.eps = data.eps;
  p.beta_lb = data.b;
  const double natural = data.c - std::abs(data.d) / 2.0;
  p.gamma = data.gamma.value_or(natural > 0.0 ? natural : 1.0);
  p.sigma = data.sigma;
  return p;
}

ProblemData builtin_problem(std::string_view name, const ConstantData& constants) {
  if (name == "paper-example") return paper_example(constants.eps, constants.sigma);
  if (name == "constant") return constant_problem(constants);
  throw ConfigError("unknown builtin problem '" + std::string(name) + "'");
}

ManufacturedProblem manufactured_problem(double b, double c, double d, int shift_sign,
                                         double eps, double gamma) {
  using std::numbers::pi;
  const double s = shift_sign;
  // A sin(πx) + B cos(πx) = R sin(πx + θ)
  auto sinusoid = [](double a_sin, double b_cos) {
    return Sinusoid{std::hypot(a_sin, b_cos), pi, std::atan2(b_cos, a_sin)};
  };

  // (0,1): −εu″ − bu′ + cu + s·d·Φ(x−1), Φ(x−1) = (x−1)²
  CoefficientPiece left;
  left.lo = 0.0;
  left.hi = 1.0;
  left.poly = {s * d, -2.0 * s * d, s * d, 0.0};
  left.trig = sinusoid(eps * pi * pi + c, -b * pi);

  // (1,2): u*(x−1) = −sin(πx)
  CoefficientPiece right;
  right.lo = 1.0;
  right.hi = 2.0;
  right.trig = sinusoid(eps * pi * pi + c - s * d, -b * pi);

  ManufacturedProblem m;
  auto& p = m.problem;
  p.name = "manufactured";
  p.b = CoefficientFn::constant(b, 0.0, 2.0);
  p.c = CoefficientFn::constant(c, 0.0, 2.0);
  p.d = CoefficientFn::constant(d, 0.0, 2.0);
  p.f = CoefficientFn({left, right});
  p.phi = CoefficientFn::cubic({0.0, 0.0, 1.0, 0.0}, -1.0, 0.0);
  p.shift_sign = shift_sign;
  p.eps = eps;
  p.beta_lb = b;
  p.gamma = gamma;
  m.exact = [](double x) { return std::sin(pi * x); };
  m.exact_derivative = [](double x) { return pi * std::cos(pi * x); };
  return m;
}

ValidationReport validate(const ProblemData& p) {
  ValidationReport report;
  auto fail = [&](std::string what, double x, double margin) {
    report.violations.push_back({std::move(what), x, margin});
  };

  if (!(p.eps > 0.0)) fail("eps > 0", 0.0, p.eps);
  if (!(p.beta_lb > 0.0)) fail("beta > 0", 0.0, p.beta_lb);
  if (!(p.gamma > 0.0)) fail("gamma > 0", 0.0, p.gamma);
  if (!(p.sigma >= 1.0)) fail("sigma >= 1", 0.0, p.sigma - 1.0);
  if (p.shift_sign != 1 && p.shift_sign != -1) fail("shift_sign in {+1,-1}", 0.0, 0.0);

  for (const auto* fn : {&p.b, &p.c, &p.d, &p.f}) {
    if (fn->pieces().empty() || fn->lo() > 0.0 || fn->hi() < 2.0) {
      fail("coefficient defined on [0,2]", 0.0, 0.0);
      return report;
    }
  }
  if (p.phi.pieces().empty() || p.phi.lo() > -1.0 || p.phi.hi() < 0.0) {
    fail("history defined on [-1,0]", 0.0, 0.0);
    return report;
  }
  if (std::abs(p.phi(0.0)) > 1e-14) fail("Phi(0) = 0", 0.0, -std::abs(p.phi(0.0)));

  constexpr int samples = 1000;
  auto grid = [](double lo, double hi, int i) {
    return lo + (hi - lo) * static_cast<double>(i) / (samples - 1);
  };

  double d_sup = 0.0;
  double d_min = std::numeric_limits<double>::infinity();
  double d_min_x = 1.0;
  for (int i = 0; i < samples; ++i) {
    const double x = grid(1.0, 2.0, i);
    const double v = p.shift_sign * p.d(x);
    d_sup = std::max(d_sup, std::abs(v));
    if (v < d_min) {
      d_min = v;
      d_min_x = x;
    }
  }

  double b_margin = std::numeric_limits<double>::infinity();
  double b_x = 0.0;
  double coer_margin = std::numeric_limits<double>::infinity();
  double coer_x = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = grid(0.0, 2.0, i);
    const double bm = p.b(x) - p.beta_lb;
    if (bm < b_margin) {
      b_margin = bm;
      b_x = x;
    }
    const double cm = p.c(x) - p.b.derivative(x) / 2.0 - d_sup / 2.0 - p.gamma;
    if (cm < coer_margin) {
      coer_margin = cm;
      coer_x = x;
    }
  }

  if (b_margin < 0.0) fail("b >= beta", b_x, b_margin);

  const bool literal = p.shift_sign == +1;
  if (coer_margin < 0.0) {
    Violation v{"c - b'/2 - |d|_inf/2 >= gamma fails", coer_x, coer_margin};
    (literal ? report.violations : report.warnings).push_back(v);
  }
  if (d_min < 0.0) {
    Violation v{"d >= 0 on (1,2)", d_min_x, d_min};
    if (literal)
      report.violations.push_back(v);
    else
      report.warnings.push_back({"d >= 0 does not apply with shift_sign = -1", d_min_x, d_min});
  }
  return report;
}

}  // namespace shiftfem
