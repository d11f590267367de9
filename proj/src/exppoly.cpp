#include "shiftfem/exppoly.hpp"

#include <algorithm>
#include <cmath>

namespace shiftfem {

namespace {

cplx horner(const std::vector<cplx>& p, cplx x) {
  cplx v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

std::vector<cplx> poly_derivative(const std::vector<cplx>& p) {
  if (p.size() <= 1) return {};
  std::vector<cplx> out(p.size() - 1);
  for (std::size_t j = 1; j < p.size(); ++j) out[j - 1] = static_cast<double>(j) * p[j];
  return out;
}

}  // namespace

ExpPoly ExpPoly::constant(double value) { return polynomial({value}); }

ExpPoly ExpPoly::polynomial(const std::vector<double>& coeffs) {
  return exponential(0.0, coeffs);
}

ExpPoly ExpPoly::exponential(double rate, const std::vector<double>& poly) {
  ExpPoly e;
  e.add_term(rate, std::vector<cplx>(poly.begin(), poly.end()));
  e.prune();
  return e;
}

ExpPoly ExpPoly::sinusoid(double amplitude, double omega, double phase) {
  // a sin(ωx + φ) = (a/2i)(e^{iφ} e^{iωx} − e^{−iφ} e^{−iωx}); keeping both
  // conjugate terms makes products exact.
  ExpPoly e;
  if (amplitude == 0.0) return e;
  if (omega == 0.0) return constant(amplitude * std::sin(phase));
  const cplx half = cplx(0.0, -0.5 * amplitude);
  e.add_term(cplx(0.0, omega), {half * std::polar(1.0, phase)});
  e.add_term(cplx(0.0, -omega), {-half * std::polar(1.0, -phase)});
  return e;
}

ExpPoly ExpPoly::from_piece(const CoefficientPiece& piece) {
  ExpPoly e = polynomial({piece.poly.begin(), piece.poly.end()});
  e += sinusoid(piece.trig.amplitude, piece.trig.omega, piece.trig.phase);
  return e;
}

double ExpPoly::operator()(double x) const {
  cplx v = 0.0;
  for (const auto& t : terms_) v += horner(t.poly, x) * std::exp(t.rate * x);
  return v.real();
}

ExpPoly ExpPoly::derivative() const {
  ExpPoly out;
  for (const auto& t : terms_) {
    auto p = poly_derivative(t.poly);
    p.resize(std::max(p.size(), t.poly.size()));
    for (std::size_t j = 0; j < t.poly.size(); ++j) p[j] += t.rate * t.poly[j];
    out.add_term(t.rate, std::move(p));
  }
  out.prune();
  return out;
}

ExpPoly ExpPoly::antiderivative() const {
  ExpPoly out;
  for (const auto& t : terms_) {
    std::vector<cplx> p;
    if (t.rate == cplx(0.0)) {
      p.resize(t.poly.size() + 1);
      for (std::size_t j = 0; j < t.poly.size(); ++j)
        p[j + 1] = t.poly[j] / static_cast<double>(j + 1);
    } else {
      // ∫ q e^{λx} = e^{λx} Σ_j (−1)^j q^{(j)} / λ^{j+1}
      p.assign(t.poly.size(), 0.0);
      std::vector<cplx> q = t.poly;
      cplx scale = 1.0 / t.rate;
      for (std::size_t j = 0; !q.empty(); ++j) {
        for (std::size_t m = 0; m < q.size(); ++m) p[m] += scale * q[m];
        scale *= -1.0 / t.rate;
        q = poly_derivative(q);
      }
    }
    out.add_term(t.rate, std::move(p));
  }
  out.prune();
  return out;
}

double ExpPoly::integral(double a, double b) const {
  const ExpPoly F = antiderivative();
  return F(b) - F(a);
}

ExpPoly ExpPoly::shifted(double s) const {
  ExpPoly out;
  for (const auto& t : terms_) {
    // p(x + s) via repeated Horner shifts (Taylor shift).
    std::vector<cplx> p = t.poly;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = n - 1; j > i; --j) p[j - 1] += s * p[j];
    const cplx factor = std::exp(t.rate * s);
    for (auto& v : p) v *= factor;
    out.add_term(t.rate, std::move(p));
  }
  out.prune();
  return out;
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other) {
  for (const auto& t : other.terms_) add_term(t.rate, t.poly);
  prune();
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& other) {
  for (const auto& t : other.terms_) {
    auto p = t.poly;
    for (auto& v : p) v = -v;
    add_term(t.rate, std::move(p));
  }
  prune();
  return *this;
}

ExpPoly& ExpPoly::operator*=(double factor) {
  for (auto& t : terms_)
    for (auto& v : t.poly) v *= factor;
  prune();
  return *this;
}

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly out;
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      std::vector<cplx> p(s.poly.size() + t.poly.size() - 1, 0.0);
      for (std::size_t i = 0; i < s.poly.size(); ++i)
        for (std::size_t j = 0; j < t.poly.size(); ++j) p[i + j] += s.poly[i] * t.poly[j];
      out.add_term(s.rate + t.rate, std::move(p));
    }
  }
  out.prune();
  return out;
}

void ExpPoly::add_term(cplx rate, std::vector<cplx> poly) {
  if (poly.empty()) return;
  for (auto& t : terms_) {
    if (t.rate == rate) {
      if (t.poly.size() < poly.size()) t.poly.resize(poly.size(), 0.0);
      for (std::size_t j = 0; j < poly.size(); ++j) t.poly[j] += poly[j];
      return;
    }
  }
  terms_.push_back({rate, std::move(poly)});
}

void ExpPoly::prune() {
  for (auto& t : terms_) {
    while (!t.poly.empty() && t.poly.back() == cplx(0.0)) t.poly.pop_back();
  }
  std::erase_if(terms_, [](const Term& t) { return t.poly.empty(); });
}

}  // namespace shiftfem
