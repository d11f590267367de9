#include "shiftfem/greens.hpp"

#include <algorithm>
#include <cmath>

#include "shiftfem/error.hpp"
#include "shiftfem/quadrature.hpp"

namespace shiftfem {

GreensKernel::GreensKernel(double b, double c, double eps) : b_(b), c_(c), eps_(eps) {
  if (!(b > 0.0) || !(c > 0.0) || !(eps > 0.0))
    throw ConfigError("Green's function needs b, c, eps > 0");
  const double root = std::sqrt(b * b + 4.0 * eps * c);
  rp_ = 2.0 * c / (b + root);
  m_ = b / eps + rp_;
  delta_ = root / eps;
  scale_ = eps * delta_ * -std::expm1(-delta_);
}

void GreensKernel::check(double x, double t) const {
  if (x < 0.0 || x > 1.0 || t < 0.0 || t > 1.0)
    throw DomainError("Green's function evaluated outside [0,1]^2");
}

double GreensKernel::v1(double x, int deriv) const {
  const double a = std::exp(rp_ * x);
  const double e = std::exp(-m_ * x);
  switch (deriv) {
    case 0: return (a - e) / delta_;
    case 1: return (rp_ * a + m_ * e) / delta_;
    default: return (rp_ * rp_ * a - m_ * m_ * e) / delta_;
  }
}

double GreensKernel::v2(double x, int deriv) const {
  const double a = std::exp(rp_ * (x - 1.0));
  const double e = std::exp(m_ * (1.0 - x));
  switch (deriv) {
    case 0: return (a - e) / delta_;
    case 1: return (rp_ * a + m_ * e) / delta_;
    default: return (rp_ * rp_ * a - m_ * m_ * e) / delta_;
  }
}

double GreensKernel::wronskian(double t) const {
  return v1(1.0) * std::exp(b_ / eps_ * (1.0 - t));
}

double GreensKernel::G(double x, double t) const {
  check(x, t);
  if (x <= t) {
    return (std::exp(rp_ * x) - std::exp(-m_ * x)) * std::exp(-rp_ * t) *
           -std::expm1(-delta_ * (1.0 - t)) / scale_;
  }
  return (std::exp(-m_ * (x - t)) - std::exp(-m_ * x - rp_ * t)) *
         -std::expm1(-delta_ * (1.0 - x)) / scale_;
}

double GreensKernel::Gx(double x, double t, bool from_above) const {
  check(x, t);
  if (x < t || (x == t && !from_above)) {
    return (rp_ * std::exp(rp_ * x) + m_ * std::exp(-m_ * x)) * std::exp(-rp_ * t) *
           -std::expm1(-delta_ * (1.0 - t)) / scale_;
  }
  const double a = std::exp(-m_ * (x - t));
  const double e = std::exp(-m_ * x - rp_ * t);
  const double tail = std::exp(-delta_ * (1.0 - x));
  return (m_ * (e - a) * (1.0 - tail) - delta_ * (a - e) * tail) / scale_;
}

double GreensKernel::Gx_at_0(double t) const {
  return std::exp(-rp_ * t) * -std::expm1(-delta_ * (1.0 - t)) / (eps_ * -std::expm1(-delta_));
}

double GreensKernel::Gx_at_1(double t) const {
  return -(std::exp(-m_ * (1.0 - t)) - std::exp(-m_ - rp_ * t)) /
         (eps_ * -std::expm1(-delta_));
}

GreensKernel kernel(double b, double c, double eps) { return GreensKernel(b, c, eps); }

double apply_G(const GreensKernel& k, double x, const ScalarFn& g) {
  const double anchors[] = {0.0, x, 1.0};
  return integrate_graded([&](double t) { return k.G(x, t) * g(t); }, 0.0, 1.0, anchors,
                          k.eps());
}

namespace {

// ∫_0^1 kernel(t) · h(t) dt for kernels with layers of width ε at both ends.
double layer_integral(const GreensKernel& k, const ScalarFn& integrand) {
  const double anchors[] = {0.0, 1.0};
  return integrate_graded(integrand, 0.0, 1.0, anchors, k.eps());
}

}  // namespace

double represent_u1(const GreensKernel& k, double alpha, const ScalarFn& f, double x) {
  const double b = k.b();
  const double c = k.c();
  return alpha * x + apply_G(k, x, [&](double t) { return f(t) + alpha * (b - c * t); });
}

double represent_u2(const GreensKernel& k, double d, double alpha, double delta, double beta,
                    const ScalarFn& f, double x) {
  const double b = k.b();
  const double c = k.c();
  const double y = x - 1.0;
  auto bhat = [&](double t) { return b - c * t; };
  auto chat = [&](double t) { return c + d * t; };
  auto source = [&](double t) {
    const double inner = apply_G(k, t, [&](double s) { return f(s) + alpha * bhat(s); });
    return f(t + 1.0) - (alpha + delta) * (bhat(t) + chat(t)) + beta * bhat(t) - d * inner;
  };
  return (alpha + delta) * (2.0 - x) + beta * y + apply_G(k, y, source);
}

StabilityReport alpha_stability(double b, double c, double d, double eps, const ScalarFn& f,
                                double delta, double beta) {
  const GreensKernel k(b, c, eps);
  auto bhat = [&](double t) { return b - c * t; };
  auto chat = [&](double t) { return c + d * t; };

  const double N = beta - delta +
                   layer_integral(k, [&](double t) {
                     const double inner = apply_G(k, t, f);
                     return k.Gx_at_0(t) * (f(t + 1.0) - delta * chat(t) +
                                            (beta - delta) * bhat(t) - d * inner);
                   }) -
                   layer_integral(k, [&](double t) { return k.Gx_at_1(t) * f(t); });

  const double D = 2.0 + layer_integral(k, [&](double t) { return k.Gx_at_1(t) * bhat(t); }) +
                   layer_integral(k, [&](double t) {
                     const double inner = apply_G(k, t, bhat);
                     return k.Gx_at_0(t) * (bhat(t) + chat(t) + d * inner);
                   });

  StabilityReport r;
  r.N_value = N;
  r.D_value = D;
  r.D_positive = D > 0.0;
  r.alpha = N / D;
  r.eps_times_D = eps * D;
  r.leading_D = b + d * std::exp(-c / b);
  double fmax = 0.0;
  for (int i = 0; i <= 2000; ++i) fmax = std::max(fmax, std::abs(f(i * 0.001)));
  r.data_norm = std::abs(beta) + std::abs(delta) + fmax;
  r.bound_ratio = r.data_norm > 0.0 ? std::abs(r.alpha) / r.data_norm : 0.0;
  return r;
}

std::vector<IntegralCheck> expansion_check(double b, double c, double eps) {
  const GreensKernel k(b, c, eps);
  const double e = std::exp(-c / b);
  auto one = [](double) { return 1.0; };
  auto ident = [](double s) { return s; };

  std::vector<IntegralCheck> rows(6);
  rows[0] = {"int Gx(1,t)", layer_integral(k, [&](double t) { return k.Gx_at_1(t); }), 0.0,
             -1.0 / b};
  rows[1] = {"int Gx(1,t) t", layer_integral(k, [&](double t) { return k.Gx_at_1(t) * t; }),
             0.0, -1.0 / b};
  rows[2] = {"int Gx(0,t)", layer_integral(k, [&](double t) { return k.Gx_at_0(t); }),
             b / c * (1.0 - e), (b - (2.0 * b + c) * e) / (b * b)};
  rows[3] = {"int Gx(0,t) t", layer_integral(k, [&](double t) { return k.Gx_at_0(t) * t; }),
             b / (c * c) * (b - (b + c) * e),
             (2.0 * b * b - (2.0 * b * b + 3.0 * b * c + c * c) * e) / (b * b * c)};
  rows[4] = {"int Gx(0,t) int G(t,s)",
             layer_integral(k, [&](double t) { return k.Gx_at_0(t) * apply_G(k, t, one); }),
             (b - (b + c) * e) / (c * c), -(b + c) / (b * b * b) * e};
  rows[5] = {"int Gx(0,t) int G(t,s) s",
             layer_integral(k, [&](double t) { return k.Gx_at_0(t) * apply_G(k, t, ident); }),
             (2.0 * b * b - (b * b + (b + c) * (b + c)) * e) / (c * c * c),
             (2.0 * b * b * b - (2.0 * b * b * b + 2.0 * b * b * c + 2.0 * b * c * c + c * c * c) * e) /
                 (c * c * b * b * b)};
  for (auto& r : rows) {
    r.expansion = r.inv_eps_coeff / eps + r.constant;
    r.deviation = r.value - r.expansion;
  }
  return rows;
}

double denominator_from_integrals(const std::vector<IntegralCheck>& rows, double b, double c,
                                  double d) {
  return 2.0 + b * rows[0].value - c * rows[1].value + (b + c) * rows[2].value +
         (d - c) * rows[3].value + d * (b * rows[4].value - c * rows[5].value);
}

double green_l1_norm(const GreensKernel& k, double x) {
  const double anchors[] = {0.0, x, 1.0};
  return integrate_graded([&](double t) { return std::abs(k.G(x, t)); }, 0.0, 1.0, anchors,
                          k.eps());
}

}  // namespace shiftfem
