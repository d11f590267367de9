#include "shiftfem/asymptotics.hpp"

#include <algorithm>
#include <cmath>

#include "shiftfem/error.hpp"
#include "shiftfem/quadrature.hpp"

namespace shiftfem {

namespace {

constexpr int kPanels = 32;
constexpr int kPanelPoints = 16;

using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
  return v;
}

Poly poly_deriv(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly out(p.size() - 1);
  for (std::size_t j = 1; j < p.size(); ++j) out[j - 1] = static_cast<double>(j) * p[j];
  return out;
}

Poly poly_integral(const Poly& p) {
  Poly out(p.size() + 1, 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) out[j + 1] = p[j] / static_cast<double>(j + 1);
  return out;
}

Poly poly_axpy(double a, const Poly& x, const Poly& y) {
  Poly out(std::max(x.size(), y.size()), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) out[j] += a * x[j];
  for (std::size_t j = 0; j < y.size(); ++j) out[j] += y[j];
  return out;
}

// Polynomial solution of q′ − b q = r: q = −(1/b) Σ_j r^{(j)} / b^j.
Poly solve_first_order(const Poly& r, double b) {
  Poly q(r.size(), 0.0);
  Poly deriv = r;
  double scale = -1.0 / b;
  while (!deriv.empty()) {
    for (std::size_t m = 0; m < deriv.size(); ++m) q[m] += scale * deriv[m];
    scale /= b;
    deriv = poly_deriv(deriv);
  }
  return q;
}

// Gauss panels on [0, 1] with a cumulative integration matrix.
struct PanelGrid {
  std::vector<double> ref;      // reference nodes on [−1, 1]
  std::vector<double> weights;  // Gauss weights
  std::vector<double> bary;     // barycentric weights of the reference nodes
  std::vector<double> cumul;    // cumul[i*n + j] = ∫_{−1}^{t_i} ℓ_j
  std::vector<double> x;        // all physical nodes, panel-major

  PanelGrid() {
    const auto& rule = gauss(kPanelPoints);
    ref = rule.nodes;
    weights = rule.weights;
    const int n = kPanelPoints;
    bary.assign(n, 1.0);
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        if (m != j) bary[j] /= ref[j] - ref[m];
    cumul.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double half = 0.5 * (ref[i] + 1.0);
      for (int q = 0; q < n; ++q) {
        const double s = -1.0 + half * (rule.nodes[q] + 1.0);
        for (int j = 0; j < n; ++j) cumul[i * n + j] += half * rule.weights[q] * lagrange(j, s);
      }
    }
    const double h = 1.0 / kPanels;
    for (int p = 0; p < kPanels; ++p)
      for (int i = 0; i < n; ++i) x.push_back(h * (p + 0.5 * (ref[i] + 1.0)));
  }

  double lagrange(int j, double s) const {
    double v = 1.0;
    for (int m = 0; m < kPanelPoints; ++m)
      if (m != j) v *= (s - ref[m]) / (ref[j] - ref[m]);
    return v;
  }

  // Values of ∫_0^x y at every node, and ∫_0^1 y.
  std::pair<std::vector<double>, double> cumulative(const std::vector<double>& y) const {
    const int n = kPanelPoints;
    const double half = 0.5 / kPanels;
    std::vector<double> out(y.size());
    double base = 0.0;
    for (int p = 0; p < kPanels; ++p) {
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += cumul[i * n + j] * y[p * n + j];
        out[p * n + i] = base + half * s;
      }
      double total = 0.0;
      for (int j = 0; j < n; ++j) total += weights[j] * y[p * n + j];
      base += half * total;
    }
    return {out, base};
  }
};

const PanelGrid& panel_grid() {
  static const PanelGrid grid;
  return grid;
}

std::vector<double> tabulate(const ScalarFn& g) {
  const auto& x = panel_grid().x;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = g(x[i]);
  return out;
}

}  // namespace

double b21_closed(double C1, double C2, double D) {
  if (C1 == C2) return -D * std::exp(-C1);
  return D * (std::exp(-C1) - std::exp(-C2)) / (C1 - C2);
}

ReducedSolution::ReducedSolution(std::vector<double> nodes, std::vector<double> v,
                                 std::vector<double> w, int panels, double b21)
    : nodes_(std::move(nodes)), v_(std::move(v)), w_(std::move(w)), panels_(panels), b21_(b21) {}

double ReducedSolution::interpolate(const std::vector<double>& values, double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("reduced solution evaluated outside [0, 1]");
  const auto& grid = panel_grid();
  const int p = std::min(static_cast<int>(x * panels_), panels_ - 1);
  const double s = 2.0 * (x * panels_ - p) - 1.0;
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < kPanelPoints; ++j) {
    const double diff = s - grid.ref[j];
    if (diff == 0.0) return values[p * kPanelPoints + j];
    const double t = grid.bary[j] / diff;
    num += t * values[p * kPanelPoints + j];
    den += t;
  }
  return num / den;
}

double ReducedSolution::V(double x) const { return interpolate(v_, x); }
double ReducedSolution::W(double x) const { return interpolate(w_, x); }

ReducedSolution solve_reduced(const ReducedSystem& sys) {
  const auto& grid = panel_grid();
  const std::size_t n = grid.x.size();
  const auto c1 = tabulate(sys.c1);
  const auto c2 = tabulate(sys.c2);
  const auto d = tabulate(sys.d);
  const auto g1 = tabulate(sys.g1);
  const auto g2 = tabulate(sys.g2);

  const auto [C1, C1_end] = grid.cumulative(c1);
  const auto [C2, C2_end] = grid.cumulative(c2);

  // V = V_p + A·V_h with V_h(x) = e^{C1(x) − C1(1)}, V_p(1) = 0.
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(-C1[i]) * g1[i];
  const auto [I1, I1_end] = grid.cumulative(y);
  std::vector<double> vp(n), vh(n);
  for (std::size_t i = 0; i < n; ++i) {
    vp[i] = std::exp(C1[i]) * (I1_end - I1[i]);
    vh[i] = std::exp(C1[i] - C1_end);
  }

  // W = W_p + A·W_h, both vanishing at 1.
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(-C2[i]) * (g2[i] - d[i] * vp[i]);
  const auto [J, J_end] = grid.cumulative(y);
  for (std::size_t i = 0; i < n; ++i) y[i] = -std::exp(-C2[i]) * d[i] * vh[i];
  const auto [K, K_end] = grid.cumulative(y);
  std::vector<double> wp(n), wh(n);
  for (std::size_t i = 0; i < n; ++i) {
    wp[i] = std::exp(C2[i]) * (J_end - J[i]);
    wh[i] = std::exp(C2[i]) * (K_end - K[i]);
  }
  // Values at x = 0, where C1 = C2 = 0.
  const double wp0 = J_end;
  const double b21 = K_end;

  if (std::abs(1.0 - b21) < 1e-12)
    throw SolverError("reduced system singular (b21 = 1)", 1.0 - b21);
  const double A = (wp0 + sys.alpha) / (1.0 - b21);

  std::vector<double> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = vp[i] + A * vh[i];
    w[i] = wp[i] + A * wh[i];
  }
  return ReducedSolution(grid.x, std::move(v), std::move(w), kPanels, b21);
}

ExactReducedSolution solve_reduced(const ConstantReducedSystem& sys) {
  const double b21 = b21_closed(sys.c1, sys.c2, sys.d);
  if (std::abs(1.0 - b21) < 1e-12)
    throw SolverError("reduced system singular (b21 = 1)", 1.0 - b21);

  const ExpPoly up1 = ExpPoly::exponential(sys.c1);
  const ExpPoly down1 = ExpPoly::exponential(-sys.c1);
  const ExpPoly up2 = ExpPoly::exponential(sys.c2);
  const ExpPoly down2 = ExpPoly::exponential(-sys.c2);

  // e^{a x}(F(1) − F(x)) with F an antiderivative of e^{−a x} g.
  auto backward = [](const ExpPoly& up, const ExpPoly& down, const ExpPoly& g) {
    const ExpPoly F = (down * g).antiderivative();
    return up * (ExpPoly::constant(F(1.0)) - F);
  };

  const ExpPoly vp = backward(up1, down1, sys.g1);
  const ExpPoly vh = ExpPoly::exponential(sys.c1) * std::exp(-sys.c1);
  const ExpPoly wp = backward(up2, down2, sys.g2 - sys.d * vp);
  const ExpPoly wh = backward(up2, down2, -sys.d * vh);

  const double A = (wp(0.0) + sys.alpha) / (1.0 - b21);
  ExactReducedSolution out;
  out.V = vp + A * vh;
  out.W = wp + A * wh;
  out.w0 = A - sys.alpha;
  out.b21 = b21;
  return out;
}

AsymptoticExpansion::AsymptoticExpansion(double b, double c, double d, double eps,
                                         std::vector<ExpansionComponent> components)
    : b_(b), c_(c), d_(d), eps_(eps), components_(std::move(components)) {}

double AsymptoticExpansion::smooth_at(double x, bool left, int deriv) const {
  double v = 0.0;
  double scale = 1.0;
  for (const auto& comp : components_) {
    ExpPoly s = left ? comp.S_minus : comp.S_plus;
    for (int j = 0; j < deriv; ++j) s = s.derivative();
    v += scale * s(x);
    scale *= eps_;
  }
  return v;
}

double AsymptoticExpansion::boundary_at(double x, int deriv) const {
  const double xi = x / eps_;
  const double decay = std::exp(-b_ * xi);
  if (decay == 0.0) return 0.0;
  double v = 0.0;
  double scale = 1.0;
  for (const auto& comp : components_) {
    const double p = poly_eval(comp.P, xi);
    v += scale * (deriv == 0 ? p : (poly_eval(poly_deriv(comp.P), xi) - b_ * p) / eps_);
    scale *= eps_;
  }
  return v * decay;
}

double AsymptoticExpansion::interior_at(double x, int deriv) const {
  if (x < 1.0) return 0.0;
  const double eta = (x - 1.0) / eps_;
  const double decay = std::exp(-b_ * eta);
  if (decay == 0.0) return 0.0;
  double v = 0.0;
  double scale = eps_;
  for (const auto& comp : components_) {
    const double q = poly_eval(comp.Q, eta);
    v += scale * (deriv == 0 ? q : (poly_eval(poly_deriv(comp.Q), eta) - b_ * q) / eps_);
    scale *= eps_;
  }
  return v * decay;
}

double AsymptoticExpansion::operator()(double x) const {
  if (x < 0.0 || x > 2.0) throw DomainError("expansion evaluated outside [0, 2]");
  return smooth_at(x, x < 1.0, 0) + boundary_at(x, 0) + interior_at(x, 0);
}

double AsymptoticExpansion::derivative(double x) const {
  if (x < 0.0 || x > 2.0) throw DomainError("expansion evaluated outside [0, 2]");
  return smooth_at(x, x < 1.0, 1) + boundary_at(x, 1) + interior_at(x, 1);
}

double AsymptoticExpansion::left_limit(double x) const {
  return smooth_at(x, x <= 1.0, 0) + boundary_at(x, 0) + (x > 1.0 ? interior_at(x, 0) : 0.0);
}

double AsymptoticExpansion::left_derivative(double x) const {
  return smooth_at(x, x <= 1.0, 1) + boundary_at(x, 1) + (x > 1.0 ? interior_at(x, 1) : 0.0);
}

double AsymptoticExpansion::smooth(double x) const { return smooth_at(x, x < 1.0, 0); }
double AsymptoticExpansion::boundary_layer(double x) const { return boundary_at(x, 0); }
double AsymptoticExpansion::interior_layer(double x) const { return interior_at(x, 0); }

double AsymptoticExpansion::jump_delta() const { return (*this)(1.0) - left_limit(1.0); }

double AsymptoticExpansion::jump_derivative() const {
  return derivative(1.0) - left_derivative(1.0);
}

double AsymptoticExpansion::boundary_beta() const { return (*this)(2.0); }

namespace {

ExpPoly single_piece(const CoefficientFn& g, double a, double b, const char* what) {
  const auto piece = g.piece_covering(a, b);
  if (!piece)
    throw ConfigError(std::string(what) + " must be a single cubic-plus-sinusoid piece on [" +
                      std::to_string(a) + ", " + std::to_string(b) + "]");
  return ExpPoly::from_piece(*piece);
}

}  // namespace

AsymptoticExpansion build_expansion(double b, double c, double d, double eps,
                                    const CoefficientFn& f, const CoefficientFn& phi, int order) {
  if (!(b > 0.0) || !(c > 0.0)) throw ConfigError("expansion needs constant b > 0 and c > 0");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (order < 0) throw ConfigError("expansion order must be non-negative");

  const ExpPoly f_left = single_piece(f, 0.0, 1.0, "f");
  const ExpPoly f_right = single_piece(f, 1.0, 2.0, "f");
  const ExpPoly phi_left = single_piece(phi, -1.0, 0.0, "phi");

  ConstantReducedSystem sys;
  sys.c1 = c / b;
  sys.c2 = c / b;
  sys.d = d / b;

  std::vector<ExpansionComponent> comps;
  Poly Q_prev;  // Q_i, with Q_0 = 0
  for (int i = 0; i <= order; ++i) {
    if (i == 0) {
      sys.g1 = (f_left - d * phi_left.shifted(-1.0)) * (1.0 / b);
      sys.g2 = f_right.shifted(1.0) * (1.0 / b);
      sys.alpha = 0.0;
    } else {
      const auto& prev = comps.back();
      sys.g1 = prev.S_minus.derivative().derivative() * (1.0 / b);
      sys.g2 = prev.S_plus.derivative().derivative().shifted(1.0) * (1.0 / b);
      // S_{i,−}(1) = S_{i,+}(1) + Q_i(0) removes the O(ε^i) value jump.
      sys.alpha = Q_prev.empty() ? 0.0 : Q_prev[0];
    }
    const auto red = solve_reduced(sys);

    ExpansionComponent comp;
    comp.order = i;
    comp.S_minus = red.V;
    comp.S_plus = red.W.shifted(-1.0);

    // P_i″ − b P_i′ = c P_{i−1},  P_i(0) = −S_{i,−}(0)
    const Poly rhs_p = i == 0 ? Poly{} : poly_axpy(c, comps.back().P, {});
    comp.P = poly_integral(solve_first_order(rhs_p, b));
    if (comp.P.empty()) comp.P.push_back(0.0);
    comp.P[0] = -comp.S_minus(0.0);

    // Q_{i+1}″ − b Q_{i+1}′ = c Q_i + d P_i,  Q_{i+1}′(0) − b Q_{i+1}(0) = −[S_i′(1)]
    const double jump = comp.S_plus.derivative()(1.0) - comp.S_minus.derivative()(1.0);
    const Poly q = solve_first_order(poly_axpy(c, Q_prev, poly_axpy(d, comp.P, {})), b);
    comp.Q = poly_integral(q);
    comp.Q[0] = ((q.empty() ? 0.0 : q[0]) + jump) / b;

    Q_prev = comp.Q;
    comps.push_back(std::move(comp));
  }
  return AsymptoticExpansion(b, c, d, eps, std::move(comps));
}

AsymptoticExpansion build_expansion(const ProblemData& p, int order) {
  const auto b = p.b.constant_value();
  const auto c = p.c.constant_value();
  const auto d = p.d.constant_value();
  if (!b || !c || !d)
    throw ConfigError("asymptotic expansion requires constant b, c and d");
  return build_expansion(*b, *c, p.shift_sign * *d, p.eps, p.f, p.phi, order);
}

std::vector<double> layer_sample_grid(double eps) {
  std::vector<double> x;
  for (int i = 0; i <= 2000; ++i) x.push_back(i * 0.001);
  for (double anchor : {0.0, 1.0}) {
    for (double s = eps * 1e-3; s < 0.5; s *= 1.25) x.push_back(anchor + s);
  }
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  while (!x.empty() && x.back() > 2.0) x.pop_back();
  return x;
}

namespace {

// Least-squares slope of log|g| against the stretched variable over [2, 10] layer widths.
double fitted_decay(const std::function<double(double)>& g, double origin, double eps) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (int j = 0; j <= 40; ++j) {
    const double s = 2.0 + 8.0 * j / 40.0;
    const double v = std::abs(g(origin + s * eps));
    if (v == 0.0 || !std::isfinite(std::log(v))) continue;
    const double y = std::log(v);
    sx += s;
    sy += y;
    sxx += s * s;
    sxy += s * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DecompositionReport decomposition_report(const AsymptoticExpansion& expansion,
                                         const DiscreteSolution& u_ref) {
  DecompositionReport r;
  for (double x : layer_sample_grid(expansion.eps())) {
    const double err = std::abs(expansion(x) - evaluate(u_ref, x));
    if (err > r.sup_error) {
      r.sup_error = err;
      r.worst_x = x;
    }
  }
  r.jump_delta = std::abs(expansion.jump_delta());
  r.boundary_beta = std::abs(expansion.boundary_beta());
  const double eps = expansion.eps();
  r.E_decay = fitted_decay([&](double x) { return expansion.boundary_layer(x); }, 0.0, eps);
  r.W_decay = fitted_decay([&](double x) { return expansion.interior_layer(x); }, 1.0, eps);
  return r;
}

}  // namespace shiftfem
