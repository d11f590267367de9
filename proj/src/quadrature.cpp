#include "shiftfem/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "shiftfem/error.hpp"

namespace shiftfem {

namespace {

constexpr int max_points = 64;

// (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int j = 2; j <= n; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.n = n;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const GaussRule& gauss(int n) {
  static const auto rules = [] {
    std::array<GaussRule, max_points + 1> all;
    for (int m = 1; m <= max_points; ++m) all[m] = compute_rule(m);
    return all;
  }();
  if (n < 1 || n > max_points)
    throw ConfigError("Gauss rule size must be in [1, 64] (got " + std::to_string(n) + ")");
  return rules[n];
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int q = 0; q < rule.n; ++q) sum += rule.weights[q] * f(mid + half * rule.nodes[q]);
  return sum * half;
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const GaussRule& rule) {
  std::vector<double> pts{a, b};
  for (double p : breakpoints) {
    if (p > a && p < b) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += integrate(f, pts[i], pts[i + 1], rule);
  return sum;
}

std::vector<double> graded_breakpoints(double a, double b, std::span<const double> anchors,
                                       double scale) {
  std::vector<double> pts{a, b};
  const double length = b - a;
  for (double p : anchors) {
    if (p < a || p > b) continue;
    pts.push_back(p);
    for (double h = scale; h < length; h *= 2.0) {
      if (p - h > a) pts.push_back(p - h);
      if (p + h < b) pts.push_back(p + h);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> anchors, double scale) {
  const auto pts = graded_breakpoints(a, b, anchors, scale);
  const auto& rule = gauss(16);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) sum += integrate(f, pts[i], pts[i + 1], rule);
  return sum;
}

}  // namespace shiftfem
