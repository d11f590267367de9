#pragma once

#include <functional>
#include <span>
#include <vector>

namespace shiftfem {

/// n-point Gauss–Legendre rule on [−1, 1].
struct GaussRule {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once and cached; 1 ≤ n ≤ 64.
const GaussRule& gauss(int n);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussRule& rule);

/// Sum of rule applications over [a, b] split at the given breakpoints (clipped
/// to [a, b]; unsorted input is sorted).
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::span<const double> breakpoints, const GaussRule& rule);

/// Breakpoints graded geometrically away from each anchor: anchor ± scale·2^j,
/// j = 0, 1, ..., clipped to [a, b] and merged with a, b and the anchors.
std::vector<double> graded_breakpoints(double a, double b, std::span<const double> anchors,
                                       double scale);

/// ∫_a^b f with geometric refinement toward the anchors on length scale `scale`
/// and a 16-point rule per piece.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> anchors, double scale);

}  // namespace shiftfem
