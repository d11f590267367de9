#include "shiftfem/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "shiftfem/error.hpp"
#include "shiftfem/quadrature.hpp"

namespace shiftfem {

double EnergyNorm::operator()(const DiscreteSolution& v) const {
  const auto& mesh = v.space().mesh();
  const auto& rule = gauss(v.space().degree() + 3);
  double l2 = 0.0;
  double h1 = 0.0;
  for (int cell = 0; cell < mesh.cells(); ++cell) {
    const double a = mesh.node(cell);
    const double half = 0.5 * mesh.width(cell);
    for (int q = 0; q < rule.n; ++q) {
      const double x = a + half * (rule.nodes[q] + 1.0);
      const double val = v.value_in_cell(cell, x);
      const double der = v.derivative_in_cell(cell, x);
      l2 += rule.weights[q] * half * val * val;
      h1 += rule.weights[q] * half * der * der;
    }
  }
  return std::sqrt(combine(l2, h1));
}

ErrorSquares difference_squares(const DiscreteSolution& u, const DiscreteSolution& v,
                                std::optional<Interval> region) {
  const double lo = region ? region->first : 0.0;
  const double hi = region ? region->second : 2.0;
  const auto& mu = u.space().mesh();
  const auto& mv = v.space().mesh();

  std::vector<double> pts{lo, hi};
  for (double x : mu.nodes())
    if (x > lo && x < hi) pts.push_back(x);
  for (double x : mv.nodes())
    if (x > lo && x < hi) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  const auto& rule = gauss(std::max(u.space().degree(), v.space().degree()) + 3);
  ErrorSquares out;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i];
    const double half = 0.5 * (pts[i + 1] - a);
    if (half <= 0.0) continue;
    const int cu = mu.locate(a + half);
    const int cv = mv.locate(a + half);
    for (int q = 0; q < rule.n; ++q) {
      const double x = a + half * (rule.nodes[q] + 1.0);
      const double e = u.value_in_cell(cu, x) - v.value_in_cell(cv, x);
      const double de = u.derivative_in_cell(cu, x) - v.derivative_in_cell(cv, x);
      out.l2 += rule.weights[q] * half * e * e;
      out.h1 += rule.weights[q] * half * de * de;
    }
  }
  return out;
}

double energy_error(const DiscreteSolution& u, const DiscreteSolution& ref,
                    const EnergyNorm& norm, std::optional<Interval> region) {
  const auto sq = difference_squares(u, ref, region);
  return std::sqrt(norm.combine(sq.l2, sq.h1));
}

double energy_error(const DiscreteSolution& u, const ScalarFn& exact,
                    const ScalarFn& exact_derivative, const EnergyNorm& norm) {
  const auto& mesh = u.space().mesh();
  const auto& rule = gauss(u.space().degree() + 6);
  double l2 = 0.0;
  double h1 = 0.0;
  for (int cell = 0; cell < mesh.cells(); ++cell) {
    const double a = mesh.node(cell);
    const double half = 0.5 * mesh.width(cell);
    for (int q = 0; q < rule.n; ++q) {
      const double x = a + half * (rule.nodes[q] + 1.0);
      const double e = u.value_in_cell(cell, x) - exact(x);
      const double de = u.derivative_in_cell(cell, x) - exact_derivative(x);
      l2 += rule.weights[q] * half * e * e;
      h1 += rule.weights[q] * half * de * de;
    }
  }
  return std::sqrt(norm.combine(l2, h1));
}

EnergyNorm energy_norm_for(const ProblemData& p) { return {p.eps, p.gamma}; }

ReferenceSpec reference_spec(int k, int N_max) {
  return {k + 2, 2 * N_max, static_cast<double>(k + 3), MeshFamily::bakhvalov_s};
}

ReferenceSolution reference_solution(const ProblemData& p, const ReferenceSpec& spec) {
  MeshSpec ms;
  ms.family = spec.family;
  ms.N = spec.N;
  ms.eps = p.eps;
  ms.sigma = spec.sigma;
  ms.beta_lb = p.beta_lb;
  ms.k = spec.k;
  auto space = make_space(build_mesh(ms), spec.k);
  return {spec, solve(p, space)};
}

ReferenceSolution reference_solution(const ProblemData& p, int k, int N_max) {
  return reference_solution(p, reference_spec(k, N_max));
}

double reference_self_difference(const ProblemData& p, int k, int N_max) {
  const auto spec = reference_spec(k, N_max);
  auto finer = spec;
  finer.N *= 2;
  const auto a = reference_solution(p, spec);
  const auto b = reference_solution(p, finer);
  return energy_error(a.solution, b.solution, energy_norm_for(p));
}

void compute_rates(std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 < rows.size() && rows[i].error > 0.0 && rows[i + 1].error > 0.0)
      rows[i].rate = std::log2(rows[i].error / rows[i + 1].error);
    else
      rows[i].rate.reset();
  }
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(1, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

ConvergenceTable convergence_study(const ProblemData& p, MeshFamily family, int k,
                                   const std::vector<int>& N_list, const DiscreteSolution& ref,
                                   const StudyOptions& options) {
  ConvergenceTable table;
  table.family = family;
  table.k = k;
  table.eps = p.eps;
  table.sigma = p.sigma;
  table.rows.resize(N_list.size());
  const EnergyNorm norm = energy_norm_for(p);

  parallel_for(static_cast<int>(N_list.size()), options.jobs, [&](int i) {
    MeshSpec ms;
    ms.family = family;
    ms.N = N_list[i];
    ms.eps = p.eps;
    ms.sigma = p.sigma;
    ms.beta_lb = p.beta_lb;
    ms.k = k;
    ms.mu_log = options.mu_log;
    auto space = make_space(build_mesh(ms), k);
    const auto u = solve(p, space);
    table.rows[i] = {N_list[i], energy_error(u, ref, norm), std::nullopt};
  });
  compute_rates(table.rows);
  return table;
}

std::string_view to_string(LayerModel model) {
  switch (model) {
    case LayerModel::E: return "E";
    case LayerModel::W: return "W";
    case LayerModel::smooth: return "smooth";
    case LayerModel::composite: return "composite";
  }
  return "?";
}

LayerModel parse_layer_model(std::string_view name) {
  if (name == "E" || name == "e") return LayerModel::E;
  if (name == "W" || name == "w") return LayerModel::W;
  if (name == "smooth") return LayerModel::smooth;
  if (name == "composite") return LayerModel::composite;
  throw ConfigError("unknown layer model '" + std::string(name) +
                    "' (expected E, W, smooth or composite)");
}

ModelFunction layer_model(LayerModel model, double eps) {
  using std::numbers::pi;
  auto E = [eps](double x, bool) { return std::exp(-x / eps); };
  auto dE = [eps](double x, bool) { return -std::exp(-x / eps) / eps; };
  auto W = [eps](double x, bool left) {
    return (x < 1.0 || left) ? 0.0 : eps * std::exp(-(x - 1.0) / eps);
  };
  auto dW = [eps](double x, bool left) {
    return (x < 1.0 || left) ? 0.0 : -std::exp(-(x - 1.0) / eps);
  };
  auto S = [](double x, bool) { return std::sin(pi * x / 2.0); };
  auto dS = [](double x, bool) { return pi / 2.0 * std::cos(pi * x / 2.0); };
  switch (model) {
    case LayerModel::E: return {E, dE};
    case LayerModel::W: return {W, dW};
    case LayerModel::smooth: return {S, dS};
    case LayerModel::composite:
      return {[=](double x, bool l) { return S(x, l) + E(x, l) + W(x, l); },
              [=](double x, bool l) { return dS(x, l) + dE(x, l) + dW(x, l); }};
  }
  throw ConfigError("unknown layer model");
}

InterpolationTable interpolation_study(LayerModel model, MeshFamily family, int k, double eps,
                                       const std::vector<int>& N_list, bool mu_log) {
  InterpolationTable table;
  table.model = model;
  table.family = family;
  table.k = k;
  table.eps = eps;
  const auto g = layer_model(model, eps);
  const LagrangeBasis basis(k);
  const auto& rule = gauss(16);

  for (int N : N_list) {
    MeshSpec ms;
    ms.family = family;
    ms.N = N;
    ms.eps = eps;
    ms.sigma = k + 1;
    ms.beta_lb = 1.0;
    ms.k = k;
    ms.mu_log = mu_log;
    const Mesh mesh = build_mesh(ms);
    const double lambda = mesh.lambda();
    const double t2 = mesh.second_transition();

    InterpolationRow row;
    row.N = N;
    std::vector<double> vals(k + 1), phi(k + 1), dphi(k + 1);
    for (int cell = 0; cell < mesh.cells(); ++cell) {
      const double a = mesh.node(cell);
      const double h = mesh.width(cell);
      const bool left = a + h <= 1.0;
      for (int j = 0; j <= k; ++j) vals[j] = g.value(a + basis.points()[j] * h, left);

      const double anchor[] = {a};
      const auto pts = graded_breakpoints(a, a + h, anchor, eps);
      double l2 = 0.0;
      double h1 = 0.0;
      for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        const double half = 0.5 * (pts[p + 1] - pts[p]);
        for (int q = 0; q < rule.n; ++q) {
          const double x = pts[p] + half * (rule.nodes[q] + 1.0);
          basis.values((x - a) / h, phi);
          basis.derivatives((x - a) / h, dphi);
          double iv = 0.0;
          double idv = 0.0;
          for (int j = 0; j <= k; ++j) {
            iv += vals[j] * phi[j];
            idv += vals[j] * dphi[j] / h;
          }
          const double e = g.value(x, left) - iv;
          const double de = g.derivative(x, left) - idv;
          l2 += rule.weights[q] * half * e * e;
          h1 += rule.weights[q] * half * de * de;
        }
      }
      row.l2 += l2;
      row.h1 += h1;
      const double mid = a + 0.5 * h;
      const int region = mid < lambda ? 0 : mid < 1.0 ? 1 : mid < 1.0 + t2 ? 2 : 3;
      row.region_l2[region] += l2;
    }
    row.energy = std::sqrt(eps * row.h1 + row.l2);
    row.l2 = std::sqrt(row.l2);
    row.h1 = std::sqrt(row.h1);
    for (auto& r : row.region_l2) r = std::sqrt(r);
    table.rows.push_back(row);
  }
  return table;
}

std::vector<double> observed_rates(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

std::string format_sci(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.5e", value);
  return buf;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream out;
  out << "N,error,rate\n";
  for (const auto& row : table.rows) {
    out << row.N << ',' << format_sci(row.error) << ',';
    if (row.rate) out << format_sci(*row.rate);
    out << '\n';
  }
  return out.str();
}

}  // namespace shiftfem
