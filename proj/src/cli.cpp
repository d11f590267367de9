#include "shiftfem/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shiftfem/analysis.hpp"
#include "shiftfem/asymptotics.hpp"
#include "shiftfem/error.hpp"
#include "shiftfem/femcore.hpp"
#include "shiftfem/greens.hpp"

namespace shiftfem {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int to_int(const std::string& text, const std::string& key) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return value;
}

double to_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

bool to_bool(const std::string& text, const std::string& key) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + text + "'");
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  std::replace(s.begin(), s.end(), '_', '-');
  return "--" + s;
}

Command parse_command(const std::string& name) {
  static const std::map<std::string, Command> names{
      {"solve", Command::solve},           {"convergence", Command::convergence},
      {"interp", Command::interp},         {"meshinfo", Command::meshinfo},
      {"asymptotic", Command::asymptotic}, {"greens", Command::greens},
      {"assumption", Command::assumption}};
  const auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown command '" + name + "'");
  return it->second;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", eps);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  file << text;
}

std::string rate_field(const std::optional<double>& r) { return r ? format_sci(*r) : ""; }

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::convergence: return "convergence";
    case Command::interp: return "interp";
    case Command::meshinfo: return "meshinfo";
    case Command::asymptotic: return "asymptotic";
    case Command::greens: return "greens";
    case Command::assumption: return "assumption";
  }
  return "?";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command", "problem", "family", "k",     "N",     "eps",   "sigma",   "mu_log",
      "out",     "jobs",    "seed",   "shift_sign", "b", "c",    "d",       "f",
      "phi",     "gamma",   "beta",   "model", "order", "delta", "bc_beta"};
  return keys;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  const auto& keys = config_keys();
  int line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty value for '" + key +
                        "'");
    out[key] = value;
  }
  return out;
}

std::vector<int> parse_int_range(std::string_view text) {
  const std::string t = trim(text);
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const int lo = to_int(trim(t.substr(0, dots)), "range");
    const int hi = to_int(trim(t.substr(dots + 2)), "range");
    if (hi < lo) throw ConfigError("empty range '" + t + "'");
    std::vector<int> out;
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::vector<int> out;
  for (const auto& item : split(t, ',')) out.push_back(to_int(item, "list"));
  return out;
}

std::vector<int> parse_doubling_range(std::string_view text) {
  const std::string t = trim(text);
  if (const auto dots = t.find(".."); dots != std::string::npos) {
    const int lo = to_int(trim(t.substr(0, dots)), "range");
    const int hi = to_int(trim(t.substr(dots + 2)), "range");
    if (lo <= 0 || hi < lo) throw ConfigError("invalid doubling range '" + t + "'");
    std::vector<int> out;
    for (long v = lo; v <= hi; v *= 2) out.push_back(static_cast<int>(v));
    return out;
  }
  return parse_int_range(t);
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, "list"));
  return out;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  // Pull --config files out first; their entries go in front of the flags.
  std::vector<std::string> cli_args;
  std::map<std::string, std::string> file_values;
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config requires a file name");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      cli_args.push_back(args[i]);
      continue;
    }
    std::ifstream file(path);
    if (!file) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << file.rdbuf();
    for (auto& [key, value] : parse_config_text(buf.str())) file_values[key] = value;
  }

  std::vector<std::string> tokens;
  for (const auto& [key, value] : file_values) {
    if (key == "command") continue;
    if (key == "mu_log") {
      if (to_bool(value, key)) tokens.push_back("--mu-log");
      continue;
    }
    tokens.push_back(flag_name(key));
    tokens.push_back(value);
  }
  tokens.insert(tokens.end(), cli_args.begin(), cli_args.end());

  CLI::App app{"High-order FEM for singularly perturbed convection-diffusion with a shift"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.allow_extras(false);

  std::string command;
  std::map<std::string, std::string> values;
  bool mu_log = false;
  app.add_option("command", command,
                 "solve | convergence | interp | meshinfo | asymptotic | greens | assumption");
  for (const auto& key : config_keys()) {
    if (key == "command" || key == "mu_log") continue;
    auto* opt = app.add_option_function<std::string>(
        flag_name(key), [&values, key](const std::string& v) { values[key] = v; });
    opt->allow_extra_args(false);
  }
  app.add_flag("--mu-log", mu_log, "coarse meshes: mu = sigma eps^((k-1)/k)/beta ln N");

  std::vector<std::string> reversed(tokens.rbegin(), tokens.rend());
  app.parse(reversed);

  RunConfig cfg;
  if (command.empty()) {
    const auto it = file_values.find("command");
    if (it == file_values.end()) throw ConfigError("command required");
    command = it->second;
  }
  cfg.command = parse_command(command);
  cfg.mu_log = mu_log;

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("problem")) cfg.problem = *v;
  if (auto v = get("family")) cfg.family = parse_family(*v);
  if (auto v = get("k")) cfg.k = parse_int_range(*v);
  if (auto v = get("N")) cfg.N = parse_doubling_range(*v);
  if (auto v = get("eps")) cfg.eps = parse_double_list(*v);
  if (auto v = get("sigma")) cfg.sigma = to_double(*v, "sigma");
  if (auto v = get("out")) cfg.out = *v;
  if (auto v = get("jobs")) cfg.jobs = to_int(*v, "jobs");
  if (auto v = get("seed")) cfg.seed = static_cast<unsigned>(to_int(*v, "seed"));
  if (auto v = get("shift_sign")) cfg.shift_sign = to_int(*v, "shift_sign");
  cfg.b = get("b");
  cfg.c = get("c");
  cfg.d = get("d");
  cfg.f = get("f");
  cfg.phi = get("phi");
  if (auto v = get("gamma")) cfg.gamma = to_double(*v, "gamma");
  if (auto v = get("beta")) cfg.beta = to_double(*v, "beta");
  if (auto v = get("model")) cfg.model = *v;
  if (auto v = get("order")) cfg.order = to_int(*v, "order");
  if (auto v = get("delta")) cfg.delta = to_double(*v, "delta");
  if (auto v = get("bc_beta")) cfg.bc_beta = to_double(*v, "bc_beta");

  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (cfg.shift_sign && *cfg.shift_sign != 1 && *cfg.shift_sign != -1)
    throw ConfigError("shift_sign must be +1 or -1");
  for (int k : cfg.k)
    if (k < 1 || k > 8) throw ConfigError("k must be in [1, 8]");
  for (int N : cfg.N)
    if (N < 8 || N % 4 != 0) throw ConfigError("N must be >= 8 and divisible by 4");
  for (double e : cfg.eps)
    if (!(e > 0.0)) throw ConfigError("eps must be positive");
  if (cfg.sigma && *cfg.sigma < 1.0) throw ConfigError("sigma must be >= 1");
  if (cfg.order < 0) throw ConfigError("order must be non-negative");
  parse_layer_model(cfg.model);
  return cfg;
}

ProblemData make_problem(const RunConfig& cfg, double eps, int k) {
  const double sigma = cfg.sigma.value_or(k + 1);
  auto number = [&](const std::optional<std::string>& v, const char* key,
                    std::optional<double> fallback = std::nullopt) {
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(std::string(key) + " required for problem '" + cfg.problem + "'");
    }
    return to_double(*v, key);
  };

  ProblemData p;
  if (cfg.problem == "paper-example") {
    p = paper_example(eps, sigma);
  } else if (cfg.problem == "constant") {
    ConstantData data;
    data.b = number(cfg.b, "b");
    data.c = number(cfg.c, "c");
    data.d = number(cfg.d, "d");
    data.f = number(cfg.f, "f");
    data.eps = eps;
    data.gamma = cfg.gamma;
    data.sigma = sigma;
    p = constant_problem(data);
    if (cfg.phi) p.phi = parse_coefficient(*cfg.phi, -1.0, 0.0);
  } else if (cfg.problem == "manufactured") {
    p = manufactured_problem(number(cfg.b, "b", 2.0), number(cfg.c, "c", 3.0),
                             number(cfg.d, "d", 1.0), cfg.shift_sign.value_or(1), eps,
                             cfg.gamma.value_or(1.0))
            .problem;
    p.sigma = sigma;
  } else if (cfg.problem == "inline") {
    for (const auto& [v, key] : {std::pair{&cfg.b, "b"}, {&cfg.c, "c"}, {&cfg.d, "d"},
                                 {&cfg.f, "f"}})
      if (!*v) throw ConfigError(std::string(key) + " required for problem 'inline'");
    p.name = "inline";
    p.b = parse_coefficient(*cfg.b, 0.0, 2.0);
    p.c = parse_coefficient(*cfg.c, 0.0, 2.0);
    p.d = parse_coefficient(*cfg.d, 0.0, 2.0);
    p.f = parse_coefficient(*cfg.f, 0.0, 2.0);
    p.phi = cfg.phi ? parse_coefficient(*cfg.phi, -1.0, 0.0) : CoefficientFn::constant(0.0, -1.0, 0.0);
    p.eps = eps;
    p.sigma = sigma;
    p.shift_sign = +1;
    double bmin = INFINITY;
    double cmin = INFINITY;
    double dmax = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = 2.0 * i / 1000.0;
      bmin = std::min(bmin, p.b(x));
      cmin = std::min(cmin, p.c(x) - p.b.derivative(x) / 2.0);
      if (x >= 1.0) dmax = std::max(dmax, std::abs(p.d(x)));
    }
    p.beta_lb = bmin;
    const double natural = cmin - dmax / 2.0;
    if (!cfg.gamma && !(natural > 0.0))
      throw ConfigError("gamma required: c - b'/2 - max|d|/2 is not positive for this data");
    p.gamma = natural;
  } else {
    throw ConfigError("unknown problem '" + cfg.problem +
                      "' (expected paper-example, constant, manufactured or inline)");
  }
  if (cfg.shift_sign) p.shift_sign = *cfg.shift_sign;
  if (cfg.beta) p.beta_lb = *cfg.beta;
  if (cfg.gamma) p.gamma = *cfg.gamma;

  const auto report = validate(p);
  if (!report.ok()) {
    std::string msg = "problem data violates assumptions:";
    for (const auto& v : report.violations)
      msg += " [" + v.assumption + " at x = " + format_sci(v.worst_x) + "]";
    throw ConfigError(msg);
  }
  return p;
}

namespace {

template <class T>
T single(const std::vector<T>& values, const char* key) {
  if (values.empty()) throw ConfigError(std::string(key) + " required");
  if (values.size() != 1) throw ConfigError(std::string(key) + " must be a single value here");
  return values.front();
}

template <class T>
const std::vector<T>& required(const std::vector<T>& values, const char* key) {
  if (values.empty()) throw ConfigError(std::string(key) + " required");
  return values;
}

MeshSpec mesh_spec(const RunConfig& cfg, const ProblemData& p, int N, int k) {
  MeshSpec ms;
  ms.family = cfg.family;
  ms.N = N;
  ms.eps = p.eps;
  ms.sigma = p.sigma;
  ms.beta_lb = p.beta_lb;
  ms.k = k;
  ms.mu_log = cfg.mu_log;
  return ms;
}

void warn_validation(const ProblemData& p, std::ostream& err) {
  for (const auto& w : validate(p).warnings)
    err << "warning: " << w.assumption << " (x = " << format_sci(w.worst_x) << ")\n";
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const int k = single(cfg.k, "k");
  const int N = single(cfg.N, "N");
  const double eps = single(cfg.eps, "eps");
  const ProblemData p = make_problem(cfg, eps, k);
  warn_validation(p, err);
  auto space = make_space(build_mesh(mesh_spec(cfg, p, N, k)), k);
  const auto u = solve(p, space);
  const EnergyNorm norm = energy_norm_for(p);

  out << "quantity,value\n";
  out << "dofs," << space->dof_count() << '\n';
  out << "lambda," << format_sci(space->mesh().lambda()) << '\n';
  out << "mu," << format_sci(space->mesh().mu()) << '\n';
  out << "energy_norm," << format_sci(norm(u)) << '\n';
  out << "u_at_1," << format_sci(evaluate(u, 1.0)) << '\n';
  if (cfg.problem == "manufactured") {
    const auto m = manufactured_problem(p.b.constant_value().value_or(2.0),
                                        p.c.constant_value().value_or(3.0),
                                        p.d.constant_value().value_or(1.0), p.shift_sign, eps,
                                        p.gamma);
    out << "energy_error," << format_sci(energy_error(u, m.exact, m.exact_derivative, norm))
        << '\n';
  }

  if (cfg.out) {
    std::vector<double> xs;
    for (int i = 0; i <= 2000; ++i) xs.push_back(i * 0.001);
    for (double x : space->mesh().nodes()) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::ostringstream csv;
    csv << "x,u\n";
    for (double x : xs) csv << format_sci(x) << ',' << format_sci(evaluate(u, x)) << '\n';
    write_file(*cfg.out, csv.str());
  }
  return 0;
}

int run_convergence(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& ks = required(cfg.k, "k");
  const auto& Ns = required(cfg.N, "N");
  const auto& epss = required(cfg.eps, "eps");
  const int N_max = *std::max_element(Ns.begin(), Ns.end());

  std::ostringstream summary;
  summary << "eps,N";
  for (int k : ks) summary << ",k" << k << "_error,k" << k << "_rate";
  summary << '\n';

  for (double eps : epss) {
    std::vector<ConvergenceTable> tables;
    for (int k : ks) {
      const ProblemData p = make_problem(cfg, eps, k);
      if (k == ks.front()) warn_validation(p, err);
      const auto ref = reference_solution(p, k, N_max);
      const auto table =
          convergence_study(p, cfg.family, k, Ns, ref.solution, {cfg.jobs, cfg.mu_log});

      const double self = reference_self_difference(p, k, N_max);
      double smallest = INFINITY;
      for (const auto& row : table.rows) smallest = std::min(smallest, row.error);
      err << "reference k=" << k << " eps=" << format_sci(eps) << ": degree " << ref.spec.k
          << ", N=" << ref.spec.N << ", self-difference " << format_sci(self)
          << (self <= 0.01 * smallest ? " (ok)" : " (reference-limited rows possible)") << '\n';

      if (cfg.out) {
        const std::string name = "convergence_" + std::string(to_string(cfg.family)) + "_k" +
                                 std::to_string(k) + "_eps" + eps_tag(eps) + ".csv";
        write_file(std::filesystem::path(*cfg.out) / name, convergence_csv(table));
      }
      tables.push_back(table);
    }
    for (std::size_t r = 0; r < Ns.size(); ++r) {
      summary << format_sci(eps) << ',' << Ns[r];
      for (const auto& t : tables)
        summary << ',' << format_sci(t.rows[r].error) << ',' << rate_field(t.rows[r].rate);
      summary << '\n';
    }
  }
  out << summary.str();
  if (cfg.out) write_file(std::filesystem::path(*cfg.out) / "summary.csv", summary.str());
  return 0;
}

int run_interp(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& ks = required(cfg.k, "k");
  const auto& Ns = required(cfg.N, "N");
  const double eps = single(cfg.eps, "eps");
  const LayerModel model = parse_layer_model(cfg.model);

  std::ostringstream csv;
  csv << "k,N,l2,l2_rate,h1,h1_rate,energy,energy_rate,region1_l2,region1_rate,region2_l2,"
         "region2_rate,region3_l2,region3_rate,region4_l2,region4_rate\n";
  for (int k : ks) {
    const auto table = interpolation_study(model, cfg.family, k, eps, Ns, cfg.mu_log);
    std::vector<std::vector<double>> cols(7);
    for (const auto& row : table.rows) {
      cols[0].push_back(row.l2);
      cols[1].push_back(row.h1);
      cols[2].push_back(row.energy);
      for (int r = 0; r < 4; ++r) cols[3 + r].push_back(row.region_l2[r]);
    }
    std::vector<std::vector<double>> rates;
    for (const auto& c : cols) rates.push_back(observed_rates(c));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      csv << k << ',' << table.rows[i].N;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        csv << ',' << format_sci(cols[c][i]) << ',';
        if (i < rates[c].size() && std::isfinite(rates[c][i])) csv << format_sci(rates[c][i]);
      }
      csv << '\n';
    }
  }
  out << csv.str();
  if (cfg.out) write_file(*cfg.out, csv.str());
  return 0;
}

int run_meshinfo(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const int N = single(cfg.N, "N");
  const double eps = single(cfg.eps, "eps");
  const int k = cfg.k.empty() ? 1 : single(cfg.k, "k");
  const ProblemData p = make_problem(cfg, eps, k);
  const Mesh mesh = build_mesh(mesh_spec(cfg, p, N, k));
  err << "family " << to_string(mesh.family()) << ", N " << mesh.cells() << ", lambda "
      << format_sci(mesh.lambda()) << ", mu " << format_sci(mesh.mu()) << ", max|psi'| "
      << format_sci(mesh.quality()) << '\n';
  std::ostringstream csv;
  csv << "index,x,width\n";
  for (int i = 0; i <= mesh.cells(); ++i) {
    csv << i << ',' << format_sci(mesh.node(i)) << ',';
    if (i < mesh.cells()) csv << format_sci(mesh.width(i));
    csv << '\n';
  }
  out << csv.str();
  if (cfg.out) write_file(*cfg.out, csv.str());
  return 0;
}

std::string join_coeffs(const std::vector<double>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ';';
    s += format_sci(c[i]);
  }
  return s;
}

int run_asymptotic(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const double eps = single(cfg.eps, "eps");
  RunConfig local = cfg;
  if (local.problem == "paper-example") local.problem = "constant";
  const ProblemData p = make_problem(local, eps, 4);
  const auto expansion = build_expansion(p, cfg.order);

  std::ostringstream terms;
  terms << "order,S_minus_at_0,S_plus_at_1,P_coefficients,Q_next_coefficients\n";
  for (const auto& comp : expansion.components()) {
    terms << comp.order << ',' << format_sci(comp.S_minus(0.0)) << ','
          << format_sci(comp.S_plus(1.0)) << ',' << join_coeffs(comp.P) << ','
          << join_coeffs(comp.Q) << '\n';
  }

  // FEM reference: degree 5, Bakhvalov-S, σ = 6.
  auto ref_problem = p;
  ref_problem.sigma = 6.0;
  MeshSpec ms;
  ms.family = MeshFamily::bakhvalov_s;
  ms.N = 512;
  ms.eps = eps;
  ms.sigma = 6.0;
  ms.beta_lb = p.beta_lb;
  ms.k = 5;
  const auto u_ref = solve(ref_problem, make_space(build_mesh(ms), 5));

  std::ostringstream remainder;
  remainder << "order,jump_delta,jump_derivative,boundary_beta,sup_error,worst_x,E_decay,W_decay\n";
  for (int k = 0; k <= cfg.order; ++k) {
    const auto e_k = build_expansion(p, k);
    const auto rep = decomposition_report(e_k, u_ref);
    remainder << k << ',' << format_sci(rep.jump_delta) << ','
              << format_sci(std::abs(e_k.jump_derivative())) << ','
              << format_sci(rep.boundary_beta) << ',' << format_sci(rep.sup_error) << ','
              << format_sci(rep.worst_x) << ',' << format_sci(rep.E_decay) << ','
              << format_sci(rep.W_decay) << '\n';
  }
  out << terms.str() << '\n' << remainder.str();
  if (cfg.out) {
    write_file(std::filesystem::path(*cfg.out) / "asymptotic_terms.csv", terms.str());
    write_file(std::filesystem::path(*cfg.out) / "asymptotic_remainder.csv", remainder.str());
  }
  return 0;
}

int run_greens(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const double eps = single(cfg.eps, "eps");
  auto number = [](const std::optional<std::string>& v, const char* key, double fallback) {
    return v ? to_double(*v, key) : fallback;
  };
  if (!cfg.b || !cfg.c || !cfg.d) throw ConfigError("greens needs --b, --c and --d");
  const double b = to_double(*cfg.b, "b");
  const double c = to_double(*cfg.c, "c");
  const double d = to_double(*cfg.d, "d");
  const double f = number(cfg.f, "f", 1.0);
  if (!(b > 0.0) || !(c > 0.0)) throw ConfigError("greens needs b > 0 and c > 0");
  if (d < 0.0) throw ConfigError("greens needs d >= 0");

  const auto rows = expansion_check(b, c, eps);
  std::ostringstream csv;
  csv << "integral,value,inv_eps_coefficient,constant,expansion,deviation\n";
  for (const auto& r : rows) {
    csv << r.name << ',' << format_sci(r.value) << ',' << format_sci(r.inv_eps_coeff) << ','
        << format_sci(r.constant) << ',' << format_sci(r.expansion) << ','
        << format_sci(r.deviation) << '\n';
  }
  const auto rep = alpha_stability(b, c, d, eps, [f](double) { return f; }, cfg.delta,
                                   cfg.bc_beta);
  csv << '\n'
      << "alpha,N_value,D_value,eps_times_D,leading_D,data_norm,bound_ratio\n"
      << format_sci(rep.alpha) << ',' << format_sci(rep.N_value) << ','
      << format_sci(rep.D_value) << ',' << format_sci(rep.eps_times_D) << ','
      << format_sci(rep.leading_D) << ',' << format_sci(rep.data_norm) << ','
      << format_sci(rep.bound_ratio) << '\n';
  out << csv.str();
  if (cfg.out) write_file(*cfg.out, csv.str());
  if (!rep.D_positive) {
    std::cerr << "D is not positive\n";
    return 1;
  }
  return 0;
}

int run_assumption(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& epss = required(cfg.eps, "eps");
  const auto& ks = required(cfg.k, "k");
  std::ostringstream csv;
  csv << "eps,k,max_N,log10_bound,saturated";
  if (!cfg.N.empty()) csv << ",N,holds";
  csv << '\n';
  for (double eps : epss) {
    for (int k : ks) {
      csv << format_sci(eps) << ',' << k << ',';
      if (k == 1) {
        csv << ",,unbounded";
      } else {
        const auto m = max_N(eps, k);
        csv << m.value << ',' << format_sci(m.log10) << ',' << (m.saturated ? "yes" : "no");
      }
      if (!cfg.N.empty()) {
        const int N = cfg.N.front();
        csv << ',' << N << ',' << (check_assumption_eps(eps, k, N) ? "yes" : "no");
      }
      csv << '\n';
    }
  }
  out << csv.str();
  if (cfg.out) write_file(*cfg.out, csv.str());
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case Command::solve: return run_solve(cfg, out, err);
    case Command::convergence: return run_convergence(cfg, out, err);
    case Command::interp: return run_interp(cfg, out, err);
    case Command::meshinfo: return run_meshinfo(cfg, out, err);
    case Command::asymptotic: return run_asymptotic(cfg, out, err);
    case Command::greens: return run_greens(cfg, out, err);
    case Command::assumption: return run_assumption(cfg, out, err);
  }
  return 2;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config(args);
    return run(cfg, out, err);
  } catch (const CLI::CallForHelp&) {
    out << "usage: shiftfem <command> [--config file] [--key value ...]\n"
           "commands: solve convergence interp meshinfo asymptotic greens assumption\n"
           "keys:";
    for (const auto& key : config_keys())
      if (key != "command") out << ' ' << flag_name(key);
    out << " --config\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const SolverError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace shiftfem
