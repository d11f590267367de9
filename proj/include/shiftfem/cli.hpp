#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiftfem/mesh.hpp"
#include "shiftfem/problem.hpp"

namespace shiftfem {

enum class Command { solve, convergence, interp, meshinfo, asymptotic, greens, assumption };

std::string_view to_string(Command command);

struct RunConfig {
  Command command = Command::solve;
  std::string problem = "paper-example";
  MeshFamily family = MeshFamily::bakhvalov_s;
  std::vector<int> k;
  std::vector<int> N;
  std::vector<double> eps;
  std::optional<double> sigma;
  bool mu_log = false;
  std::optional<std::string> out;
  int jobs = 1;
  std::optional<unsigned> seed;
  std::optional<int> shift_sign;

  // Coefficient text for constant, manufactured and inline problems.
  std::optional<std::string> b, c, d, f, phi;
  std::optional<double> gamma;
  std::optional<double> beta;

  std::string model = "E";
  int order = 1;
  double delta = 0.0;
  double bc_beta = 0.0;
};

/// Keys accepted in config files and as long flags (with '-' for '_').
const std::vector<std::string>& config_keys();

/// Flat "key = value" lines with '#' comments; unknown keys throw ConfigError.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// "a..b" (step 1), or a comma list.
std::vector<int> parse_int_range(std::string_view text);
/// "a..b" doubling from a to b, or a comma list.
std::vector<int> parse_doubling_range(std::string_view text);
std::vector<double> parse_double_list(std::string_view text);

/// Parses argv (argv[0] is the program name). Values from --config files are
/// applied first, so flags on the command line win. Throws ConfigError.
RunConfig parse_config(const std::vector<std::string>& args);

/// Problem for one (ε, k) point of a run.
ProblemData make_problem(const RunConfig& config, double eps, int k);

/// Executes a parsed configuration; returns the process exit code
/// (0 success, 1 numerical failure, 2 configuration error).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map errors to exit codes.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shiftfem
