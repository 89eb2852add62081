#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "halfspace/error.hpp"
#include "halfspace/postprocess.hpp"

namespace halfspace::cli {

struct RunConfig
{
  ModelKind model = ModelKind::bgk;
  double u = 0.0;
  int N = 8;
  double alpha = default_alpha;
  int quad_points = 0;  ///< 0 selects 2N+8
  int aux_N = 0;        ///< 0 uses N
  double tol_null = default_tol_null;
  double tol_zero = default_tol_zero;
  int boundary_quad_points = 64;
  double boundary_tol = 1e-6;
  std::string incoming = "chi_plus";
  FilterSpec filter;
  std::vector<double> x_samples{0.0, 0.5, 1.0, 5.0};
  int v_count = 201;
  std::optional<double> v_min;  ///< model default when unset
  std::optional<double> v_max;
  std::string output_dir = "runs/default";
  std::string cache_dir;  ///< empty disables the cache unless HALFSPACE_CACHE_DIR is set

  int effective_quad_points() const { return quad_points > 0 ? quad_points : 2 * N + 8; }
  int effective_aux_N() const { return aux_N > 0 ? aux_N : N; }
  double effective_v_min() const;
  double effective_v_max() const;

  SystemOptions system_options(int galerkin_N) const;

  /// Throws ConfigError on any invariant violation.
  void validate() const;
};

ModelKind parse_model(const std::string& name);

/// Reads the sectioned key=value format; keys absent from the file keep their defaults.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
RunConfig parse_config(const std::string& text, RunConfig base = {});
/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& config);

std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Process exit code for an error category.
int exit_code(ErrorCategory category);
constexpr int exit_failure = 1;

/// L2 distance over the velocity domain between f_phi(x, .) and g.
double l2_distance(const RecoveredSolution& sol, double x, const std::function<double(double)>& g);

struct SolveResult
{
  RecoveredSolution recovered;
  std::string summary_json;
};

/// Runs the full pipeline and writes config.ini, summary.json and profile CSVs
/// into config.output_dir.
SolveResult cmd_solve(const RunConfig& config, std::ostream& log);

struct ExtrapolationRow
{
  int order;
  int N;
  double length;
  double error;
};

std::vector<ExtrapolationRow> extrapolation_table(const std::vector<int>& orders,
                                                  const RunConfig& base = {});
int cmd_extrapolation_table(const std::vector<int>& orders, const RunConfig& base,
                            const std::string& out_dir, std::ostream& out);

int cmd_convergence(const RunConfig& config, const std::vector<int>& orders, std::ostream& out);

int cmd_h_function(int n_mu, double tol, const std::string& out_dir, std::ostream& out);

struct SelftestOptions
{
  double alpha = default_alpha;
  double tol_zero = default_tol_zero;
};

int cmd_selftest(const SelftestOptions& options, std::ostream& out);

}  // namespace halfspace::cli
