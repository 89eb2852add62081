#include <CLI11.hpp>
#include <iostream>

#include "halfspace/cli.hpp"

using namespace halfspace;
using namespace halfspace::cli;

namespace {

struct Overrides
{
  std::string config_path;
  std::string model, incoming, filter, out, cache_dir, x_samples;
  double u = 0, alpha = 0, tol_null = 0, tol_zero = 0, v_min = 0, v_max = 0;
  int N = 0, quad_points = 0, aux_N = 0, filter_order = 0, v_count = 0;
  std::vector<CLI::Option*> opts;

  void add(CLI::App* app)
  {
    app->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
    opts = {
        app->add_option("--model", model, "bgk or nte"),
        app->add_option("--u", u, "Bulk velocity"),
        app->add_option("-N,--N", N, "Galerkin order (2N+1 basis functions)"),
        app->add_option("--alpha", alpha, "Damping strength"),
        app->add_option("--quad-points", quad_points, "Quadrature points per half line"),
        app->add_option("--aux-N", aux_N, "Galerkin order of the auxiliary solves"),
        app->add_option("--tol-null", tol_null, "Null-space classification tolerance"),
        app->add_option("--tol-zero", tol_zero, "Zero-eigenvalue tolerance (relative)"),
        app->add_option("--incoming", incoming, "Builtin incoming data or table file"),
        app->add_option("--filter", filter, "none or cosine"),
        app->add_option("--filter-order", filter_order, "Cosine filter order"),
        app->add_option("--x-samples", x_samples, "Comma-separated x values"),
        app->add_option("--v-count", v_count, "Profile grid size"),
        app->add_option("--v-min", v_min, "Profile grid lower end"),
        app->add_option("--v-max", v_max, "Profile grid upper end"),
        app->add_option("-o,--out", out, "Output directory"),
        app->add_option("--cache-dir", cache_dir, "Auxiliary cache directory"),
    };
  }

  bool given(std::size_t i) const { return opts[i]->count() > 0; }

  RunConfig resolve() const
  {
    RunConfig c;
    if (!config_path.empty()) c = load_config(config_path);
    if (given(0)) c.model = parse_model(model);
    if (given(1)) c.u = u;
    if (given(2)) c.N = N;
    if (given(3)) c.alpha = alpha;
    if (given(4)) c.quad_points = quad_points;
    if (given(5)) c.aux_N = aux_N;
    if (given(6)) c.tol_null = tol_null;
    if (given(7)) c.tol_zero = tol_zero;
    if (given(8)) c.incoming = incoming;
    if (given(9)) c.filter.kind = parse_filter_kind(filter);
    if (given(10)) c.filter.order = filter_order;
    if (given(11)) c.x_samples = parse_real_list(x_samples);
    if (given(12)) c.v_count = v_count;
    if (given(13)) c.v_min = v_min;
    if (given(14)) c.v_max = v_max;
    if (given(15)) c.output_dir = out;
    if (given(16)) c.cache_dir = cache_dir;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Damped spectral Galerkin solver for half-space kinetic equations"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "Solve one configuration and write its run directory");
  Overrides solve_o;
  solve_o.add(solve);

  auto* print = app.add_subcommand("print-config", "Print the effective configuration");
  Overrides print_o;
  print_o.add(print);

  auto* conv = app.add_subcommand("convergence", "L2 error at x = 0 over a list of N");
  Overrides conv_o;
  conv_o.add(conv);
  std::string n_list = "4,8,12,16,20";
  conv->add_option("--N-list", n_list, "Comma-separated Galerkin orders");

  auto* table = app.add_subcommand("extrapolation-table",
                                   "Milne extrapolation length over polynomial orders");
  std::string orders = "4,8,12,16,20,24,28,32,36,40";
  std::string table_out;
  double table_alpha = default_alpha;
  table->add_option("--orders", orders, "Comma-separated orders (Galerkin N = order - 1)");
  table->add_option("-o,--out", table_out, "Directory for extrapolation.csv/json");
  table->add_option("--alpha", table_alpha, "Damping strength");

  auto* hfun = app.add_subcommand("h-function", "Chandrasekhar H-function table");
  int n_mu = 64;
  double h_tol = 1e-10;
  std::string h_out;
  hfun->add_option("--n-mu", n_mu, "Gauss-Legendre nodes");
  hfun->add_option("--tol", h_tol, "Iteration tolerance");
  hfun->add_option("-o,--out", h_out, "Directory for h_function.csv");

  auto* self = app.add_subcommand("selftest", "Run the invariant suites");
  SelftestOptions self_o;
  self->add_option("--alpha", self_o.alpha, "Damping strength (fault injection)");
  self->add_option("--tol-zero", self_o.tol_zero, "Zero-eigenvalue tolerance (fault injection)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorCategory::config);
  }

  try {
    if (*solve) {
      cmd_solve(solve_o.resolve(), std::cout);
      return 0;
    }
    if (*print) {
      const RunConfig c = print_o.resolve();
      c.validate();
      std::cout << format_config(c);
      return 0;
    }
    if (*conv) return cmd_convergence(conv_o.resolve(), parse_int_list(n_list), std::cout);
    if (*table) {
      RunConfig base;
      base.alpha = table_alpha;
      base.model = ModelKind::nte;
      base.validate();
      return cmd_extrapolation_table(parse_int_list(orders), base, table_out, std::cout);
    }
    if (*hfun) return cmd_h_function(n_mu, h_tol, h_out, std::cout);
    if (*self) return cmd_selftest(self_o, std::cout);
  } catch (const Error& e) {
    std::cerr << to_string(e.category()) << " error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return 0;
}
