#include "halfspace/cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <sstream>

namespace halfspace::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using ojson = nlohmann::ordered_json;

namespace {

std::string fmt_real(double x)
{
  // shortest form that reads back to the same double
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& text)
{
  try {
    std::size_t pos = 0;
    const double x = std::stod(text, &pos);
    if (trim(text.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' is not a number: '" + text + "'");
}

int to_int(const std::string& key, const std::string& text)
{
  try {
    std::size_t pos = 0;
    const int x = std::stoi(text, &pos);
    if (trim(text.substr(pos)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' is not an integer: '" + text + "'");
}

void write_file(const fs::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("cannot write " + path.string());
}

}  // namespace

double RunConfig::effective_v_min() const
{
  if (v_min) return *v_min;
  return model == ModelKind::nte ? -1.0 : -5.0;
}

double RunConfig::effective_v_max() const
{
  if (v_max) return *v_max;
  return model == ModelKind::nte ? 1.0 : 5.0;
}

SystemOptions RunConfig::system_options(int galerkin_N) const
{
  SystemOptions o;
  o.N = galerkin_N;
  o.u = u;
  o.alpha = alpha;
  o.quad_points = std::max(quad_points, 2 * galerkin_N + 8);
  o.tol_null = tol_null;
  o.boundary.quad_points = boundary_quad_points;
  o.boundary.tolerance = boundary_tol;
  return o;
}

void RunConfig::validate() const
{
  if (N < 1) throw ConfigError("N must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
  if (quad_points != 0 && quad_points < 2 * N + 8)
    throw ConfigError("quad_points must be >= 2N+8 (" + std::to_string(2 * N + 8) + ")");
  if (aux_N < 0) throw ConfigError("aux_N must be >= 0");
  if (model == ModelKind::nte && u != 0.0)
    throw ConfigError("the transport model requires u = 0");
  if (!std::isfinite(u)) throw ConfigError("u must be finite");
  if (!(tol_null > 0.0) || !(tol_zero > 0.0)) throw ConfigError("tolerances must be > 0");
  if (boundary_quad_points < 1 || !(boundary_tol > 0.0))
    throw ConfigError("boundary quadrature settings must be positive");
  filter.validate();
  if (x_samples.empty()) throw ConfigError("x_samples must not be empty");
  for (double x : x_samples)
    if (!(x >= 0.0)) throw ConfigError("x_samples must be >= 0");
  if (v_count < 1) throw ConfigError("v_count must be >= 1");
  if (!(effective_v_min() <= effective_v_max())) throw ConfigError("v_min must be <= v_max");
  if (model == ModelKind::nte && (effective_v_min() < -1.0 || effective_v_max() > 1.0))
    throw ConfigError("transport velocities lie in [-1, 1]");
  if (output_dir.empty()) throw ConfigError("output dir must not be empty");
}

ModelKind parse_model(const std::string& name)
{
  if (name == "bgk") return ModelKind::bgk;
  if (name == "nte") return ModelKind::nte;
  throw ConfigError("unknown model '" + name + "' (expected bgk or nte)");
}

std::vector<double> parse_real_list(const std::string& text)
{
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_real("list", item));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text)
{
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_int("list", item));
  }
  return out;
}

RunConfig parse_config(const std::string& text, RunConfig c)
{
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }

  static const std::vector<std::string> known{
      "model.name", "model.u",
      "discretization.N", "discretization.alpha", "discretization.quad_points",
      "discretization.aux_N", "discretization.tol_null", "discretization.tol_zero",
      "discretization.boundary_quad_points", "discretization.boundary_tol",
      "incoming.data",
      "filter.kind", "filter.order",
      "output.x_samples", "output.v_count", "output.v_min", "output.v_max", "output.dir",
      "output.cache_dir"};
  for (const auto& [section, body] : tree) {
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (std::find(known.begin(), known.end(), full) == known.end())
        throw ConfigError("unknown config key '" + full + "'");
    }
  }

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.')))
      return trim(*v);
    return std::nullopt;
  };
  if (auto v = get("model.name")) c.model = parse_model(*v);
  if (auto v = get("model.u")) c.u = to_real("model.u", *v);
  if (auto v = get("discretization.N")) c.N = to_int("N", *v);
  if (auto v = get("discretization.alpha")) c.alpha = to_real("alpha", *v);
  if (auto v = get("discretization.quad_points")) c.quad_points = to_int("quad_points", *v);
  if (auto v = get("discretization.aux_N")) c.aux_N = to_int("aux_N", *v);
  if (auto v = get("discretization.tol_null")) c.tol_null = to_real("tol_null", *v);
  if (auto v = get("discretization.tol_zero")) c.tol_zero = to_real("tol_zero", *v);
  if (auto v = get("discretization.boundary_quad_points"))
    c.boundary_quad_points = to_int("boundary_quad_points", *v);
  if (auto v = get("discretization.boundary_tol")) c.boundary_tol = to_real("boundary_tol", *v);
  if (auto v = get("incoming.data")) c.incoming = *v;
  if (auto v = get("filter.kind")) c.filter.kind = parse_filter_kind(*v);
  if (auto v = get("filter.order")) c.filter.order = to_int("filter.order", *v);
  if (auto v = get("output.x_samples")) c.x_samples = parse_real_list(*v);
  if (auto v = get("output.v_count")) c.v_count = to_int("v_count", *v);
  if (auto v = get("output.v_min"))
    c.v_min = v->empty() ? std::nullopt : std::optional<double>(to_real("v_min", *v));
  if (auto v = get("output.v_max"))
    c.v_max = v->empty() ? std::nullopt : std::optional<double>(to_real("v_max", *v));
  if (auto v = get("output.dir")) c.output_dir = *v;
  if (auto v = get("output.cache_dir")) c.cache_dir = *v;
  return c;
}

RunConfig load_config(const fs::path& path, RunConfig base)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const RunConfig& c)
{
  std::ostringstream o;
  std::string xs;
  for (std::size_t i = 0; i < c.x_samples.size(); ++i)
    xs += (i ? ", " : "") + fmt_real(c.x_samples[i]);
  o << "[model]\n"
    << "name = " << to_string(c.model) << "\n"
    << "u = " << fmt_real(c.u) << "\n\n"
    << "[discretization]\n"
    << "N = " << c.N << "\n"
    << "alpha = " << fmt_real(c.alpha) << "\n"
    << "quad_points = " << c.quad_points << "\n"
    << "aux_N = " << c.aux_N << "\n"
    << "tol_null = " << fmt_real(c.tol_null) << "\n"
    << "tol_zero = " << fmt_real(c.tol_zero) << "\n"
    << "boundary_quad_points = " << c.boundary_quad_points << "\n"
    << "boundary_tol = " << fmt_real(c.boundary_tol) << "\n\n"
    << "[incoming]\n"
    << "data = " << c.incoming << "\n\n"
    << "[filter]\n"
    << "kind = " << to_string(c.filter.kind) << "\n"
    << "order = " << c.filter.order << "\n\n"
    << "[output]\n"
    << "x_samples = " << xs << "\n"
    << "v_count = " << c.v_count << "\n"
    << "v_min = " << (c.v_min ? fmt_real(*c.v_min) : "") << "\n"
    << "v_max = " << (c.v_max ? fmt_real(*c.v_max) : "") << "\n"
    << "dir = " << c.output_dir << "\n"
    << "cache_dir = " << c.cache_dir << "\n";
  return o.str();
}

int exit_code(ErrorCategory category)
{
  switch (category) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::assembly: return 3;
    case ErrorCategory::eigen: return 4;
    case ErrorCategory::singular: return 5;
    case ErrorCategory::quadrature: return 6;
    case ErrorCategory::domain: return 7;
  }
  return exit_failure;
}

double l2_distance(const RecoveredSolution& sol, double x, const std::function<double(double)>& g)
{
  const VelocityGrid grid = make_velocity_grid(sol.damped.system().model(),
                                               sol.damped.system().options.u);
  double s = 0.0;
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i) {
    const double v = grid.nodes[i];
    const double d = evaluate_recovered(sol, x, v) - g(v);
    s += grid.weights[i] * d * d;
  }
  return std::sqrt(s);
}

namespace {

struct Pipeline
{
  std::shared_ptr<const DampedSolver> solver;
  std::shared_ptr<const AuxiliarySet> aux;
  RecoveredSolution recovered;
};

Pipeline run_pipeline(const RunConfig& c)
{
  c.validate();
  const IncomingData incoming = make_incoming(c.model, c.incoming);
  auto system = std::make_shared<const GalerkinSystem>(build_system(c.model, c.system_options(c.N)));
  Pipeline p;
  p.solver = DampedSolver::create(system, c.tol_zero);

  std::optional<AuxiliaryCache> cache;
  const fs::path cache_dir = AuxiliaryCache::resolve_dir(c.cache_dir);
  if (!cache_dir.empty()) cache.emplace(cache_dir);

  auto aux_solver = p.solver;
  if (c.effective_aux_N() != c.N) {
    auto aux_system = std::make_shared<const GalerkinSystem>(
        build_system(c.model, c.system_options(c.effective_aux_N())));
    aux_solver = DampedSolver::create(aux_system, c.tol_zero);
  }
  auto aux_future = std::async(std::launch::async, [&] {
    return build_auxiliary(aux_solver, cache ? &*cache : nullptr);
  });
  const DampedSolution damped = solve_damped(p.solver, incoming);
  p.aux = std::make_shared<const AuxiliarySet>(aux_future.get());
  p.recovered = recover(damped, p.aux);
  return p;
}

ojson real_array(const Eigen::VectorXd& v)
{
  auto arr = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ojson config_json(const RunConfig& c)
{
  ojson j;
  j["model"] = to_string(c.model);
  j["u"] = c.u;
  j["N"] = c.N;
  j["alpha"] = c.alpha;
  j["quad_points"] = c.effective_quad_points();
  j["aux_N"] = c.effective_aux_N();
  j["tol_null"] = c.tol_null;
  j["tol_zero"] = c.tol_zero;
  j["boundary_quad_points"] = c.boundary_quad_points;
  j["boundary_tol"] = c.boundary_tol;
  j["incoming"] = c.incoming;
  j["filter"] = {{"kind", to_string(c.filter.kind)}, {"order", c.filter.order}};
  j["x_samples"] = c.x_samples;
  j["v_grid"] = {{"count", c.v_count}, {"min", c.effective_v_min()}, {"max", c.effective_v_max()}};
  return j;
}

}  // namespace

SolveResult cmd_solve(const RunConfig& c, std::ostream& log)
{
  Pipeline p = run_pipeline(c);
  const RecoveredSolution& rec = p.recovered;
  const GalerkinSystem& sys = p.solver->system();
  const auto& eig = p.solver->eig();
  const auto& dec = sys.damped_op.decomposition;

  const fs::path dir = c.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output dir " + dir.string());

  ojson j;
  j["schema"] = "halfspace.summary/1";
  j["command"] = "solve";
  j["config"] = config_json(c);

  ojson modes = ojson::array();
  for (const auto* fam : {&dec.plus, &dec.zero, &dec.minus}) {
    const char* kind = fam == &dec.plus ? "plus" : fam == &dec.zero ? "zero" : "minus";
    for (const auto& m : *fam) modes.push_back({{"label", m.label}, {"family", kind}, {"gamma", m.gamma}});
  }
  j["null_space"] = {{"nu_plus", dec.nu_plus()},
                     {"nu_minus", dec.nu_minus()},
                     {"nu_zero", dec.nu_zero()},
                     {"modes", modes}};

  j["eigenvalues"] = {{"positive", eig.positive.size()},
                      {"negative", eig.negative.size()},
                      {"zero", eig.zero.size()},
                      {"tol_zero", eig.tol_zero},
                      {"lambda_min", eig.lambdas.minCoeff()},
                      {"lambda_max", eig.lambdas.maxCoeff()}};
  j["conditions"] = {{"boundary_system", p.solver->condition_estimate()},
                     {"C", p.aux->condition_estimate}};

  j["eta"] = real_array(rec.eta);
  ojson end_modes = ojson::array();
  for (std::size_t i = 0; i < rec.end_state.modes.size(); ++i)
    end_modes.push_back({{"label", rec.end_state.modes[i].label},
                         {"coefficient", rec.eta[static_cast<Eigen::Index>(i)]}});
  j["end_state"] = {{"modes", end_modes}, {"file", "end_state.csv"}};

  ojson residuals;
  residuals["constraint"] = rec.damped.constraint_residual();
  residuals["boundary"] = rec.damped.boundary_residual();
  residuals["boundary_quadrature_error"] = rec.damped.boundary_quadrature_error;
  residuals["corrected_moments_x0"] =
      rec.eta.size() ? rec.corrected_moments(0.0).cwiseAbs().maxCoeff() : 0.0;
  if (rec.shares_basis()) {
    const Eigen::VectorXd U0 = flux_moments(sys.flux, rec.coefficients(0.0)).stacked();
    double drift = 0.0;
    for (double x : c.x_samples) {
      const Eigen::VectorXd Ux = flux_moments(sys.flux, rec.coefficients(x)).stacked();
      if (Ux.size()) drift = std::max(drift, (Ux - U0).cwiseAbs().maxCoeff());
    }
    residuals["conservation_drift"] = drift;
  } else {
    residuals["conservation_drift"] = nullptr;
  }
  j["residuals"] = residuals;

  const IncomingData& incoming = rec.damped.incoming;
  if (incoming.exact) {
    j["exact_mode_l2_error"] = l2_distance(rec, 0.0, [&](double v) { return incoming(v); });
  } else {
    j["exact_mode_l2_error"] = nullptr;
  }

  const std::vector<double> v_grid = linspace(c.effective_v_min(), c.effective_v_max(), c.v_count);
  ojson profiles = ojson::array();
  for (std::size_t i = 0; i < c.x_samples.size(); ++i) {
    const std::string name = "profile_" + std::to_string(i) + ".csv";
    write_file(dir / name, profile_csv(sample_profile(rec, c.x_samples[i], v_grid, c.filter)));
    profiles.push_back({{"x", c.x_samples[i]}, {"file", name}});
  }
  j["profiles"] = profiles;

  std::vector<ProfilePoint> end_profile;
  for (double v : v_grid) end_profile.push_back({v, rec.end_state(v)});
  write_file(dir / "end_state.csv", profile_csv(end_profile));

  SolveResult result{rec, j.dump(2) + "\n"};
  write_file(dir / "summary.json", result.summary_json);
  write_file(dir / "config.ini", format_config(c));

  log << "model " << to_string(c.model) << ", u = " << fmt_real(c.u) << ", N = " << c.N
      << ", incoming " << c.incoming << "\n";
  log << "signature (" << eig.positive.size() << ", " << eig.negative.size() << ", "
      << eig.zero.size() << "), boundary condition " << std::setprecision(3)
      << p.solver->condition_estimate() << ", C condition " << p.aux->condition_estimate << "\n";
  log << std::setprecision(17);
  for (std::size_t i = 0; i < rec.end_state.modes.size(); ++i)
    log << "eta[" << rec.end_state.modes[i].label << "] = " << rec.eta[static_cast<Eigen::Index>(i)]
        << "\n";
  log << "wrote " << dir.string() << "\n";
  return result;
}

std::vector<ExtrapolationRow> extrapolation_table(const std::vector<int>& orders,
                                                  const RunConfig& base)
{
  std::vector<std::future<double>> jobs;
  for (int order : orders) {
    if (order < 2) throw ConfigError("orders must be >= 2");
    RunConfig c = base;
    c.model = ModelKind::nte;
    c.u = 0.0;
    c.N = order - 1;
    c.quad_points = 0;
    jobs.push_back(std::async(std::launch::async, [c, order] {
      return extrapolation_length_for_order(order, c.system_options(order - 1));
    }));
  }
  std::vector<ExtrapolationRow> rows;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double L = jobs[i].get();
    rows.push_back({orders[i], orders[i] - 1, L, L - exact_extrapolation_length});
  }
  return rows;
}

int cmd_extrapolation_table(const std::vector<int>& orders, const RunConfig& base,
                            const std::string& out_dir, std::ostream& out)
{
  const auto rows = extrapolation_table(orders, base);
  std::string csv = "order,N,length,error\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r.order, r.N, r.length, r.error);
    csv += buf;
  }
  out << csv;
  out << "exact " << fmt_real(exact_extrapolation_length) << "\n";
  for (const auto& r : rows) {
    if (r.order != 12) continue;
    const double coron = std::abs(coron_extrapolation_length - exact_extrapolation_length);
    out << "order 12 error " << fmt_real(std::abs(r.error)) << " vs Coron error "
        << fmt_real(coron) << (std::abs(r.error) < coron ? " (better)" : " (worse)") << "\n";
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "extrapolation.csv", csv);
    ojson j;
    j["schema"] = "halfspace.extrapolation/1";
    j["exact"] = exact_extrapolation_length;
    j["coron"] = coron_extrapolation_length;
    ojson arr = ojson::array();
    for (const auto& r : rows)
      arr.push_back({{"order", r.order}, {"N", r.N}, {"length", r.length}, {"error", r.error}});
    j["rows"] = arr;
    write_file(fs::path(out_dir) / "extrapolation.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_convergence(const RunConfig& config, const std::vector<int>& orders, std::ostream& out)
{
  if (orders.empty()) throw ConfigError("convergence needs at least one N");
  std::vector<std::future<Pipeline>> jobs;
  for (int N : orders) {
    RunConfig c = config;
    c.N = N;
    c.quad_points = 0;
    c.aux_N = 0;
    c.cache_dir.clear();
    jobs.push_back(std::async(std::launch::async, [c] { return run_pipeline(c); }));
  }
  std::vector<Pipeline> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  // exact-mode data is compared against itself, anything else against the largest N
  const IncomingData& incoming = runs.front().recovered.damped.incoming;
  std::size_t ref = 0;
  for (std::size_t i = 1; i < orders.size(); ++i)
    if (orders[i] > orders[ref]) ref = i;
  std::function<double(double)> reference;
  std::string reference_name;
  if (incoming.exact) {
    reference = [&](double v) { return incoming(v); };
    reference_name = "incoming";
  } else {
    const RecoveredSolution& r = runs[ref].recovered;
    reference = [&r](double v) { return evaluate_recovered(r, 0.0, v); };
    reference_name = "N=" + std::to_string(orders[ref]);
  }

  std::string csv = "N,l2_error\n";
  char buf[96];
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double e = l2_distance(runs[i].recovered, 0.0, reference);
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", orders[i], e);
    csv += buf;
  }
  out << "# reference: " << reference_name << "\n" << csv;
  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    write_file(fs::path(config.output_dir) / "convergence.csv", csv);
  }
  return 0;
}

int cmd_h_function(int n_mu, double tol, const std::string& out_dir, std::ostream& out)
{
  const HFunctionTable H = chandrasekhar_H(n_mu, tol);
  std::string csv = "mu,H\n";
  char buf[96];
  for (Eigen::Index i = 0; i < H.mu_grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", H.mu_grid[i], H.H_values[i]);
    csv += buf;
  }
  out << csv;
  out << "iterations " << H.iterations << ", residual " << fmt_real(H.iteration_residual) << "\n";
  out << "moment0 " << fmt_real(H.moment0()) << " (2)\n";
  out << "moment1 " << fmt_real(H.moment1()) << " (" << fmt_real(2.0 / std::sqrt(3.0)) << ")\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "h_function.csv", csv);
  }
  return 0;
}

namespace {

void require(bool ok, const std::string& what)
{
  if (!ok) throw std::runtime_error(what);
}

using Suite = std::pair<const char*, std::function<void(const SelftestOptions&)>>;

const double c_sound = std::sqrt(1.5);
const std::vector<double> u_cases{-2.0, -c_sound, -0.5, 0.0, 0.5, c_sound, 2.0};

std::shared_ptr<const DampedSolver> make_solver(ModelKind model, int N, double u,
                                                const SelftestOptions& o)
{
  SystemOptions so;
  so.N = N;
  so.u = u;
  so.alpha = o.alpha;
  return DampedSolver::create(std::make_shared<const GalerkinSystem>(build_system(model, so)),
                              o.tol_zero);
}

std::vector<Suite> suites()
{
  return {
      {"orthopoly",
       [](const SelftestOptions&) {
         for (double s : {0.0, 0.75, -0.75}) {
           const int n = 20;
           const auto t = half_hermite_recurrence(s, n);
           const auto rule = half_gauss_rule(s, n + 2);
           Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n + 1, n + 1);
           for (std::size_t q = 0; q < rule.size(); ++q) {
             const auto p = evaluate_polys(t, rule.nodes[q], n);
             const Eigen::Map<const Eigen::VectorXd> pv(p.data(), n + 1);
             G += rule.weights[q] * pv * pv.transpose();
           }
           const double err = (G - Eigen::MatrixXd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff();
           require(err < 1e-11, "half-range orthonormality " + fmt_real(err));
         }
       }},
      {"basis",
       [](const SelftestOptions&) {
         const auto basis = build_basis(BasisKind::bgk_half_hermite, 8, 0.5);
         const auto grid = make_velocity_grid(ModelKind::bgk, 0.5);
         Eigen::MatrixXd Psi(grid.nodes.size(), basis.size());
         for (Eigen::Index q = 0; q < grid.nodes.size(); ++q) {
           const auto row = eval_basis(basis, grid.nodes[q]);
           for (int k = 0; k < basis.size(); ++k) Psi(q, k) = row[static_cast<std::size_t>(k)];
         }
         const Eigen::MatrixXd G = Psi.transpose() * grid.weights.asDiagonal() * Psi;
         const double err = (G - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff();
         require(err < 1e-11, "basis orthonormality " + fmt_real(err));
       }},
      {"model",
       [](const SelftestOptions&) {
         const int expected[7][3] = {{0, 3, 0}, {0, 2, 1}, {1, 2, 0}, {1, 1, 1},
                                     {2, 1, 0}, {2, 0, 1}, {3, 0, 0}};
         const auto model = make_model(ModelKind::bgk);
         for (std::size_t i = 0; i < u_cases.size(); ++i) {
           const auto d = null_space_decomposition(model, u_cases[i]);
           require(d.nu_plus() == expected[i][0] && d.nu_minus() == expected[i][1] &&
                       d.nu_zero() == expected[i][2],
                   "null-space dimensions at u = " + fmt_real(u_cases[i]));
         }
       }},
      {"assembly",
       [](const SelftestOptions& o) {
         for (double u : u_cases) {
           SystemOptions so;
           so.N = 6;
           so.u = u;
           so.alpha = o.alpha;
           const auto sys = build_system(ModelKind::bgk, so);
           require((sys.A - sys.A.transpose()).cwiseAbs().maxCoeff() < 1e-13, "A symmetry");
         }
       }},
      {"spectral",
       [](const SelftestOptions& o) {
         for (double u : {-0.5, 0.0, c_sound}) {
           const auto solver = make_solver(ModelKind::bgk, 8, u, o);
           const auto sol = solve_damped(solver, make_incoming(ModelKind::bgk, "v_cubed"));
           require(sol.constraint_residual() < 1e-9, "constraint residual");
           require(sol.boundary_residual() < 1e-9, "boundary residual");
         }
         make_solver(ModelKind::nte, 8, 0.0, o);
       }},
      {"recovery",
       [](const SelftestOptions& o) {
         const auto solver = make_solver(ModelKind::bgk, 12, 0.0, o);
         auto aux = std::make_shared<const AuxiliarySet>(build_auxiliary(solver));
         const auto chi = chi_modes(0.0).plus;
         const auto rec = recover(solve_damped(solver, incoming_from_mode("chi_plus", chi)), aux);
         const double err = l2_distance(rec, 0.0, [&](double v) { return chi(v); });
         require(err < 1e-10, "chi_plus recovery error " + fmt_real(err));
       }},
      {"postprocess",
       [](const SelftestOptions& o) {
         const auto H = chandrasekhar_H();
         require(std::abs(H.moment0() - 2.0) < 5e-6, "H moment 0");
         require(std::abs(H.moment1() - 2.0 / std::sqrt(3.0)) < 5e-6, "H moment 1");
         SystemOptions so;
         so.alpha = o.alpha;
         const double L = extrapolation_length_for_order(4, so);
         require(std::abs(L - 0.709324539775964) < 1e-9, "extrapolation length order 4");
       }},
  };
}

}  // namespace

int cmd_selftest(const SelftestOptions& options, std::ostream& out)
{
  int failures = 0;
  for (const auto& [name, run] : suites()) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      run(options);
    } catch (const Error& e) {
      ok = false;
      detail = std::string(to_string(e.category())) + " error: " + e.what();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.2f s)", secs);
    out << (ok ? "PASS " : "FAIL ") << name << buf;
    if (!ok) out << ": " << detail;
    out << "\n";
    failures += ok ? 0 : 1;
  }
  out << (failures ? std::to_string(failures) + " suite(s) failed" : "all suites passed") << "\n";
  return failures ? exit_failure : 0;
}

}  // namespace halfspace::cli
