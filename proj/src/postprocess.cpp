#include "halfspace/postprocess.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "halfspace/error.hpp"

namespace halfspace {

const char* to_string(FilterKind kind)
{
  return kind == FilterKind::cosine ? "cosine" : "none";
}

FilterKind parse_filter_kind(const std::string& name)
{
  if (name == "none") return FilterKind::none;
  if (name == "cosine") return FilterKind::cosine;
  throw ConfigError("unknown filter kind '" + name + "'");
}

void FilterSpec::validate() const
{
  if (order < 1) throw ConfigError("filter order must be >= 1");
}

Eigen::VectorXd filter_factors(int N, const FilterSpec& spec)
{
  spec.validate();
  Eigen::VectorXd sigma = Eigen::VectorXd::Ones(2 * N + 1);
  if (spec.kind == FilterKind::none) return sigma;
  for (int k = 0; k < sigma.size(); ++k) {
    const double theta = static_cast<double>(BasisSet::degree(k)) / (N + 1);
    sigma[k] = std::pow(std::cos(0.5 * std::numbers::pi * theta), spec.order);
  }
  return sigma;
}

Eigen::VectorXd apply_filter(const Eigen::VectorXd& a, const FilterSpec& spec, int N)
{
  if (a.size() != 2 * N + 1) throw ConfigError("coefficient vector does not match 2N+1");
  if (spec.kind == FilterKind::none) {
    spec.validate();
    return a;
  }
  return a.cwiseProduct(filter_factors(N, spec));
}

double extrapolation_length(const RecoveredSolution& sol)
{
  if (sol.damped.system().model() != ModelKind::nte || sol.damped.incoming.description != "v")
    throw ModelMismatch("extrapolation length needs the transport model with incoming data v");
  if (sol.end_state.modes.size() != 1) throw ModelMismatch("expected a single H0 mode");
  return sol.end_state(0.0);
}

double extrapolation_length_for_order(int order, const SystemOptions& base)
{
  if (order < 2) throw ConfigError("order must be >= 2");
  SystemOptions options = base;
  options.N = order - 1;
  options.u = 0.0;
  auto system = std::make_shared<const GalerkinSystem>(build_system(ModelKind::nte, options));
  auto solver = DampedSolver::create(system);
  auto aux = std::make_shared<const AuxiliarySet>(build_auxiliary(solver));
  const auto damped = solve_damped(solver, make_incoming(ModelKind::nte, "v"));
  return extrapolation_length(recover(damped, aux));
}

double HFunctionTable::at(double mu) const
{
  if (!(mu >= 0.0 && mu <= 1.0)) throw OutOfDomain("H-function argument outside [0, 1]");
  if (mu == 0.0) return 1.0;
  double s = 0.0;
  for (Eigen::Index j = 0; j < mu_grid.size(); ++j)
    s += weights[j] * mu_grid[j] * H_values[j] / (mu + mu_grid[j]);
  return 1.0 / (0.5 * s);
}

double HFunctionTable::moment0() const { return weights.dot(H_values); }

double HFunctionTable::moment1() const
{
  return weights.cwiseProduct(mu_grid).dot(H_values);
}

HFunctionTable chandrasekhar_H(int n_mu, double tol, int max_iter)
{
  if (!(tol > 0.0)) throw ConfigError("H-function tolerance must be positive");
  if (n_mu < 2) throw ConfigError("H-function grid needs at least 2 nodes");
  const QuadratureRule rule = legendre01_rule(n_mu);
  HFunctionTable table;
  table.mu_grid = Eigen::Map<const Eigen::VectorXd>(rule.nodes.data(), n_mu);
  table.weights = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), n_mu);

  Eigen::MatrixXd K(n_mu, n_mu);
  for (int i = 0; i < n_mu; ++i)
    for (int j = 0; j < n_mu; ++j)
      K(i, j) = 0.5 * table.weights[j] * table.mu_grid[j] /
                (table.mu_grid[i] + table.mu_grid[j]);

  Eigen::VectorXd H = Eigen::VectorXd::Ones(n_mu);
  double change = INFINITY;
  int it = 0;
  while (it < max_iter) {
    ++it;
    const Eigen::VectorXd next = 0.5 * (H + (K * H).cwiseInverse());
    change = (next - H).cwiseAbs().maxCoeff();
    H = next;
    if (change < tol) break;
  }
  if (!(change < tol)) throw NotConverged(it, change);
  table.H_values = H;
  table.iterations = it;
  table.iteration_residual = (H.cwiseProduct(K * H) - Eigen::VectorXd::Ones(n_mu)).cwiseAbs().maxCoeff();
  return table;
}

namespace {

double expand(const BasisSet& basis, const Eigen::VectorXd& a, double v)
{
  return eval_expansion(basis, std::span<const double>(a.data(), a.size()), v);
}

}  // namespace

std::vector<ProfilePoint> sample_profile(const DampedSolution& sol, double x,
                                         const std::vector<double>& v_grid,
                                         const FilterSpec& filter)
{
  if (!(x >= 0.0)) throw OutOfDomain("x must be nonnegative");
  const BasisSet& basis = sol.system().basis;
  const Eigen::VectorXd a = apply_filter(sol.coefficients(x), filter, basis.N);
  std::vector<ProfilePoint> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) out.push_back({v, expand(basis, a, v)});
  return out;
}

std::vector<ProfilePoint> sample_profile(const RecoveredSolution& sol, double x,
                                         const std::vector<double>& v_grid,
                                         const FilterSpec& filter)
{
  if (!(x >= 0.0)) throw OutOfDomain("x must be nonnegative");
  const BasisSet& basis = sol.damped.system().basis;
  std::vector<ProfilePoint> out;
  out.reserve(v_grid.size());
  if (sol.shares_basis()) {
    Eigen::VectorXd a = apply_filter(sol.galerkin_coefficients(x), filter, basis.N);
    if (sol.aux && !sol.aux->empty()) a += sol.phi_projection;
    for (double v : v_grid) out.push_back({v, expand(basis, a, v)});
    return out;
  }

  const Eigen::VectorXd af = apply_filter(sol.damped.coefficients(x), filter, basis.N);
  std::vector<std::pair<const BasisSet*, Eigen::VectorXd>> gs;
  Eigen::Index i = 0;
  for (const auto* set : {&sol.aux->g_plus, &sol.aux->g_zero}) {
    for (const auto& g : *set) {
      const BasisSet& gb = g.system().basis;
      gs.emplace_back(&gb, sol.eta[i++] * apply_filter(g.coefficients(x), filter, gb.N));
    }
  }
  for (double v : v_grid) {
    double f = expand(basis, af, v) + expand(basis, sol.phi_projection, v);
    for (const auto& [gb, ag] : gs) f -= expand(*gb, ag, v);
    out.push_back({v, f});
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int count)
{
  if (count < 1) throw ConfigError("grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

std::string profile_csv(const std::vector<ProfilePoint>& profile)
{
  std::string out = "v,f\n";
  char buf[64];
  for (const auto& p : profile) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.v, p.f);
    out += buf;
  }
  return out;
}

}  // namespace halfspace
