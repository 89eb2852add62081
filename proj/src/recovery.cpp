#include "halfspace/recovery.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "halfspace/error.hpp"

namespace halfspace {

namespace fs = std::filesystem;

fs::path AuxiliaryCache::resolve_dir(const fs::path& fallback)
{
  if (const char* env = std::getenv("HALFSPACE_CACHE_DIR"); env && *env) return fs::path(env);
  return fallback;
}

std::string AuxiliaryCache::config_key(const DampedSolver& solver)
{
  const GalerkinSystem& sys = solver.system();
  const SystemOptions& o = sys.options;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s;model=%s;N=%d;u=%.17g;alpha=%.17g;quad=%d;tol_null=%.17g;tol_zero=%.17g;"
                "bq=%d;btol=%.17g",
                format, to_string(sys.model()), sys.N(), o.u, o.alpha,
                static_cast<int>(sys.rules.positive.size()), o.tol_null, solver.eig().tol_zero,
                o.boundary.quad_points, o.boundary.tolerance);
  return buf;
}

std::string AuxiliaryCache::hash(const std::string& key)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

fs::path AuxiliaryCache::path_for(const std::string& key) const
{
  return dir_ / ("aux-v1-" + hash(key) + ".json");
}

namespace {

std::vector<Eigen::VectorXd> vectors_from_json(const nlohmann::json& arr)
{
  std::vector<Eigen::VectorXd> out;
  for (const auto& row : arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) v[static_cast<Eigen::Index>(i)] = row[i].get<double>();
    out.push_back(std::move(v));
  }
  return out;
}

nlohmann::json vectors_to_json(const std::vector<Eigen::VectorXd>& vs)
{
  auto arr = nlohmann::json::array();
  for (const auto& v : vs) arr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return arr;
}

}  // namespace

std::optional<AuxiliaryCache::Entry> AuxiliaryCache::load(const std::string& key) const
{
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != format || j.at("hash") != hash(key) || j.at("config") != key)
      return std::nullopt;
    return Entry{vectors_from_json(j.at("g_plus")), vectors_from_json(j.at("g_zero"))};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void AuxiliaryCache::store(const std::string& key, const Entry& entry) const
{
  std::error_code ec;
  fs::create_directories(dir_, ec);
  nlohmann::json j;
  j["format"] = format;
  j["hash"] = hash(key);
  j["config"] = key;
  j["g_plus"] = vectors_to_json(entry.g_plus);
  j["g_zero"] = vectors_to_json(entry.g_zero);

  const fs::path target = path_for(key);
  std::ostringstream suffix;
  suffix << ".tmp." << std::hex << std::hash<std::thread::id>{}(std::this_thread::get_id());
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp);
    if (!out) return;  // an unwritable cache only costs recomputation
    out << j.dump(1) << '\n';
    if (!out) {
      fs::remove(tmp, ec);
      return;
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) fs::remove(tmp, ec);
}

AuxiliarySet build_auxiliary(std::shared_ptr<const DampedSolver> solver,
                             const AuxiliaryCache* cache)
{
  AuxiliarySet aux;
  aux.solver = solver;
  const GalerkinSystem& sys = solver->system();
  const NullSpaceDecomposition& dec = sys.damped_op.decomposition;

  std::vector<const NullMode*> modes;
  for (const auto& m : dec.plus) modes.push_back(&m);
  for (const auto& m : dec.zero) modes.push_back(&m);
  const auto n = static_cast<Eigen::Index>(modes.size());
  if (n == 0) {
    aux.C.resize(0, 0);
    return aux;
  }

  std::string key;
  std::optional<AuxiliaryCache::Entry> cached;
  if (cache) {
    key = AuxiliaryCache::config_key(*solver);
    cached = cache->load(key);
    if (cached && (cached->g_plus.size() != dec.plus.size() ||
                   cached->g_zero.size() != dec.zero.size()))
      cached.reset();
    if (cached) {
      for (const auto* set : {&cached->g_plus, &cached->g_zero})
        for (const auto& a : *set)
          if (a.size() != sys.size()) cached.reset();
    }
  }

  std::vector<DampedSolution> solutions;
  if (cached) {
    std::vector<Eigen::VectorXd> a0s = cached->g_plus;
    a0s.insert(a0s.end(), cached->g_zero.begin(), cached->g_zero.end());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& mode = *modes[static_cast<std::size_t>(i)];
      const IncomingData data = incoming_from_mode(mode.label, mode.X);
      solutions.push_back(
          solution_from_a0(solver, data, sys.boundary(data), a0s[static_cast<std::size_t>(i)]));
    }
    aux.from_cache = true;
  } else {
    std::vector<std::future<DampedSolution>> jobs;
    for (const NullMode* mode : modes) {
      jobs.push_back(std::async(std::launch::async, [solver, mode] {
        return solve_damped(solver, incoming_from_mode(mode->label, mode->X));
      }));
    }
    for (auto& job : jobs) solutions.push_back(job.get());
  }

  const auto n_plus = dec.plus.size();
  aux.g_plus.assign(solutions.begin(), solutions.begin() + static_cast<std::ptrdiff_t>(n_plus));
  aux.g_zero.assign(solutions.begin() + static_cast<std::ptrdiff_t>(n_plus), solutions.end());

  // rows: flux functionals <(v+u)X_a, .> over (H+, H0); columns: auxiliary solutions
  std::vector<const Eigen::VectorXd*> functionals;
  for (const auto& f : sys.flux.plus) functionals.push_back(&f);
  for (const auto& f : sys.flux.zero) functionals.push_back(&f);
  aux.C.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      aux.C(a, b) = functionals[static_cast<std::size_t>(a)]->dot(
          solutions[static_cast<std::size_t>(b)].a0);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(aux.C);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  aux.condition_estimate = smin > 0.0 ? sv[0] / smin : INFINITY;
  if (!(aux.condition_estimate <= max_C_condition)) throw SingularC(aux.condition_estimate);

  if (cache && !cached) {
    AuxiliaryCache::Entry entry;
    for (const auto& g : aux.g_plus) entry.g_plus.push_back(g.a0);
    for (const auto& g : aux.g_zero) entry.g_zero.push_back(g.a0);
    cache->store(key, entry);
  }
  return aux;
}

double EndState::operator()(double v) const
{
  double out = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i)
    out += eta[static_cast<Eigen::Index>(i)] * modes[i].X(v);
  return out;
}

namespace {

std::vector<const DampedSolution*> aux_solutions(const AuxiliarySet& aux)
{
  std::vector<const DampedSolution*> out;
  for (const auto& g : aux.g_plus) out.push_back(&g);
  for (const auto& g : aux.g_zero) out.push_back(&g);
  return out;
}

}  // namespace

bool RecoveredSolution::shares_basis() const
{
  return !aux || aux->empty() || aux->solver->system().size() == damped.system().size();
}

Eigen::VectorXd RecoveredSolution::galerkin_coefficients(double x) const
{
  if (!aux || aux->empty()) return damped.coefficients(x);
  if (!shares_basis())
    throw ConfigError("auxiliary order differs from the main order; use pointwise evaluation");
  Eigen::VectorXd a = damped.coefficients(x);
  const auto gs = aux_solutions(*aux);
  for (std::size_t i = 0; i < gs.size(); ++i)
    a -= eta[static_cast<Eigen::Index>(i)] * gs[i]->coefficients(x);
  return a;
}

Eigen::VectorXd RecoveredSolution::coefficients(double x) const
{
  if (!aux || aux->empty()) return damped.coefficients(x);
  return galerkin_coefficients(x) + phi_projection;
}

Eigen::VectorXd RecoveredSolution::corrected_moments(double x) const
{
  const auto& flux = damped.system().flux;
  auto moments = [](const FluxVectors& fl, const Eigen::VectorXd& a) {
    const UVector u = flux_moments(fl, a);
    Eigen::VectorXd out(u.plus.size() + u.zero.size());
    out << u.plus, u.zero;
    return out;
  };
  Eigen::VectorXd m = moments(flux, damped.coefficients(x));
  if (aux && !aux->empty()) {
    const auto gs = aux_solutions(*aux);
    for (std::size_t i = 0; i < gs.size(); ++i)
      m -= eta[static_cast<Eigen::Index>(i)] *
           moments(gs[i]->system().flux, gs[i]->coefficients(x));
  }
  return m;
}

RecoveredSolution recover(const DampedSolution& damped, std::shared_ptr<const AuxiliarySet> aux)
{
  RecoveredSolution sol;
  sol.damped = damped;
  sol.aux = aux;
  if (!aux || aux->empty()) {
    sol.eta.resize(0);
    sol.phi_projection = Eigen::VectorXd::Zero(damped.system().size());
    return sol;
  }
  if (aux->solver->system().model() != damped.system().model() ||
      aux->solver->system().options.u != damped.system().options.u)
    throw ModelMismatch("auxiliary set built for a different model or bulk velocity");

  const NullSpaceDecomposition& dec = damped.system().damped_op.decomposition;
  const UVector U = solution_moments(damped, 0.0);
  Eigen::VectorXd rhs(U.plus.size() + U.zero.size());
  rhs << U.plus, U.zero;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(aux->C);
  sol.eta = lu.solve(rhs);
  sol.eta += lu.solve(rhs - aux->C * sol.eta);

  sol.end_state.modes = dec.plus;
  sol.end_state.modes.insert(sol.end_state.modes.end(), dec.zero.begin(), dec.zero.end());
  sol.end_state.eta = sol.eta;

  sol.phi_projection = Eigen::VectorXd::Zero(damped.system().size());
  for (std::size_t i = 0; i < sol.end_state.modes.size(); ++i)
    sol.phi_projection +=
        sol.eta[static_cast<Eigen::Index>(i)] * damped.system().project(sol.end_state.modes[i].X);
  return sol;
}

double evaluate_recovered(const RecoveredSolution& sol, double x, double v)
{
  if (!(x >= 0.0)) throw OutOfDomain("x must be nonnegative");
  const BasisSet& basis = sol.damped.system().basis;
  if (sol.shares_basis()) {
    const Eigen::VectorXd a = sol.coefficients(x);
    return eval_expansion(basis, std::span<const double>(a.data(), a.size()), v);
  }
  double out = evaluate_solution(sol.damped, x, v);
  const auto gs = aux_solutions(*sol.aux);
  for (std::size_t i = 0; i < gs.size(); ++i)
    out -= sol.eta[static_cast<Eigen::Index>(i)] * evaluate_solution(*gs[i], x, v);
  const Eigen::VectorXd& p = sol.phi_projection;
  return out + eval_expansion(basis, std::span<const double>(p.data(), p.size()), v);
}

}  // namespace halfspace
