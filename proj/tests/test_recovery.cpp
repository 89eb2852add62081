#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "halfspace/error.hpp"
#include "halfspace/recovery.hpp"
#include "oracles.hpp"

using namespace halfspace;
namespace fs = std::filesystem;

namespace {

const double c = std::sqrt(1.5);

std::shared_ptr<const DampedSolver> solver_for(ModelKind model, int N, double u)
{
  SystemOptions o;
  o.N = N;
  o.u = u;
  return DampedSolver::create(std::make_shared<const GalerkinSystem>(build_system(model, o)));
}

RecoveredSolution solve(ModelKind model, int N, double u, const IncomingData& phi,
                        const AuxiliaryCache* cache = nullptr)
{
  const auto s = solver_for(model, N, u);
  auto aux = std::make_shared<const AuxiliarySet>(build_auxiliary(s, cache));
  return recover(solve_damped(s, phi), aux);
}

double l2_error(const RecoveredSolution& sol, double x, const std::function<double(double)>& g)
{
  const ModelKind model = sol.damped.system().model();
  return std::sqrt(oracle::rule_integral(model, sol.damped.system().options.u, [&](double v) {
    const double d = evaluate_recovered(sol, x, v) - g(v);
    return d * d;
  }));
}

struct TempDir
{
  fs::path path;
  TempDir()
  {
    path = fs::temp_directory_path() /
           ("halfspace-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST(Recovery, ExactModeAtZeroShift)
{
  const auto chi = chi_modes(0.0);
  const auto sol = solve(ModelKind::bgk, 20, 0.0, incoming_from_mode("chi_plus", chi.plus));
  EXPECT_LT(l2_error(sol, 0.0, [&](double v) { return chi.plus(v); }), 1e-10);
  EXPECT_LT(l2_error(sol, 3.0, [&](double v) { return chi.plus(v); }), 1e-10);
  ASSERT_EQ(sol.eta.size(), 2);
  EXPECT_NEAR(sol.eta[0], 1.0, 1e-10);
  EXPECT_NEAR(sol.eta[1], 0.0, 1e-10);
  for (double v : {-2.0, 0.0, 1.3}) EXPECT_NEAR(sol.end_state(v), chi.plus(v), 1e-10);
}

TEST(Recovery, ZeroData)
{
  const auto sol = solve(ModelKind::bgk, 10, 0.5, make_incoming(ModelKind::bgk, "zero"));
  EXPECT_EQ(sol.eta.cwiseAbs().maxCoeff(), 0.0);
  for (double v : {-1.0, 0.7}) {
    EXPECT_EQ(evaluate_recovered(sol, 0.5, v), 0.0);
    EXPECT_EQ(sol.end_state(v), 0.0);
  }
}

TEST(Recovery, IdentityWithoutIncomingModes)
{
  const auto s = solver_for(ModelKind::bgk, 12, -2.0);
  const auto aux = std::make_shared<const AuxiliarySet>(build_auxiliary(s));
  EXPECT_TRUE(aux->empty());
  const auto damped = solve_damped(s, make_incoming(ModelKind::bgk, "v_cubed"));
  const auto sol = recover(damped, aux);
  for (double x : {0.0, 0.7}) {
    EXPECT_TRUE(sol.coefficients(x) == damped.coefficients(x));
    for (double v : {-3.0, 0.2, 2.5}) EXPECT_EQ(evaluate_recovered(sol, x, v), evaluate_solution(damped, x, v));
  }
  EXPECT_EQ(sol.end_state(0.3), 0.0);
}

TEST(Recovery, CMatrixShapesAndIndependentEntries)
{
  const auto nte = build_auxiliary(solver_for(ModelKind::nte, 8, 0.0));
  EXPECT_EQ(nte.C.rows(), 1);
  EXPECT_EQ(nte.C.cols(), 1);

  const double u = 0.5;
  const auto s = solver_for(ModelKind::bgk, 12, u);
  const auto aux = build_auxiliary(s);
  const auto& dec = s->system().damped_op.decomposition;
  ASSERT_EQ(aux.C.rows(), 2);
  std::vector<const NullMode*> modes;
  for (const auto& m : dec.plus) modes.push_back(&m);
  std::vector<const DampedSolution*> gs;
  for (const auto& g : aux.g_plus) gs.push_back(&g);
  for (const auto& g : aux.g_zero) gs.push_back(&g);
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = 0; b < gs.size(); ++b) {
      const double ref = oracle::rule_integral(ModelKind::bgk, u, [&](double v) {
        return (v + u) * modes[a]->X(v) * evaluate_solution(*gs[b], 0.0, v);
      });
      EXPECT_NEAR(aux.C(a, b), ref, 1e-11) << a << "," << b;
    }
  EXPECT_LT(aux.condition_estimate, max_C_condition);

  const auto u0 = build_auxiliary(solver_for(ModelKind::bgk, 8, 0.0));
  EXPECT_EQ(u0.C.rows(), 2);
  EXPECT_EQ(u0.g_plus.size(), 1u);
  EXPECT_EQ(u0.g_zero.size(), 1u);
}

TEST(Recovery, CorrectedMomentsVanish)
{
  // the null modes are only approximately in the span away from u = 0, so the
  // larger shifts need a higher order to reach the same level
  for (double u : {-0.5, 0.0, 0.5, -c, c, 2.0}) {
    const int N = std::abs(u) <= 0.5 ? 16 : 36;
    const auto sol = solve(ModelKind::bgk, N, u, make_incoming(ModelKind::bgk, "v_cubed"));
    EXPECT_LT(sol.corrected_moments(0.0).cwiseAbs().maxCoeff(), 1e-9) << u;
    // every flux-moment family of f - g vanishes at every x
    for (double x : {0.0, 0.5, 1.0, 5.0}) {
      const Eigen::VectorXd U =
          flux_moments(sol.damped.system().flux, sol.galerkin_coefficients(x)).stacked();
      EXPECT_LT(U.cwiseAbs().maxCoeff(), 1e-8) << u << " x=" << x;
    }
  }
}

TEST(Recovery, FluxMomentsConserved)
{
  const double u = 0.5;
  const auto sol = solve(ModelKind::bgk, 16, u, make_incoming(ModelKind::bgk, "v_cubed"));
  const auto& flux = sol.damped.system().flux;
  const Eigen::VectorXd U0 = flux_moments(flux, sol.coefficients(0.0)).stacked();
  for (double x : {0.5, 1.0, 5.0}) {
    const Eigen::VectorXd Ux = flux_moments(flux, sol.coefficients(x)).stacked();
    EXPECT_LT((Ux - U0).cwiseAbs().maxCoeff(), 1e-8) << x;
  }
  // pointwise cross-check of the first conserved moment
  const auto& X = sol.damped.system().damped_op.decomposition.plus[0].X;
  auto moment = [&](double x) {
    return oracle::rule_integral(ModelKind::bgk, u, [&](double v) {
      return (v + u) * X(v) * evaluate_recovered(sol, x, v);
    });
  };
  EXPECT_NEAR(moment(0.0), moment(1.0), 1e-8);
}

TEST(Recovery, BoundaryTrace)
{
  const auto chi = chi_modes(0.0);
  const auto sol = solve(ModelKind::bgk, 20, 0.0, incoming_from_mode("chi_zero", chi.zero));
  const auto rule = half_gauss_rule(0.0, 30);
  for (double v : rule.nodes) EXPECT_NEAR(evaluate_recovered(sol, 0.0, v), chi.zero(v), 1e-9);
}

TEST(Recovery, NteDecaysToEndState)
{
  const auto sol = solve(ModelKind::nte, 16, 0.0, make_incoming(ModelKind::nte, "v"));
  for (double v : {-1.0, -0.4, 0.0, 0.6, 1.0})
    EXPECT_NEAR(evaluate_recovered(sol, 50.0, v), sol.end_state(v), 1e-10);
  EXPECT_THROW(evaluate_recovered(sol, -0.1, 0.2), OutOfDomain);
}

TEST(Recovery, AuxiliaryOrderOverride)
{
  const auto chi = chi_modes(0.0);
  const auto phi = incoming_from_mode("chi_plus", chi.plus);
  const auto main = solver_for(ModelKind::bgk, 12, 0.0);
  const auto fine = std::make_shared<const AuxiliarySet>(build_auxiliary(solver_for(ModelKind::bgk, 20, 0.0)));
  const auto damped = solve_damped(main, phi);
  const auto sol = recover(damped, fine);
  EXPECT_FALSE(sol.shares_basis());
  EXPECT_THROW(sol.coefficients(0.0), ConfigError);

  // pointwise evaluation follows f - sum eta g + P_N Phi term by term
  const Eigen::VectorXd& p = sol.phi_projection;
  for (double x : {0.0, 0.8})
    for (double v : {-1.5, 0.3, 2.0}) {
      double expect = evaluate_solution(damped, x, v);
      for (std::size_t i = 0; i < fine->g_plus.size(); ++i)
        expect -= sol.eta[static_cast<Eigen::Index>(i)] * evaluate_solution(fine->g_plus[i], x, v);
      for (std::size_t i = 0; i < fine->g_zero.size(); ++i)
        expect -= sol.eta[static_cast<Eigen::Index>(fine->g_plus.size() + i)] *
                  evaluate_solution(fine->g_zero[i], x, v);
      expect += eval_expansion(damped.system().basis, {p.data(), static_cast<std::size_t>(p.size())}, v);
      EXPECT_NEAR(evaluate_recovered(sol, x, v), expect, 1e-13);
    }
  // mixing orders leaves the Galerkin error of the main damped solve in f - g
  EXPECT_LT(l2_error(sol, 0.0, [&](double v) { return chi.plus(v); }), 1e-1);

  const auto other = std::make_shared<const AuxiliarySet>(build_auxiliary(solver_for(ModelKind::bgk, 12, 0.5)));
  EXPECT_THROW(recover(damped, other), ModelMismatch);
}

TEST(AuxiliaryCacheFile, RoundTrip)
{
  TempDir dir;
  const AuxiliaryCache cache(dir.path);
  const auto s = solver_for(ModelKind::bgk, 10, 0.5);
  const auto first = build_auxiliary(s, &cache);
  EXPECT_FALSE(first.from_cache);
  const auto key = AuxiliaryCache::config_key(*s);
  EXPECT_TRUE(fs::exists(cache.path_for(key)));
  EXPECT_EQ(cache.path_for(key).filename().string().substr(0, 7), "aux-v1-");
  const auto second = build_auxiliary(s, &cache);
  EXPECT_TRUE(second.from_cache);
  EXPECT_TRUE(first.C == second.C);
  for (std::size_t i = 0; i < first.g_plus.size(); ++i)
    EXPECT_TRUE(first.g_plus[i].a0 == second.g_plus[i].a0);
}

TEST(AuxiliaryCacheFile, CorruptOrMismatchedFilesAreIgnored)
{
  TempDir dir;
  const AuxiliaryCache cache(dir.path);
  const auto s = solver_for(ModelKind::nte, 8, 0.0);
  const auto key = AuxiliaryCache::config_key(*s);
  fs::create_directories(dir.path);
  {
    std::ofstream(cache.path_for(key)) << "{ not json";
  }
  EXPECT_FALSE(cache.load(key).has_value());
  const auto aux = build_auxiliary(s, &cache);
  EXPECT_FALSE(aux.from_cache);
  EXPECT_TRUE(cache.load(key).has_value());
  // a file whose recorded configuration differs is rejected
  const auto other = AuxiliaryCache::config_key(*solver_for(ModelKind::nte, 9, 0.0));
  fs::copy_file(cache.path_for(key), cache.path_for(other), fs::copy_options::overwrite_existing);
  EXPECT_FALSE(cache.load(other).has_value());
}

TEST(AuxiliaryCacheFile, KeysAndEnvironment)
{
  const auto a = AuxiliaryCache::config_key(*solver_for(ModelKind::bgk, 8, 0.5));
  const auto b = AuxiliaryCache::config_key(*solver_for(ModelKind::bgk, 8, 0.25));
  EXPECT_NE(a, b);
  EXPECT_NE(AuxiliaryCache::hash(a), AuxiliaryCache::hash(b));
  EXPECT_EQ(AuxiliaryCache::hash(a).size(), 16u);
  EXPECT_EQ(AuxiliaryCache::hash(""), "cbf29ce484222325");

  ::setenv("HALFSPACE_CACHE_DIR", "/tmp/halfspace-env-cache", 1);
  EXPECT_EQ(AuxiliaryCache::resolve_dir("fallback"), fs::path("/tmp/halfspace-env-cache"));
  ::unsetenv("HALFSPACE_CACHE_DIR");
  EXPECT_EQ(AuxiliaryCache::resolve_dir("fallback"), fs::path("fallback"));
}
