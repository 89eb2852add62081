#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "halfspace/error.hpp"
#include "halfspace/postprocess.hpp"
#include "oracles.hpp"

using namespace halfspace;
namespace fs = std::filesystem;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const double c = std::sqrt(1.5);
const double seven_u[] = {-2.0, -c, -0.5, 0.0, 0.5, c, 2.0};

std::shared_ptr<const DampedSolver> solver_for(ModelKind model, int N, double u)
{
  SystemOptions o;
  o.N = N;
  o.u = u;
  return DampedSolver::create(std::make_shared<const GalerkinSystem>(build_system(model, o)));
}

RecoveredSolution recovered(const std::shared_ptr<const DampedSolver>& s, const IncomingData& phi)
{
  return recover(solve_damped(s, phi), std::make_shared<const AuxiliarySet>(build_auxiliary(s)));
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const double table1[][2] = {
    {4, 0.709324539775964},  {8, 0.710386430787361},  {12, 0.710434523809144},
    {16, 0.710442451548528}, {20, 0.710444603305304}, {24, 0.710445373807707},
    {28, 0.710445703544666}, {32, 0.710445863417934}, {36, 0.710445948444682},
    {40, 0.710445997010591},
};

Outcome extrapolation_table()
{
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  double worst = 0.0;
  for (const auto& row : table1) {
    const double err = std::abs(extrapolation_length_for_order(static_cast<int>(row[0])) - row[1]);
    worst = std::max(worst, err);
    if (!(err <= 1e-9)) out.pass = false;
  }
  const double secs = seconds_since(t0);
  if (!(secs < 30.0)) out.pass = false;
  out.detail = "max |error| " + fmt("%.2e", worst) + " over 10 orders in " + fmt("%.2f", secs) + " s";
  return out;
}

Outcome coron_comparison()
{
  const double ours = std::abs(extrapolation_length_for_order(12) - exact_extrapolation_length);
  const double coron = std::abs(coron_extrapolation_length - exact_extrapolation_length);
  return {ours < coron, "order 12 error " + fmt("%.3e", ours) + " vs Coron " + fmt("%.3e", coron)};
}

double exact_mode_error(int N, double u, const NullMode& mode)
{
  const auto sol = recovered(solver_for(ModelKind::bgk, N, u), incoming_from_mode(mode.label, mode.X));
  return std::sqrt(oracle::rule_integral(ModelKind::bgk, u, [&](double v) {
    const double d = evaluate_recovered(sol, 0.0, v) - mode.X(v);
    return d * d;
  }));
}

Outcome exact_mode_recovery()
{
  Outcome out;
  const auto model = make_model(ModelKind::bgk);
  int failures = 0, cases = 0;
  std::string failed;
  for (double u : seven_u) {
    const auto dec = null_space_decomposition(model, u);
    std::vector<NullMode> modes = dec.plus;
    modes.insert(modes.end(), dec.zero.begin(), dec.zero.end());
    for (const auto& m : modes) {
      ++cases;
      bool ok;
      std::string line;
      if (u == 0.0) {
        const double e20 = exact_mode_error(20, u, m);
        ok = e20 < 1e-8;
        line = "N=20 " + fmt("%.1e", e20);
      } else {
        const double e18 = exact_mode_error(18, u, m);
        const double e36 = exact_mode_error(36, u, m);
        ok = e36 < 1e-4 && e18 / e36 > 100.0;
        line = "N=18 " + fmt("%.1e", e18) + " N=36 " + fmt("%.1e", e36) + " ratio " +
               fmt("%.2g", e18 / e36);
      }
      std::printf("    u=%-+.4f %-9s %s%s\n", u, m.label.c_str(), line.c_str(), ok ? "" : "  <- fails");
      if (!ok) {
        ++failures;
        failed += (failed.empty() ? "" : ", ") + fmt("u=%.3g ", u) + m.label;
      }
    }
  }
  out.pass = failures == 0;
  out.detail = std::to_string(cases - failures) + "/" + std::to_string(cases) + " cases";
  if (failures) out.detail += "; failing: " + failed;
  return out;
}

Outcome eigen_signature()
{
  int checked = 0, bad = 0;
  auto check = [&](ModelKind model, int N, double u) {
    ++checked;
    try {
      const auto s = solver_for(model, N, u);
      const auto& e = s->eig();
      if (static_cast<int>(e.positive.size()) != N || static_cast<int>(e.negative.size()) != N ||
          e.zero.size() != 1)
        ++bad;
    } catch (const Error&) {
      ++bad;
    }
  };
  for (int N : {4, 8, 16}) {
    for (double u : seven_u) check(ModelKind::bgk, N, u);
    check(ModelKind::nte, N, 0.0);
  }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " systems with (N, N, 1)"};
}

Outcome h_function_cross_check()
{
  const auto H = chandrasekhar_H();
  const double m0 = std::abs(H.moment0() - 2.0);
  const double m1 = std::abs(H.moment1() - 2.0 / std::sqrt(3.0));
  const auto sol = recovered(solver_for(ModelKind::nte, 36, 0.0), make_incoming(ModelKind::nte, "v"));
  std::vector<double> mus, grid;
  for (int i = 0; i <= 950; ++i) {
    mus.push_back(0.05 + 0.001 * i);
    grid.push_back(-mus.back());
  }
  const auto profile = sample_profile(sol, 0.0, grid, {FilterKind::cosine, 2});
  double worst = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i)
    worst = std::max(worst, std::abs(profile[i].f - (H.at(mus[i]) / std::sqrt(3.0) - mus[i])));
  return {worst < 5e-3 && m0 < 5e-6 && m1 < 5e-6,
          "max deviation " + fmt("%.2e", worst) + ", H moment errors " + fmt("%.1e", m0) + " / " +
              fmt("%.1e", m1)};
}

Outcome property_suites()
{
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> failed;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };

  // basis orthonormality against the oracle panel rule
  double gram = 0.0;
  for (int N : {5, 10, 20}) {
    for (double u : seven_u) {
      const auto basis = build_basis(BasisKind::bgk_half_hermite, N, u);
      const auto rule = oracle::velocity_rule(ModelKind::bgk, u);
      Eigen::MatrixXd G = Eigen::MatrixXd::Zero(basis.size(), basis.size());
      for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
        const auto psi = eval_basis(basis, rule.nodes[q]);
        const Eigen::Map<const Eigen::VectorXd> p(psi.data(), basis.size());
        G += rule.weights[q] * p * p.transpose();
      }
      gram = std::max(gram, (G - Eigen::MatrixXd::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff());
    }
  }
  require(gram <= 1e-11, "orthonormality " + fmt("%.1e", gram));

  // A symmetric and independent of u
  const Eigen::MatrixXd A0 = assemble_A(build_basis(BasisKind::bgk_half_hermite, 20, 0.0));
  double a_err = 0.0;
  for (double u : seven_u) {
    const Eigen::MatrixXd A = assemble_A(build_basis(BasisKind::bgk_half_hermite, 20, u));
    a_err = std::max({a_err, (A - A.transpose()).cwiseAbs().maxCoeff(), (A - A0).cwiseAbs().maxCoeff()});
  }
  require(a_err <= 1e-13, "A symmetry/u-independence " + fmt("%.1e", a_err));

  // B factors at the default damping for every case
  int chol_fail = 0;
  for (int N : {4, 12, 20, 28, 40}) {
    for (double u : seven_u) {
      try {
        const auto s = solver_for(ModelKind::bgk, N, u);
        if (Eigen::LLT<Eigen::MatrixXd>(s->system().B).info() != Eigen::Success) ++chol_fail;
      } catch (const Error&) {
        ++chol_fail;
      }
    }
  }
  require(chol_fail == 0, std::to_string(chol_fail) + " Cholesky failures");

  // damped residuals, conservation and the defining property of eta
  double residual = 0.0, drift = 0.0, corrected = 0.0;
  for (double u : seven_u) {
    const int N = std::abs(u) <= 0.5 ? 16 : 36;
    const auto s = solver_for(ModelKind::bgk, N, u);
    for (const std::string name : {"chi_plus", "chi_zero", "v_cubed"}) {
      const auto sol = recovered(s, make_incoming(ModelKind::bgk, name));
      residual = std::max({residual, sol.damped.constraint_residual(), sol.damped.boundary_residual()});
      const auto& flux = s->system().flux;
      const Eigen::VectorXd U0 = flux_moments(flux, sol.coefficients(0.0)).stacked();
      for (double x : {0.5, 1.0, 5.0})
        drift = std::max(drift, (flux_moments(flux, sol.coefficients(x)).stacked() - U0).cwiseAbs().maxCoeff());
      if (sol.eta.size()) corrected = std::max(corrected, sol.corrected_moments(0.0).cwiseAbs().maxCoeff());
    }
  }
  const auto nte = recovered(solver_for(ModelKind::nte, 20, 0.0), make_incoming(ModelKind::nte, "v"));
  residual = std::max({residual, nte.damped.constraint_residual(), nte.damped.boundary_residual()});
  corrected = std::max(corrected, nte.corrected_moments(0.0).cwiseAbs().maxCoeff());
  require(residual <= 1e-9, "damped residual " + fmt("%.1e", residual));
  require(drift <= 1e-8, "conservation drift " + fmt("%.1e", drift));
  require(corrected <= 1e-9, "U(f - g) at x = 0 " + fmt("%.1e", corrected));

  const double secs = seconds_since(t0);
  require(secs < 60.0, "runtime " + fmt("%.1f", secs) + " s");

  Outcome out;
  out.pass = failed.empty();
  out.detail = "orthonormality " + fmt("%.1e", gram) + ", A " + fmt("%.1e", a_err) + ", residual " +
               fmt("%.1e", residual) + ", drift " + fmt("%.1e", drift) + ", U(f-g) " +
               fmt("%.1e", corrected) + ", " + fmt("%.2f", secs) + " s";
  for (const auto& f : failed) out.detail += "; failed: " + f;
  return out;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism()
{
  const fs::path root = fs::temp_directory_path() / "halfspace-acceptance-determinism";
  fs::remove_all(root);
  int configs = 0, files = 0, mismatches = 0;
  std::string problems;
  for (const auto& entry : fs::directory_iterator(HALFSPACE_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    ++configs;
    const auto stem = entry.path().stem().string();
    for (const char* run : {"a", "b"}) {
      const std::string cmd = std::string(HALFSPACE_CLI_PATH) + " solve -c " + entry.path().string() +
                              " -o " + (root / stem / run).string() + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        ++mismatches;
        problems += " " + stem + " exited abnormally;";
      }
    }
    if (!fs::exists(root / stem / "a")) continue;
    for (const auto& out : fs::directory_iterator(root / stem / "a")) {
      const auto ext = out.path().extension();
      if (ext != ".csv" && ext != ".json") continue;
      ++files;
      if (slurp(out.path()) != slurp(root / stem / "b" / out.path().filename())) {
        ++mismatches;
        problems += " " + stem + "/" + out.path().filename().string() + " differs;";
      }
    }
  }
  fs::remove_all(root);
  return {configs > 0 && mismatches == 0,
          std::to_string(configs) + " configs, " + std::to_string(files) + " CSV/JSON files compared" +
              (problems.empty() ? "" : ";" + problems)};
}

struct Criterion
{
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<Criterion> criteria = {
      {1, "extrapolation-length table", extrapolation_table},
      {2, "Coron comparison", coron_comparison},
      {3, "exact-mode recovery", exact_mode_recovery},
      {4, "eigenvalue signature", eigen_signature},
      {5, "H-function cross-check", h_function_cross_check},
      {6, "property suites", property_suites},
      {7, "determinism", determinism},
  };

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion 1..7]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be between 1 and %zu\n", criteria.size());
    return 2;
  }

  int failures = 0;
  for (const auto& c : criteria) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
