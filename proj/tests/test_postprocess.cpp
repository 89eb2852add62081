#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "halfspace/error.hpp"
#include "halfspace/postprocess.hpp"

using namespace halfspace;

namespace {

struct TableRow
{
  int order;
  double length;
};

const TableRow table1[] = {
    {4, 0.709324539775964},  {8, 0.710386430787361},  {12, 0.710434523809144},
    {16, 0.710442451548528}, {20, 0.710444603305304}, {24, 0.710445373807707},
    {28, 0.710445703544666}, {32, 0.710445863417934}, {36, 0.710445948444682},
    {40, 0.710445997010591},
};

RecoveredSolution recovered(ModelKind model, int N, double u, const IncomingData& phi)
{
  SystemOptions o;
  o.N = N;
  o.u = u;
  const auto s = DampedSolver::create(std::make_shared<const GalerkinSystem>(build_system(model, o)));
  return recover(solve_damped(s, phi), std::make_shared<const AuxiliarySet>(build_auxiliary(s)));
}

std::vector<ProfilePoint> read_profile(const std::filesystem::path& path)
{
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<ProfilePoint> out;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    ProfilePoint p{};
    if (fields >> p.v >> p.f) out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Filter, Properties)
{
  const int N = 10;
  const Eigen::VectorXd none = filter_factors(N, {});
  EXPECT_TRUE(none.isOnes());
  const FilterSpec cosine{FilterKind::cosine, 2};
  const Eigen::VectorXd s = filter_factors(N, cosine);
  ASSERT_EQ(s.size(), 2 * N + 1);
  EXPECT_EQ(s[0], 1.0);
  EXPECT_EQ(s[1], 1.0);
  for (int k = 0; k < s.size(); ++k) {
    EXPECT_GE(s[k], 0.0);
    EXPECT_LE(s[k], 1.0);
    const double theta = BasisSet::degree(k) / (N + 1.0);
    EXPECT_NEAR(s[k], std::pow(std::cos(std::numbers::pi * theta / 2.0), 2), 1e-15);
    if (k >= 2) EXPECT_LE(s[k], s[k - 2]);
  }
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(2 * N + 1, 1.0, 3.0);
  EXPECT_TRUE(apply_filter(a, {}, N) == a);
  EXPECT_TRUE(apply_filter(a, cosine, N).isApprox(a.cwiseProduct(s)));

  EXPECT_THROW((FilterSpec{FilterKind::cosine, 0}.validate()), ConfigError);
  EXPECT_EQ(parse_filter_kind("cosine"), FilterKind::cosine);
  EXPECT_EQ(std::string(to_string(FilterKind::none)), "none");
  EXPECT_THROW(parse_filter_kind("gauss"), ConfigError);
}

TEST(Extrapolation, TableValues)
{
  for (const auto& row : table1)
    EXPECT_NEAR(extrapolation_length_for_order(row.order), row.length, 1e-9) << row.order;
}

TEST(Extrapolation, MonotoneAndBetterThanCoron)
{
  double previous = 0.0;
  for (const auto& row : table1) {
    const double value = extrapolation_length_for_order(row.order);
    EXPECT_GT(value, previous);
    EXPECT_LT(value, exact_extrapolation_length);
    previous = value;
  }
  const double l12 = extrapolation_length_for_order(12);
  EXPECT_LT(std::abs(l12 - exact_extrapolation_length),
            std::abs(coron_extrapolation_length - exact_extrapolation_length));
}

TEST(Extrapolation, RequiresTransportMilneSolution)
{
  const auto bgk = recovered(ModelKind::bgk, 6, 0.0, make_incoming(ModelKind::bgk, "chi_plus"));
  EXPECT_THROW(extrapolation_length(bgk), ModelMismatch);
  const auto one = recovered(ModelKind::nte, 6, 0.0, make_incoming(ModelKind::nte, "one"));
  EXPECT_THROW(extrapolation_length(one), ModelMismatch);
  const auto v = recovered(ModelKind::nte, 3, 0.0, make_incoming(ModelKind::nte, "v"));
  EXPECT_NEAR(extrapolation_length(v), table1[0].length, 1e-9);
}

TEST(HFunction, MomentIdentities)
{
  for (int n : {64, 128}) {
    const auto H = chandrasekhar_H(n);
    EXPECT_NEAR(H.moment0(), 2.0, 5e-6) << n;
    EXPECT_NEAR(H.moment1(), 2.0 / std::sqrt(3.0), 5e-6) << n;
    EXPECT_LT(H.iteration_residual, 1e-10);
    for (int i = 0; i < H.H_values.size(); ++i) {
      EXPECT_GE(H.H_values[i], 1.0);
      if (i) EXPECT_GE(H.H_values[i], H.H_values[i - 1]);
    }
    EXPECT_NEAR(H.at(0.0), 1.0, 1e-12);
    EXPECT_NEAR(H.at(H.mu_grid[0]), 1.0, 0.05);
  }
  const auto a = chandrasekhar_H(64);
  const auto b = chandrasekhar_H(128);
  for (double mu : {0.1, 0.5, 1.0}) EXPECT_NEAR(a.at(mu), b.at(mu), 1e-6);
  EXPECT_NEAR(a.at(1.0), 2.907811, 1e-5);
}

TEST(HFunction, NotConverged)
{
  EXPECT_THROW(chandrasekhar_H(32, 1e-14, 3), NotConverged);
}

TEST(Profile, MilneBoundaryTraceMatchesHFunction)
{
  const auto sol = recovered(ModelKind::nte, 36, 0.0, make_incoming(ModelKind::nte, "v"));
  const auto H = chandrasekhar_H();
  std::vector<double> mus;
  for (int i = 0; i <= 95; ++i) mus.push_back(0.05 + 0.01 * i);
  std::vector<double> grid;
  for (double mu : mus) grid.push_back(-mu);
  const auto profile = sample_profile(sol, 0.0, grid, {FilterKind::cosine, 2});
  double worst = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i)
    worst = std::max(worst, std::abs(profile[i].f - (H.at(mus[i]) / std::sqrt(3.0) - mus[i])));
  EXPECT_LT(worst, 5e-3);
}

TEST(Profile, FilterReducesOscillationNearZero)
{
  const auto sol = recovered(ModelKind::nte, 36, 0.0, make_incoming(ModelKind::nte, "v"));
  const auto grid = linspace(-0.2, 0.2, 201);
  auto variation = [](const std::vector<ProfilePoint>& p) {
    double tv = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) tv += std::abs(p[i].f - p[i - 1].f);
    return tv;
  };
  const double raw = variation(sample_profile(sol, 0.0, grid));
  const double filtered = variation(sample_profile(sol, 0.0, grid, {FilterKind::cosine, 2}));
  EXPECT_LT(filtered, raw);
}

TEST(Profile, GoldenFilteredMilneProfile)
{
  const auto golden = read_profile(std::filesystem::path(HALFSPACE_GOLDEN_DIR) / "nte_milne_N36_cosine2_x0.csv");
  ASSERT_EQ(golden.size(), 201u);
  const auto sol = recovered(ModelKind::nte, 36, 0.0, make_incoming(ModelKind::nte, "v"));
  std::vector<double> grid;
  for (const auto& p : golden) grid.push_back(p.v);
  const auto profile = sample_profile(sol, 0.0, grid, {FilterKind::cosine, 2});
  for (std::size_t i = 0; i < golden.size(); ++i)
    EXPECT_NEAR(profile[i].f, golden[i].f, 1e-10) << golden[i].v;
}

TEST(Profile, ExactModeAndZero)
{
  const auto chi = chi_modes(0.0);
  const auto sol = recovered(ModelKind::bgk, 20, 0.0, incoming_from_mode("chi_plus", chi.plus));
  for (const auto& p : sample_profile(sol, 0.0, linspace(-4.0, 4.0, 81)))
    EXPECT_NEAR(p.f, chi.plus(p.v), 1e-8);

  const auto zero = recovered(ModelKind::bgk, 6, 0.5, make_incoming(ModelKind::bgk, "zero"));
  for (const auto& p : sample_profile(zero, 1.0, {-1.0, 0.0, 1.0})) EXPECT_EQ(p.f, 0.0);

  const auto nte = recovered(ModelKind::nte, 4, 0.0, make_incoming(ModelKind::nte, "v"));
  EXPECT_THROW(sample_profile(nte, 0.0, {0.0, 2.0}), OutOfDomain);
}

TEST(Profile, CsvAndLinspace)
{
  const auto g = linspace(-1.0, 1.0, 5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(g[2], 0.0);
  const std::string csv = profile_csv({{0.5, 0.25}, {1.0, -1.0}});
  EXPECT_EQ(csv.substr(0, 4), "v,f\n");
  EXPECT_NE(csv.find("0.5,0.25"), std::string::npos);
}
