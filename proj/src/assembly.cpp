#include "halfspace/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "halfspace/error.hpp"

namespace halfspace {

HalfLineRules make_half_line_rules(const BasisSet& basis, int quad_points)
{
  HalfLineRules rules;
  if (basis.kind == BasisKind::nte_legendre) {
    rules.positive = legendre01_rule(quad_points);
    rules.negative = rules.positive;
    rules.prefactor = std::numbers::sqrt2 / 2.0;
  } else {
    const double u = basis.u;
    rules.positive = half_gauss_rule(0.5 * u, quad_points);
    rules.negative = half_gauss_rule(-0.5 * u, quad_points);
    rules.prefactor = std::exp(-0.25 * u * u) * std::numbers::sqrt2 / 2.0;
  }
  return rules;
}

namespace {

// sum_q w_q B_n(x_q) g(x_q) for n = 0..N
Eigen::VectorXd weighted_poly_sums(const BasisSet& basis, const QuadratureRule& rule,
                                   const std::function<double(double)>& g)
{
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(basis.N + 1);
  std::vector<double> b(basis.N + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double x = rule.nodes[q];
    evaluate_polys(basis.recurrence, x, std::span<double>(b));
    const double wg = rule.weights[q] * g(x);
    for (int n = 0; n <= basis.N; ++n) sums[n] += wg * b[n];
  }
  return sums;
}

// spread per-degree sums onto the interleaved odd/even index set
Eigen::VectorXd spread(const BasisSet& basis, const Eigen::VectorXd& by_degree, double odd_sign)
{
  Eigen::VectorXd out(basis.size());
  for (int i = 0; i < basis.size(); ++i)
    out[i] = (BasisSet::is_odd(i) ? odd_sign : 1.0) * by_degree[BasisSet::degree(i)];
  return out;
}

}  // namespace

HalfProjection project_halves(const BasisSet& basis, const HalfLineRules& rules,
                              const WeightedPolynomial& f)
{
  const double u = basis.u;
  // positive half: v = x - u; negative half: v = -x - u (odd psi pick up a sign)
  const auto pos = weighted_poly_sums(basis, rules.positive,
                                      [&](double x) { return f.poly(x - u); });
  const auto neg = weighted_poly_sums(basis, rules.negative,
                                      [&](double x) { return f.poly(-x - u); });
  HalfProjection out;
  out.positive = rules.prefactor * spread(basis, pos, 1.0);
  out.negative = rules.prefactor * spread(basis, neg, -1.0);
  return out;
}

IncomingData incoming_from_function(std::string description, std::function<double(double)> phi)
{
  IncomingData data;
  data.description = std::move(description);
  data.phi = std::move(phi);
  return data;
}

IncomingData incoming_from_mode(std::string description, WeightedPolynomial mode)
{
  IncomingData data;
  data.description = std::move(description);
  data.phi = [mode](double v) { return mode(v); };
  data.exact = std::move(mode);
  return data;
}

IncomingData make_incoming(ModelKind model, const std::string& name)
{
  if (name == "zero") return incoming_from_mode(name, {model, {0.0}});
  if (model == ModelKind::bgk) {
    const auto chi = chi_modes(0.0);
    if (name == "chi_plus") return incoming_from_mode(name, chi.plus);
    if (name == "chi_minus") return incoming_from_mode(name, chi.minus);
    if (name == "chi_zero") return incoming_from_mode(name, chi.zero);
    if (name == "v") return incoming_from_function(name, [](double v) { return v; });
    if (name == "v_cubed") return incoming_from_function(name, [](double v) { return v * v * v; });
  } else {
    if (name == "v") return incoming_from_mode(name, {model, {0.0, 1.0}});
    if (name == "v_cubed") return incoming_from_mode(name, {model, {0.0, 0.0, 0.0, 1.0}});
    if (name == "one") return incoming_from_mode(name, {model, {1.0}});
  }
  return load_incoming_table(name);
}

namespace {

struct NaturalSpline
{
  std::vector<double> x, y, m;  // m = second derivatives

  double operator()(double t) const
  {
    if (t < x.front() || t > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - x.begin(), 1), x.size() - 1);
    const double h = x[i] - x[i - 1];
    const double a = (x[i] - t) / h;
    const double b = (t - x[i - 1]) / h;
    return a * y[i - 1] + b * y[i] + ((a * a * a - a) * m[i - 1] + (b * b * b - b) * m[i]) * h * h / 6.0;
  }
};

NaturalSpline fit_spline(const std::vector<double>& x, const std::vector<double>& y)
{
  const std::size_t n = x.size();
  NaturalSpline s{x, y, std::vector<double>(n, 0.0)};
  if (n < 3) return s;
  // Thomas algorithm on the interior second derivatives
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    const double diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
    const double rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) - h0 * d[i - 1];
    c[i] = h1 / diag;
    d[i] = rhs / diag;
  }
  for (std::size_t i = n - 2; i >= 1; --i) s.m[i] = d[i] - c[i] * s.m[i + 1];
  return s;
}

}  // namespace

IncomingData incoming_from_table(const std::vector<double>& v, const std::vector<double>& phi,
                                 std::string description)
{
  if (v.size() != phi.size() || v.size() < 2)
    throw ConfigError("incoming table needs at least two (v, phi) rows");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) throw ConfigError("incoming table velocities must increase strictly");
  auto spline = std::make_shared<NaturalSpline>(fit_spline(v, phi));
  return incoming_from_function(std::move(description),
                                [spline](double t) { return (*spline)(t); });
}

IncomingData load_incoming_table(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("unknown incoming data '" + path + "' (not a builtin or readable file)");
  std::vector<double> v, phi;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double a, b;
    if (!(fields >> a >> b)) {
      if (v.empty()) continue;  // header row
      throw ConfigError("malformed row in incoming table '" + path + "': " + line);
    }
    v.push_back(a);
    phi.push_back(b);
  }
  return incoming_from_table(v, phi, path);
}

Eigen::MatrixXd assemble_A(const BasisSet& basis)
{
  const int K = basis.size();
  const auto& rec = basis.recurrence;
  // Jacobi matrix entry J_{n,m} = \int_0^\infty w B_n B_m weight dw
  auto jacobi = [&](int n, int m) {
    if (n == m) return rec.alphas[n];
    if (std::abs(n - m) == 1) return std::sqrt(rec.betas[std::max(n, m)]);
    return 0.0;
  };
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K, K);
  for (int i = 0; i < K; ++i) {
    if (!BasisSet::is_odd(i)) continue;
    for (int j = 0; j < K; ++j) {
      if (BasisSet::is_odd(j)) continue;
      const double value = jacobi(BasisSet::degree(i), BasisSet::degree(j));
      A(i, j) = value;
      A(j, i) = value;
    }
  }
  return A;
}

void check_positive_definite(const Eigen::MatrixXd& B)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success || !(smallest > 1e-12 * largest))
    throw NotPositiveDefinite(smallest);
}

Eigen::MatrixXd assemble_B(const BasisSet& basis, const DampedOperator& op,
                           const HalfLineRules& rules)
{
  const int K = basis.size();
  // <psi_k, L psi_l> = delta_kl - sum_chi <psi_k, chi><chi, psi_l>
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(K, K);
  for (const auto& chi : op.model.orthonormal_null_basis) {
    const Eigen::VectorXd p = project_halves(basis, rules, chi).total();
    B.noalias() -= p * p.transpose();
  }
  for (const auto& d : op.damping_functions()) {
    const Eigen::VectorXd q = project_halves(basis, rules, d).total();
    B.noalias() += op.alpha * (q * q.transpose());
  }
  check_positive_definite(B);
  return B;
}

Eigen::MatrixXd assemble_boundary_rows(const BasisSet& basis)
{
  // <(v+u) psi_{2k-1}, psi_{2j}> and <|v+u| psi_{2k}, psi_{2j}> both reduce to
  // the Jacobi entry J_{k-1, j-1}
  const Eigen::MatrixXd A = assemble_A(basis);
  Eigen::MatrixXd rows(basis.N, basis.size());
  for (int j = 0; j < basis.N; ++j) {
    const int even_j = 2 * j + 1;
    for (int k = 0; k < basis.size(); ++k) {
      if (BasisSet::is_odd(k)) {
        rows(j, k) = A(k, even_j);
      } else {
        // J_{deg k, j} is the flux entry between the odd partner 2*deg(k) and even_j
        rows(j, k) = A(2 * BasisSet::degree(k), even_j);
      }
    }
  }
  return rows;
}

namespace {

Eigen::VectorXd general_rhs(const BasisSet& basis, const IncomingData& phi, int points)
{
  const double u = basis.u;
  Eigen::VectorXd by_degree;
  if (basis.kind == BasisKind::nte_legendre) {
    // 2 \int_0^1 w phi(w) B_j(w) / sqrt(2) dw
    const auto rule = legendre01_rule(points);
    by_degree = std::numbers::sqrt2 *
                weighted_poly_sums(basis, rule, [&](double w) { return w * phi.phi(w); });
  } else {
    // w = sqrt(2) t: 2 sqrt(2) \int_0^\infty t phi(w - u) B_j(w) e^{-t^2} dt = 2 sum w phi B
    auto rule = half_gauss_rule(0.0, points);
    for (double& x : rule.nodes) x *= std::numbers::sqrt2;
    rule.weight.scale = std::numbers::sqrt2;
    by_degree =
        2.0 * weighted_poly_sums(basis, rule, [&](double w) { return w * phi.phi(w - u); });
  }
  Eigen::VectorXd rhs(basis.N);
  for (int j = 0; j < basis.N; ++j) rhs[j] = by_degree[j];
  return rhs;
}

}  // namespace

BoundaryData assemble_boundary(const BasisSet& basis, const HalfLineRules& rules,
                               const IncomingData& phi, const BoundaryOptions& options)
{
  BoundaryData out;
  out.rows = assemble_boundary_rows(basis);
  out.rhs.resize(basis.N);
  if (phi.exact) {
    // 2 \int_{v+u>0} (v+u) phi psi_{2j} dv, exact with the split rules
    const auto halves = project_halves(basis, rules, phi.exact->times_shifted(basis.u));
    for (int j = 0; j < basis.N; ++j) out.rhs[j] = 2.0 * halves.positive[2 * j + 1];
    out.quadrature_error = 0.0;
    return out;
  }
  const Eigen::VectorXd coarse = general_rhs(basis, phi, options.quad_points);
  out.rhs = general_rhs(basis, phi, 2 * options.quad_points);
  out.quadrature_error = (coarse - out.rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, out.rhs.cwiseAbs().maxCoeff());
  if (out.quadrature_error > options.tolerance * scale)
    throw QuadratureNotConverged(out.quadrature_error, options.tolerance * scale);
  return out;
}

FluxVectors flux_moment_vectors(const BasisSet& basis, const HalfLineRules& rules,
                                const NullSpaceDecomposition& decomposition)
{
  const double u = decomposition.u;
  auto flux_of = [&](const WeightedPolynomial& f) {
    return project_halves(basis, rules, f.times_shifted(u)).total();
  };
  FluxVectors out;
  for (const auto& m : decomposition.plus) out.plus.push_back(flux_of(m.X));
  for (const auto& m : decomposition.minus) out.minus.push_back(flux_of(m.X));
  for (const auto& m : decomposition.zero) out.zero.push_back(flux_of(m.X));
  for (const auto& image : decomposition.linv_images) out.linv.push_back(flux_of(image));
  return out;
}

Eigen::VectorXd GalerkinSystem::project(const WeightedPolynomial& f) const
{
  return project_halves(basis, rules, f).total();
}

BoundaryData GalerkinSystem::boundary(const IncomingData& phi) const
{
  return assemble_boundary(basis, rules, phi, options.boundary);
}

GalerkinSystem build_system(ModelKind model, const SystemOptions& options)
{
  GalerkinSystem sys;
  sys.options = options;
  if (sys.options.quad_points <= 0) sys.options.quad_points = default_quad_points(options.N);
  sys.basis = build_basis(basis_kind(model), options.N, options.u);
  const KineticModel km = make_model(model);
  sys.damped_op = {km, null_space_decomposition(km, options.u, options.tol_null), options.alpha};
  sys.rules = make_half_line_rules(sys.basis, sys.options.quad_points);
  sys.A = assemble_A(sys.basis);
  sys.B = assemble_B(sys.basis, sys.damped_op, sys.rules);
  sys.boundary_rows = assemble_boundary_rows(sys.basis);
  sys.flux = flux_moment_vectors(sys.basis, sys.rules, sys.damped_op.decomposition);
  return sys;
}

}  // namespace halfspace
