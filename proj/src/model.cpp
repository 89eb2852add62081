#include "halfspace/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "halfspace/error.hpp"

namespace halfspace {

const char* to_string(ModelKind kind)
{
  return kind == ModelKind::bgk ? "bgk" : "nte";
}

BasisKind basis_kind(ModelKind kind)
{
  return kind == ModelKind::bgk ? BasisKind::bgk_half_hermite : BasisKind::nte_legendre;
}

double WeightedPolynomial::poly(double v) const
{
  double p = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) p = p * v + *it;
  return p;
}

double WeightedPolynomial::operator()(double v) const
{
  if (model == ModelKind::nte) return std::abs(v) <= 1.0 ? poly(v) : 0.0;
  return poly(v) * std::exp(-0.5 * v * v);
}

WeightedPolynomial WeightedPolynomial::times_shifted(double u) const
{
  WeightedPolynomial out{model, std::vector<double>(coeffs.size() + 1, 0.0)};
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    out.coeffs[i] += u * coeffs[i];
    out.coeffs[i + 1] += coeffs[i];
  }
  return out;
}

WeightedPolynomial WeightedPolynomial::scaled(double factor) const
{
  WeightedPolynomial out = *this;
  for (double& c : out.coeffs) c *= factor;
  return out;
}

namespace {

// \int v^k e^{-v^2} dv over R, or \int_{-1}^1 v^k dv
double monomial_moment(ModelKind model, int k)
{
  if (k % 2 == 1) return 0.0;
  if (model == ModelKind::nte) return 2.0 / (k + 1);
  return std::tgamma(0.5 * (k + 1));
}

}  // namespace

double inner(const WeightedPolynomial& f, const WeightedPolynomial& g)
{
  double sum = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i)
    for (std::size_t j = 0; j < g.coeffs.size(); ++j)
      sum += f.coeffs[i] * g.coeffs[j] * monomial_moment(f.model, static_cast<int>(i + j));
  return sum;
}

double flux_inner(const WeightedPolynomial& f, const WeightedPolynomial& g, double u)
{
  return inner(f.times_shifted(u), g);
}

Eigen::VectorXd KineticModel::sample(const WeightedPolynomial& f, const VelocityGrid& grid) const
{
  Eigen::VectorXd out(grid.nodes.size());
  for (Eigen::Index i = 0; i < grid.nodes.size(); ++i) out[i] = f(grid.nodes[i]);
  return out;
}

Eigen::VectorXd KineticModel::apply_L(const VelocityGrid& grid, const Eigen::VectorXd& f) const
{
  Eigen::VectorXd out = f;
  for (const auto& chi : orthonormal_null_basis) {
    const Eigen::VectorXd c = sample(chi, grid);
    out -= grid.inner(c, f) * c;
  }
  return out;
}

ChiModes chi_modes(double /*u*/)
{
  // the modes are u-independent; only their flux eigenvalues u, u +- c move
  const double k = 1.0 / (std::sqrt(6.0) * std::pow(std::numbers::pi, 0.25));
  const double r6 = std::sqrt(6.0);
  ChiModes chi;
  chi.zero = {ModelKind::bgk, {-3.0 * k, 0.0, 2.0 * k}};
  chi.plus = {ModelKind::bgk, {0.0, r6 * k, 2.0 * k}};
  chi.minus = {ModelKind::bgk, {0.0, r6 * k, -2.0 * k}};
  return chi;
}

KineticModel make_model(ModelKind name)
{
  KineticModel model;
  model.name = name;
  if (name == ModelKind::bgk) {
    const double inf = std::numeric_limits<double>::infinity();
    model.velocity_domain = {-inf, inf};
    const double q = std::pow(std::numbers::pi, -0.25);  // sqrt(M) = pi^{-1/4} e^{-v^2/2}
    model.null_basis = {{name, {q}}, {name, {0.0, q}}, {name, {0.0, 0.0, q}}};
    const auto chi = chi_modes(0.0);
    model.orthonormal_null_basis = {chi.plus, chi.zero, chi.minus};
    model.sound_speed = std::sqrt(1.5);
  } else {
    model.velocity_domain = {-1.0, 1.0};
    model.null_basis = {{name, {std::numbers::sqrt2 / 2.0}}};
    model.orthonormal_null_basis = model.null_basis;
    model.sound_speed = std::numeric_limits<double>::quiet_NaN();
  }
  return model;
}

VelocityGrid make_velocity_grid(ModelKind model, double u, int points_per_panel,
                                double panel_width)
{
  std::vector<double> breaks;
  if (model == ModelKind::nte) {
    breaks = {-1.0, 0.0, 1.0};
  } else {
    const double lo = std::min(0.0, -u) - 12.0;
    const double hi = std::max(0.0, -u) + 12.0;
    breaks = {lo, 0.0, -u, hi};
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  }

  const QuadratureRule gl = legendre01_rule(points_per_panel);
  std::vector<double> nodes, weights;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double length = breaks[b + 1] - breaks[b];
    const int panels = std::max(1, static_cast<int>(std::ceil(length / panel_width)));
    const double h = length / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = breaks[b] + p * h;
      for (std::size_t q = 0; q < gl.size(); ++q) {
        nodes.push_back(a + h * gl.nodes[q]);
        weights.push_back(h * gl.weights[q]);
      }
    }
  }
  VelocityGrid grid;
  grid.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
  grid.weights =
      Eigen::Map<Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  return grid;
}

NullSpaceDecomposition null_space_decomposition(const KineticModel& model, double u,
                                                double tol_null)
{
  if (!(tol_null > 0.0)) throw ConfigError("tol_null must be positive");
  NullSpaceDecomposition out;
  out.u = u;

  std::vector<NullMode> modes;
  if (model.name == ModelKind::nte) {
    if (u != 0.0) throw UnsupportedShift(u);
    modes.push_back({"x_zero", model.orthonormal_null_basis.front(), 0.0});
  } else {
    const auto chi = chi_modes(u);
    modes.push_back({"chi_plus", chi.plus, 0.0});
    modes.push_back({"chi_zero", chi.zero, 0.0});
    modes.push_back({"chi_minus", chi.minus, 0.0});
  }

  double scale = 0.0;
  for (auto& m : modes) {
    m.gamma = flux_inner(m.X, m.X, u);
    scale = std::max(scale, std::abs(m.gamma));
  }
  // for NTE every gamma is zero; fall back to an absolute tolerance
  out.tol = tol_null * (scale > 0.0 ? scale : 1.0);

  for (auto& m : modes) {
    const double g = std::abs(m.gamma);
    if (g > out.tol && g < 10.0 * out.tol) throw AmbiguousClassification(m.gamma, out.tol);
    if (g <= out.tol) {
      m.gamma = 0.0;
      out.zero.push_back(m);
    } else if (m.gamma > 0.0) {
      out.plus.push_back(m);
    } else {
      out.minus.push_back(m);
    }
  }

  // L acts as the identity on Null(L)^perp, so L^{-1}((v+u)X_0) = (v+u)X_0
  // once (v+u)X_0 is verified orthogonal to the null space.
  for (const auto& z : out.zero) {
    const WeightedPolynomial flux = z.X.times_shifted(u);
    for (const auto& n : model.orthonormal_null_basis) {
      if (std::abs(inner(flux, n)) > 1e-12)
        throw AmbiguousClassification(inner(flux, n), 1e-12);
    }
    out.linv_images.push_back(flux);
  }
  return out;
}

std::vector<WeightedPolynomial> DampedOperator::damping_functions() const
{
  const double u = decomposition.u;
  std::vector<WeightedPolynomial> out;
  for (const auto* family : {&decomposition.plus, &decomposition.minus, &decomposition.zero})
    for (const auto& m : *family) out.push_back(m.X.times_shifted(u));
  for (const auto& image : decomposition.linv_images) out.push_back(image.times_shifted(u));
  return out;
}

Eigen::VectorXd apply_damped(const DampedOperator& op, const VelocityGrid& grid,
                             const Eigen::VectorXd& f)
{
  Eigen::VectorXd g = op.model.apply_L(grid, f);
  for (const auto& d : op.damping_functions()) {
    const Eigen::VectorXd ds = op.model.sample(d, grid);
    g += op.alpha * grid.inner(ds, f) * ds;
  }
  return g;
}

}  // namespace halfspace
