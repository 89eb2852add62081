#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "halfspace/basis.hpp"

namespace halfspace {

enum class ModelKind { bgk, nte };

const char* to_string(ModelKind kind);
BasisKind basis_kind(ModelKind kind);

/// p(v) * e^{-v^2/2} for BGK, p(v) on [-1, 1] for the transport model.
/// Every null-space mode and damping function of both models has this form.
struct WeightedPolynomial
{
  ModelKind model = ModelKind::bgk;
  std::vector<double> coeffs;  // monomial coefficients in v, lowest first

  double poly(double v) const;
  double operator()(double v) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  /// (v + u) * this
  WeightedPolynomial times_shifted(double u) const;
  WeightedPolynomial scaled(double factor) const;
};

/// Exact \int f g dv over the model's velocity domain.
double inner(const WeightedPolynomial& f, const WeightedPolynomial& g);

/// Exact <(v+u) f, g>.
double flux_inner(const WeightedPolynomial& f, const WeightedPolynomial& g, double u);

/// Composite Gauss-Legendre grid over the velocity domain with breakpoints at
/// 0 and -u. Used for brute-force checks of operator identities.
struct VelocityGrid
{
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  double inner(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const
  {
    return (weights.array() * f.array() * g.array()).sum();
  }
};

struct KineticModel
{
  ModelKind name = ModelKind::bgk;
  Interval velocity_domain{};
  std::vector<WeightedPolynomial> null_basis;             // spanning set
  std::vector<WeightedPolynomial> orthonormal_null_basis;  // for the projection
  double sound_speed = 0.0;                                // BGK only

  Eigen::VectorXd sample(const WeightedPolynomial& f, const VelocityGrid& grid) const;

  /// L f = f - P f on samples.
  Eigen::VectorXd apply_L(const VelocityGrid& grid, const Eigen::VectorXd& f) const;
};

KineticModel make_model(ModelKind name);

VelocityGrid make_velocity_grid(ModelKind model, double u, int points_per_panel = 16,
                                double panel_width = 0.5);

struct ChiModes
{
  WeightedPolynomial plus;
  WeightedPolynomial minus;
  WeightedPolynomial zero;
};

/// Closed-form eigenfunctions of the projected flux operator for BGK.
ChiModes chi_modes(double u);

struct NullMode
{
  std::string label;
  WeightedPolynomial X;
  double gamma = 0.0;  ///< <(v+u) X, X>
};

struct NullSpaceDecomposition
{
  double u = 0.0;
  double tol = 0.0;
  std::vector<NullMode> plus;
  std::vector<NullMode> minus;
  std::vector<NullMode> zero;
  std::vector<WeightedPolynomial> linv_images;  ///< L^{-1}((v+u) X_0) per zero mode

  int nu_plus() const { return static_cast<int>(plus.size()); }
  int nu_minus() const { return static_cast<int>(minus.size()); }
  int nu_zero() const { return static_cast<int>(zero.size()); }
};

constexpr double default_tol_null = 1e-12;

NullSpaceDecomposition null_space_decomposition(const KineticModel& model, double u,
                                                double tol_null = default_tol_null);

constexpr double default_alpha = 0.1;

/// L_d f = L f + alpha sum_d d <d, f> over the damping functions d.
struct DampedOperator
{
  KineticModel model;
  NullSpaceDecomposition decomposition;
  double alpha = default_alpha;

  /// (v+u)X for the +, -, 0 families followed by (v+u) L^{-1}((v+u)X_0).
  std::vector<WeightedPolynomial> damping_functions() const;
};

Eigen::VectorXd apply_damped(const DampedOperator& op, const VelocityGrid& grid,
                             const Eigen::VectorXd& f);

}  // namespace halfspace
