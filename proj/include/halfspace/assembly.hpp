#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "halfspace/basis.hpp"
#include "halfspace/model.hpp"
#include "halfspace/orthopoly.hpp"

namespace halfspace {

/// Gauss rules for the two halves v + u > 0 and v + u < 0 after the product of
/// the basis envelope and the model envelope has been combined into a single
/// Gaussian e^{-(w -+ u/2)^2} (BGK) or a unit weight on [0, 1] (NTE).
struct HalfLineRules
{
  QuadratureRule positive;
  QuadratureRule negative;
  double prefactor = 0.0;  ///< e^{-u^2/4}/sqrt(2) (BGK), 1/sqrt(2) (NTE)
};

HalfLineRules make_half_line_rules(const BasisSet& basis, int quad_points);

/// Default per-half rule size.
inline int default_quad_points(int N) { return 2 * N + 8; }

struct HalfProjection
{
  Eigen::VectorXd positive;  ///< \int_{v+u>0} f psi_k dv
  Eigen::VectorXd negative;  ///< \int_{v+u<0} f psi_k dv

  Eigen::VectorXd total() const { return positive + negative; }
};

/// <f, psi_k> for f in the model's weighted-polynomial class, split at v = -u.
HalfProjection project_halves(const BasisSet& basis, const HalfLineRules& rules,
                              const WeightedPolynomial& f);

/// Incoming boundary data phi(v), used only where v + u > 0.
struct IncomingData
{
  std::string description;
  std::optional<WeightedPolynomial> exact;  ///< set when phi is in the mode class
  std::function<double(double)> phi;

  double operator()(double v) const { return exact ? (*exact)(v) : phi(v); }
};

IncomingData incoming_from_function(std::string description, std::function<double(double)> phi);
IncomingData incoming_from_mode(std::string description, WeightedPolynomial mode);

/// Named builtins: zero, v, v_cubed, chi_plus, chi_minus, chi_zero (BGK),
/// one (NTE); anything else is read as a two-column (v, phi) table.
IncomingData make_incoming(ModelKind model, const std::string& name_or_path);

/// Natural cubic spline through tabulated (v, phi) pairs; zero outside the table.
IncomingData incoming_from_table(const std::vector<double>& v, const std::vector<double>& phi,
                                 std::string description);
IncomingData load_incoming_table(const std::string& path);

struct FluxVectors
{
  std::vector<Eigen::VectorXd> plus;   ///< <(v+u) X_{+,i}, psi_k>
  std::vector<Eigen::VectorXd> minus;  ///< <(v+u) X_{-,j}, psi_k>
  std::vector<Eigen::VectorXd> zero;   ///< <(v+u) X_{0,k}, psi_k>
  std::vector<Eigen::VectorXd> linv;   ///< <(v+u) L^{-1}((v+u) X_{0,k}), psi_k>
};

struct BoundaryData
{
  Eigen::MatrixXd rows;  ///< N x (2N+1)
  Eigen::VectorXd rhs;   ///< N
  double quadrature_error = 0.0;
};

struct BoundaryOptions
{
  int quad_points = 64;     ///< general-data rule size G (2G is used for the estimate)
  double tolerance = 1e-6;  ///< on the G/2G discrepancy, relative to max |rhs|
};

/// A_{kl} = <(v+u) psi_k, psi_l>, from the Jacobi matrix of the recurrence.
Eigen::MatrixXd assemble_A(const BasisSet& basis);

/// B_{kl} = +<psi_k, L_d psi_l> (positive definite; the ODE reads A a' = -B a).
Eigen::MatrixXd assemble_B(const BasisSet& basis, const DampedOperator& op,
                           const HalfLineRules& rules);

/// Throws NotPositiveDefinite unless B factors and its spectrum is bounded away from 0.
void check_positive_definite(const Eigen::MatrixXd& B);

Eigen::MatrixXd assemble_boundary_rows(const BasisSet& basis);

BoundaryData assemble_boundary(const BasisSet& basis, const HalfLineRules& rules,
                               const IncomingData& phi, const BoundaryOptions& options = {});

FluxVectors flux_moment_vectors(const BasisSet& basis, const HalfLineRules& rules,
                                const NullSpaceDecomposition& decomposition);

struct SystemOptions
{
  int N = 8;
  double u = 0.0;
  double alpha = default_alpha;
  int quad_points = 0;  ///< 0 selects default_quad_points(N)
  double tol_null = default_tol_null;
  BoundaryOptions boundary;
};

struct GalerkinSystem
{
  SystemOptions options;
  BasisSet basis;
  DampedOperator damped_op;
  HalfLineRules rules;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd boundary_rows;
  FluxVectors flux;

  int N() const { return basis.N; }
  int size() const { return basis.size(); }
  ModelKind model() const { return damped_op.model.name; }

  /// Coefficients of the L2 projection of f onto the basis.
  Eigen::VectorXd project(const WeightedPolynomial& f) const;
  BoundaryData boundary(const IncomingData& phi) const;
};

GalerkinSystem build_system(ModelKind model, const SystemOptions& options);

}  // namespace halfspace
