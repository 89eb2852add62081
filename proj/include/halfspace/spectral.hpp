#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "halfspace/assembly.hpp"

namespace halfspace {

/**
 * Generalized eigenpairs of the pencil (A, B).
 *
 * B is stored positive definite and the Galerkin ODE reads A a' = -B a. The
 * eigenvalues are reported as lambda = -mu where A eta = mu B eta, so that
 * gamma(x) = eta^T B a(x) evolves as e^{x/lambda}: lambda < 0 modes decay,
 * lambda >= 0 modes must vanish identically.
 */
struct EigenDecomposition
{
  Eigen::VectorXd lambdas;  // ascending
  Eigen::MatrixXd vectors;  // columns, eta_i^T B eta_j = delta_ij
  std::vector<int> positive;
  std::vector<int> negative;
  std::vector<int> zero;
  double tol_zero = 0.0;
};

constexpr double default_tol_zero = 1e-10;

/// Cholesky-reduced symmetric-definite solve; throws SignatureMismatch unless
/// the (positive, negative, zero) counts are (N, N, 1).
EigenDecomposition generalized_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int N,
                                   double tol_zero_rel = default_tol_zero);

/// Eigendecomposition plus the factored (constraints; boundary rows) matrix.
/// Everything here is independent of the incoming data, so one solver serves
/// the main solve and every auxiliary solve.
class DampedSolver
{
 public:
  static std::shared_ptr<const DampedSolver> create(std::shared_ptr<const GalerkinSystem> system,
                                                    double tol_zero_rel = default_tol_zero);

  const GalerkinSystem& system() const { return *system_; }
  const std::shared_ptr<const GalerkinSystem>& system_ptr() const { return system_; }
  const EigenDecomposition& eig() const { return eig_; }
  const Eigen::MatrixXd& stacked() const { return stacked_; }
  double condition_estimate() const { return condition_; }

  /// a(0) from the stacked system with one step of iterative refinement.
  Eigen::VectorXd solve_a0(const Eigen::VectorXd& boundary_rhs) const;

 private:
  DampedSolver() = default;

  std::shared_ptr<const GalerkinSystem> system_;
  EigenDecomposition eig_;
  Eigen::MatrixXd stacked_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double condition_ = 0.0;
};

constexpr double max_boundary_condition = 1e14;

/// Flux moments U = (U_+, U_-, U_0, U_{L,0}).
struct UVector
{
  Eigen::VectorXd plus;
  Eigen::VectorXd minus;
  Eigen::VectorXd zero;
  Eigen::VectorXd linv;

  Eigen::VectorXd stacked() const;
};

UVector flux_moments(const FluxVectors& flux, const Eigen::VectorXd& coefficients);

struct DampedSolution
{
  std::shared_ptr<const DampedSolver> solver;
  IncomingData incoming;
  Eigen::VectorXd a0;
  Eigen::VectorXd amplitudes;  ///< c_k = eta_k^T B a0 for k in eig.negative
  Eigen::VectorXd boundary_rhs;
  double boundary_quadrature_error = 0.0;

  const GalerkinSystem& system() const { return solver->system(); }

  /// a(x) = sum_{lambda_k < 0} c_k e^{x/lambda_k} eta_k
  Eigen::VectorXd coefficients(double x) const;
  Eigen::VectorXd derivative(double x) const;

  /// max_k |eta_k^T B a0| over lambda_k >= 0, relative to ||a0||_B
  double constraint_residual() const;
  /// ||boundary_rows a0 - rhs||_inf relative to max(1, ||rhs||_inf)
  double boundary_residual() const;
};

DampedSolution solve_damped(std::shared_ptr<const DampedSolver> solver,
                            const IncomingData& incoming);

/// Rebuilds a solution from a known a(0) (e.g. read back from a cache).
DampedSolution solution_from_a0(std::shared_ptr<const DampedSolver> solver,
                                const IncomingData& incoming, const BoundaryData& boundary,
                                Eigen::VectorXd a0);

double evaluate_solution(const DampedSolution& sol, double x, double v);

UVector solution_moments(const DampedSolution& sol, double x);

}  // namespace halfspace
