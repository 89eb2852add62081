#include "halfspace/spectral.hpp"

#include <cmath>

#include "halfspace/error.hpp"

namespace halfspace {

EigenDecomposition generalized_eig(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int N,
                                   double tol_zero_rel)
{
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      A, B, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw EigenFailure("generalized eigenproblem (A, B)");

  const Eigen::Index K = A.rows();
  EigenDecomposition out;
  out.lambdas.resize(K);
  out.vectors.resize(K, K);
  // mu ascending -> lambda = -mu ascending after reversing
  for (Eigen::Index i = 0; i < K; ++i) {
    out.lambdas[i] = -solver.eigenvalues()[K - 1 - i];
    Eigen::VectorXd eta = solver.eigenvectors().col(K - 1 - i);
    Eigen::Index big = 0;
    eta.cwiseAbs().maxCoeff(&big);
    if (eta[big] < 0.0) eta = -eta;
    out.vectors.col(i) = eta;
  }

  const double scale = out.lambdas.cwiseAbs().maxCoeff();
  out.tol_zero = tol_zero_rel * scale;
  for (Eigen::Index i = 0; i < K; ++i) {
    const double l = out.lambdas[i];
    if (std::abs(l) <= out.tol_zero) {
      out.zero.push_back(static_cast<int>(i));
    } else if (l > 0.0) {
      out.positive.push_back(static_cast<int>(i));
    } else {
      out.negative.push_back(static_cast<int>(i));
    }
  }
  const int p = static_cast<int>(out.positive.size());
  const int n = static_cast<int>(out.negative.size());
  const int z = static_cast<int>(out.zero.size());
  if (p != N || n != N || z != 1) throw SignatureMismatch(p, n, z, N);
  return out;
}

std::shared_ptr<const DampedSolver> DampedSolver::create(
    std::shared_ptr<const GalerkinSystem> system, double tol_zero_rel)
{
  std::shared_ptr<DampedSolver> solver(new DampedSolver());
  const GalerkinSystem& sys = *system;
  solver->system_ = std::move(system);
  solver->eig_ = generalized_eig(sys.A, sys.B, sys.N(), tol_zero_rel);

  const int K = sys.size();
  const int N = sys.N();
  solver->stacked_.resize(K, K);
  int row = 0;
  // zero mode first, then the growing (lambda > 0) modes
  for (const auto* set : {&solver->eig_.zero, &solver->eig_.positive})
    for (int k : *set)
      solver->stacked_.row(row++) = (solver->eig_.vectors.col(k).transpose() * sys.B);
  solver->stacked_.bottomRows(N) = sys.boundary_rows;

  solver->lu_.compute(solver->stacked_);
  const double rcond = solver->lu_.rcond();
  solver->condition_ = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(solver->condition_ <= max_boundary_condition))
    throw SingularBoundarySystem(solver->condition_);
  return solver;
}

Eigen::VectorXd DampedSolver::solve_a0(const Eigen::VectorXd& boundary_rhs) const
{
  const int K = system_->size();
  const int N = system_->N();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
  b.tail(N) = boundary_rhs;
  Eigen::VectorXd a = lu_.solve(b);
  a += lu_.solve(b - stacked_ * a);
  return a;
}

Eigen::VectorXd UVector::stacked() const
{
  Eigen::VectorXd out(plus.size() + minus.size() + zero.size() + linv.size());
  out << plus, minus, zero, linv;
  return out;
}

UVector flux_moments(const FluxVectors& flux, const Eigen::VectorXd& a)
{
  auto dots = [&](const std::vector<Eigen::VectorXd>& vs) {
    Eigen::VectorXd out(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) out[static_cast<Eigen::Index>(i)] = vs[i].dot(a);
    return out;
  };
  return {dots(flux.plus), dots(flux.minus), dots(flux.zero), dots(flux.linv)};
}

DampedSolution solution_from_a0(std::shared_ptr<const DampedSolver> solver,
                                const IncomingData& incoming, const BoundaryData& boundary,
                                Eigen::VectorXd a0)
{
  DampedSolution sol;
  sol.boundary_rhs = boundary.rhs;
  sol.boundary_quadrature_error = boundary.quadrature_error;
  sol.a0 = std::move(a0);

  const auto& eig = solver->eig();
  const Eigen::VectorXd Ba0 = solver->system().B * sol.a0;
  sol.amplitudes.resize(static_cast<Eigen::Index>(eig.negative.size()));
  for (std::size_t i = 0; i < eig.negative.size(); ++i)
    sol.amplitudes[static_cast<Eigen::Index>(i)] = eig.vectors.col(eig.negative[i]).dot(Ba0);
  sol.incoming = incoming;
  sol.solver = std::move(solver);
  return sol;
}

DampedSolution solve_damped(std::shared_ptr<const DampedSolver> solver,
                            const IncomingData& incoming)
{
  const BoundaryData bd = solver->system().boundary(incoming);
  Eigen::VectorXd a0 = solver->solve_a0(bd.rhs);
  return solution_from_a0(std::move(solver), incoming, bd, std::move(a0));
}

Eigen::VectorXd DampedSolution::coefficients(double x) const
{
  const auto& eig = solver->eig();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(system().size());
  for (std::size_t i = 0; i < eig.negative.size(); ++i) {
    const int k = eig.negative[i];
    a += amplitudes[static_cast<Eigen::Index>(i)] * std::exp(x / eig.lambdas[k]) *
         eig.vectors.col(k);
  }
  return a;
}

Eigen::VectorXd DampedSolution::derivative(double x) const
{
  const auto& eig = solver->eig();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(system().size());
  for (std::size_t i = 0; i < eig.negative.size(); ++i) {
    const int k = eig.negative[i];
    const double l = eig.lambdas[k];
    a += amplitudes[static_cast<Eigen::Index>(i)] * std::exp(x / l) / l * eig.vectors.col(k);
  }
  return a;
}

double DampedSolution::constraint_residual() const
{
  const auto& eig = solver->eig();
  const Eigen::VectorXd Ba0 = system().B * a0;
  const double norm = std::sqrt(std::max(a0.dot(Ba0), 0.0));
  double worst = 0.0;
  for (const auto* set : {&eig.zero, &eig.positive})
    for (int k : *set) worst = std::max(worst, std::abs(eig.vectors.col(k).dot(Ba0)));
  return norm > 0.0 ? worst / norm : worst;
}

double DampedSolution::boundary_residual() const
{
  const Eigen::VectorXd r = system().boundary_rows * a0 - boundary_rhs;
  return r.cwiseAbs().maxCoeff() / std::max(1.0, boundary_rhs.cwiseAbs().maxCoeff());
}

double evaluate_solution(const DampedSolution& sol, double x, double v)
{
  const Eigen::VectorXd a = sol.coefficients(x);
  return eval_expansion(sol.system().basis, std::span<const double>(a.data(), a.size()), v);
}

UVector solution_moments(const DampedSolution& sol, double x)
{
  return flux_moments(sol.system().flux, sol.coefficients(x));
}

}  // namespace halfspace
