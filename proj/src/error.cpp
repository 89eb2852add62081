#include "halfspace/error.hpp"

#include <cstdio>

namespace halfspace {

namespace {

std::string fmt_g(double value)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

}  // namespace

const char* to_string(ErrorCategory category)
{
  switch (category) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::assembly: return "assembly";
    case ErrorCategory::eigen: return "eigen";
    case ErrorCategory::singular: return "singular";
    case ErrorCategory::quadrature: return "quadrature";
    case ErrorCategory::domain: return "domain";
  }
  return "unknown";
}

NonPositiveBeta::NonPositiveBeta(int n, double value)
    : Error(ErrorCategory::quadrature,
            "recurrence coefficient beta_" + std::to_string(n) + " = " + fmt_g(value) +
                " is not positive; lower n_max or use extended precision")
    , index(n)
{
}

IndexBeyondTable::IndexBeyondTable(int requested, int available)
    : Error(ErrorCategory::quadrature, "polynomial degree " + std::to_string(requested) +
                                           " exceeds recurrence table length " +
                                           std::to_string(available))
{
}

UnsupportedShift::UnsupportedShift(double u)
    : Error(ErrorCategory::config,
            "neutron transport requires u = 0 (got u = " + fmt_g(u) + ")")
{
}

AmbiguousClassification::AmbiguousClassification(double gamma, double tol)
    : Error(ErrorCategory::config, "flux eigenvalue " + fmt_g(gamma) +
                                       " is too close to zero for a reliable sign decision (tol " +
                                       fmt_g(tol) + ")")
{
}

NotPositiveDefinite::NotPositiveDefinite(double smallest)
    : Error(ErrorCategory::assembly,
            "B is not positive definite (smallest eigenvalue " + fmt_g(smallest) + ")")
    , smallest_eigenvalue(smallest)
{
}

QuadratureNotConverged::QuadratureNotConverged(double est, double tol)
    : Error(ErrorCategory::quadrature, "boundary quadrature G/2G discrepancy " + fmt_g(est) +
                                           " exceeds tolerance " + fmt_g(tol))
    , estimate(est)
{
}

SignatureMismatch::SignatureMismatch(int positive, int negative, int zero, int N)
    : Error(ErrorCategory::eigen, "generalized eigenvalue signature (" + std::to_string(positive) +
                                      ", " + std::to_string(negative) + ", " +
                                      std::to_string(zero) + ") differs from (" +
                                      std::to_string(N) + ", " + std::to_string(N) + ", 1)")
{
}

SingularBoundarySystem::SingularBoundarySystem(double condition)
    : Error(ErrorCategory::singular,
            "constraint/boundary system is numerically singular (condition estimate " +
                fmt_g(condition) + ")")
{
}

SingularC::SingularC(double condition)
    : Error(ErrorCategory::singular,
            "recovery matrix C is numerically singular (condition estimate " + fmt_g(condition) +
                ")")
{
}

NotConverged::NotConverged(int iterations, double residual)
    : Error(ErrorCategory::quadrature, "H-function iteration did not converge after " +
                                           std::to_string(iterations) + " iterations (residual " +
                                           fmt_g(residual) + ")")
{
}

}  // namespace halfspace
