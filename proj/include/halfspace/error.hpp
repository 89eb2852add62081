#pragma once

#include <stdexcept>
#include <string>

namespace halfspace {

/// Coarse failure category, used by the CLI to pick an exit code and a
/// diagnostic label.
enum class ErrorCategory { config, assembly, eigen, singular, quadrature, domain };

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error
{
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what)
      , category_(category)
  {
  }

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// orthopoly
struct NonPositiveBeta : Error
{
  NonPositiveBeta(int n, double value);
  int index;
};

struct IndexBeyondTable : Error
{
  IndexBeyondTable(int requested, int available);
};

struct EigenFailure : Error
{
  explicit EigenFailure(const std::string& where)
      : Error(ErrorCategory::eigen, "eigensolver did not converge: " + where)
  {
  }
};

// basis / model / evaluation
struct UnsupportedShift : Error
{
  explicit UnsupportedShift(double u);
};

struct OutOfDomain : Error
{
  explicit OutOfDomain(const std::string& what)
      : Error(ErrorCategory::domain, what)
  {
  }
};

struct AsymmetricGrid : Error
{
  explicit AsymmetricGrid(const std::string& what)
      : Error(ErrorCategory::domain, what)
  {
  }
};

struct AmbiguousClassification : Error
{
  AmbiguousClassification(double gamma, double tol);
};

struct ModelMismatch : Error
{
  explicit ModelMismatch(const std::string& what)
      : Error(ErrorCategory::config, what)
  {
  }
};

// assembly
struct NotPositiveDefinite : Error
{
  explicit NotPositiveDefinite(double smallest_eigenvalue);
  double smallest_eigenvalue;
};

struct QuadratureNotConverged : Error
{
  QuadratureNotConverged(double estimate, double tol);
  double estimate;
};

// spectral / recovery
struct SignatureMismatch : Error
{
  SignatureMismatch(int positive, int negative, int zero, int N);
};

struct SingularBoundarySystem : Error
{
  explicit SingularBoundarySystem(double condition);
};

struct SingularC : Error
{
  explicit SingularC(double condition);
};

struct NotConverged : Error
{
  NotConverged(int iterations, double residual);
};

struct ConfigError : Error
{
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what)
  {
  }
};

}  // namespace halfspace
