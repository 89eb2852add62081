#pragma once

#include <span>
#include <vector>

namespace halfspace {

/// Half-line Gaussian moments m_i = \int_0^\infty v^i e^{-(v-s)^2} dv, i = 0, 1, 2.
struct GaussianMoments
{
  double s;
  double m0;
  double m1;
  double m2;
};

GaussianMoments gaussian_moments(double s);

/// Closed-form m_i for i = 0..max_order via m_{i+1} = s m_i + (i/2) m_{i-1}.
std::vector<double> gaussian_moment_sequence(double s, int max_order);

enum class WeightKind {
  half_gaussian,  ///< e^{-(v-s)^2} on [0, inf)
  legendre01      ///< 1 on [0, 1]
};

enum class PrecisionMode { double_precision, extended };

/**
 * Three-term recurrence coefficients of the orthonormal polynomials B_n for a
 * weight on a half line:
 *
 *   sqrt(beta_{n+1}) B_{n+1} = (v - alpha_n) B_n - sqrt(beta_n) B_{n-1},
 *   B_0 = 1 / sqrt(m0).
 *
 * betas[0] holds m0 (Gautschi's convention), betas[n] = beta_n for n >= 1.
 */
struct RecurrenceTable
{
  WeightKind kind = WeightKind::half_gaussian;
  double shift = 0.0;
  std::vector<double> alphas;  // alpha_0 .. alpha_{n_max}
  std::vector<double> betas;   // m0, beta_1 .. beta_{n_max}
  PrecisionMode precision = PrecisionMode::extended;

  int n_max() const { return static_cast<int>(alphas.size()) - 1; }
  double m0() const { return betas[0]; }
};

/// Half-range Hermite coefficients for e^{-(v-s)^2} on [0, inf).
///
/// Uses the Christoffel-Darboux recursion
///   beta_{n+1}  = n + 1/2 + s alpha_n - alpha_n^2 - beta_n,
///   alpha_{n+1} = s - alpha_n + (1 / (2 beta_{n+1})) sum_{k<=n} alpha_k,
/// seeded with alpha_0 = m1/m0, beta_1 = m2/m0 - (m1/m0)^2. The forward
/// recursion cancels roughly one decimal digit per step, so the extended mode
/// runs it in MPFR and raises the working precision until two consecutive
/// precisions agree after rounding to double.
RecurrenceTable half_hermite_recurrence(double s, int n_max,
                                        PrecisionMode mode = PrecisionMode::extended);

/// Orthonormal shifted Legendre polynomials on [0, 1].
RecurrenceTable shifted_legendre_recurrence(int n_max);

/// B_0(v) .. B_{n_max}(v).
std::vector<double> evaluate_polys(const RecurrenceTable& table, double v, int n_max);

/// Same as above, writing B_0..B_{out.size()-1} into `out`.
void evaluate_polys(const RecurrenceTable& table, double v, std::span<double> out);

struct WeightDescriptor
{
  WeightKind kind = WeightKind::half_gaussian;
  double shift = 0.0;
  double scale = 1.0;
};

struct QuadratureRule
{
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // positive, sum = m0
  WeightDescriptor weight;

  std::size_t size() const { return nodes.size(); }
};

/// Gauss rule from the Jacobi matrix of `table` (n_points <= n_max + 1).
QuadratureRule golub_welsch(const RecurrenceTable& table, int n_points);

/// Convenience: n-point Gauss rule for e^{-(v-s)^2} on [0, inf).
QuadratureRule half_gauss_rule(double s, int n_points);

/// Convenience: n-point Gauss-Legendre rule on [0, 1].
QuadratureRule legendre01_rule(int n_points);

}  // namespace halfspace
