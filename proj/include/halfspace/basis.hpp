#pragma once

#include <span>
#include <vector>

#include "halfspace/orthopoly.hpp"

namespace halfspace {

enum class BasisKind { bgk_half_hermite, nte_legendre };

struct Interval
{
  double lower;
  double upper;
  bool contains(double v) const { return v >= lower && v <= upper; }
};

/**
 * Even/odd extensions about v = -u of the half-range orthonormal polynomials:
 *
 *   psi_{2n-1}(v) = sgn(v+u) B_{n-1}(|v+u|) w(|v+u|) / sqrt(2)     (odd)
 *   psi_{2n}(v)   =          B_{n-1}(|v+u|) w(|v+u|) / sqrt(2)     (even)
 *
 * with w(r) = e^{-r^2/2} for BGK (B_n half-range Hermite) and w = 1 for the
 * transport model (B_n shifted Legendre on [0,1], u = 0). Index i = k - 1 is
 * used throughout the code: even i are the odd functions.
 */
struct BasisSet
{
  BasisKind kind = BasisKind::bgk_half_hermite;
  int N = 0;
  double u = 0.0;
  RecurrenceTable recurrence;
  Interval velocity_domain{};

  int size() const { return 2 * N + 1; }

  /// Degree of the half-range polynomial underlying psi_{i+1}.
  static int degree(int i) { return i / 2; }
  static bool is_odd(int i) { return i % 2 == 0; }
};

BasisSet build_basis(BasisKind kind, int N, double u);

/// [psi_1(v), ..., psi_{2N+1}(v)].
std::vector<double> eval_basis(const BasisSet& basis, double v);
void eval_basis(const BasisSet& basis, double v, std::span<double> out);

/// Coefficient-weighted sum sum_k c_k psi_k(v).
double eval_expansion(const BasisSet& basis, std::span<const double> coefficients, double v);

/// Even/odd parts about -u of a function sampled on a reflection-closed grid.
struct ParityPair
{
  double u = 0.0;
  std::vector<double> grid;
  std::vector<double> even_part;
  std::vector<double> odd_part;
};

ParityPair parity_decompose(std::span<const double> grid, std::span<const double> samples,
                            double u);

}  // namespace halfspace
