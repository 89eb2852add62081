#include "halfspace/basis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "halfspace/error.hpp"

namespace halfspace {

BasisSet build_basis(BasisKind kind, int N, double u)
{
  if (N < 1) throw ConfigError("basis needs N >= 1 (got " + std::to_string(N) + ")");
  BasisSet basis;
  basis.kind = kind;
  basis.N = N;
  basis.u = u;
  if (kind == BasisKind::nte_legendre) {
    if (u != 0.0) throw UnsupportedShift(u);
    basis.recurrence = shifted_legendre_recurrence(N + 1);
    basis.velocity_domain = {-1.0, 1.0};
  } else {
    basis.recurrence = half_hermite_recurrence(0.0, N + 1);
    basis.velocity_domain = {-std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
  }
  return basis;
}

void eval_basis(const BasisSet& basis, double v, std::span<double> out)
{
  if (!basis.velocity_domain.contains(v))
    throw OutOfDomain("velocity " + std::to_string(v) + " outside the model's velocity domain");

  const double w = v + basis.u;
  const double r = std::abs(w);
  const double sign = w > 0.0 ? 1.0 : (w < 0.0 ? -1.0 : 0.0);
  double envelope = std::numbers::sqrt2 / 2.0;
  if (basis.kind == BasisKind::bgk_half_hermite) envelope *= std::exp(-0.5 * r * r);

  std::vector<double> b(basis.N + 1);
  evaluate_polys(basis.recurrence, r, std::span<double>(b));

  for (int n = 0; n <= basis.N; ++n) {
    const double value = b[n] * envelope;
    out[2 * n] = sign * value;
    if (n < basis.N) out[2 * n + 1] = value;
  }
}

std::vector<double> eval_basis(const BasisSet& basis, double v)
{
  std::vector<double> out(basis.size());
  eval_basis(basis, v, out);
  return out;
}

double eval_expansion(const BasisSet& basis, std::span<const double> coefficients, double v)
{
  std::vector<double> psi(basis.size());
  eval_basis(basis, v, psi);
  double sum = 0.0;
  for (int k = 0; k < basis.size(); ++k) sum += coefficients[k] * psi[k];
  return sum;
}

ParityPair parity_decompose(std::span<const double> grid, std::span<const double> samples,
                            double u)
{
  if (grid.size() != samples.size()) throw AsymmetricGrid("grid and samples differ in length");
  ParityPair out;
  out.u = u;
  out.grid.assign(grid.begin(), grid.end());
  out.even_part.resize(grid.size());
  out.odd_part.resize(grid.size());

  double scale = 1.0;
  for (double v : grid) scale = std::max(scale, std::abs(v + u));
  const double tol = 1e-12 * scale;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mirror = -2.0 * u - grid[i];
    std::size_t j = grid.size();
    for (std::size_t m = 0; m < grid.size(); ++m) {
      if (std::abs(grid[m] - mirror) <= tol) {
        j = m;
        break;
      }
    }
    if (j == grid.size())
      throw AsymmetricGrid("no reflection of v = " + std::to_string(grid[i]) + " about -u");
    out.even_part[i] = 0.5 * (samples[i] + samples[j]);
    out.odd_part[i] = 0.5 * (samples[i] - samples[j]);
  }
  return out;
}

}  // namespace halfspace
