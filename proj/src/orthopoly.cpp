#include "halfspace/orthopoly.hpp"

#include <mpfr.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>

#include "halfspace/error.hpp"

namespace halfspace {

GaussianMoments gaussian_moments(double s)
{
  // 1 + erf(s) == erfc(-s), which keeps full relative accuracy for s << 0
  const double m0 = 0.5 * std::sqrt(std::numbers::pi) * std::erfc(-s);
  const double m1 = 0.5 * std::exp(-s * s) + s * m0;
  const double m2 = s * m1 + 0.5 * m0;
  return {s, m0, m1, m2};
}

namespace {

// Minimal RAII handle over mpfr_t; every value carries its own precision.
class Big
{
 public:
  explicit Big(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  Big(const Big&) = delete;
  Big& operator=(const Big&) = delete;
  ~Big() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

struct Coefficients
{
  std::vector<double> alphas;
  std::vector<double> betas;  // betas[0] = m0
};

Coefficients recurrence_mpfr(double s, int n_max, mpfr_prec_t prec)
{
  Big sh(prec), m0(prec), m1(prec), t(prec), u(prec);
  mpfr_set_d(sh.get(), s, MPFR_RNDN);

  // m0 = sqrt(pi)/2 * erfc(-s)
  mpfr_neg(t.get(), sh.get(), MPFR_RNDN);
  mpfr_erfc(m0.get(), t.get(), MPFR_RNDN);
  mpfr_const_pi(u.get(), MPFR_RNDN);
  mpfr_sqrt(u.get(), u.get(), MPFR_RNDN);
  mpfr_mul(m0.get(), m0.get(), u.get(), MPFR_RNDN);
  mpfr_div_ui(m0.get(), m0.get(), 2, MPFR_RNDN);

  // m1 = exp(-s^2)/2 + s m0
  mpfr_sqr(t.get(), sh.get(), MPFR_RNDN);
  mpfr_neg(t.get(), t.get(), MPFR_RNDN);
  mpfr_exp(t.get(), t.get(), MPFR_RNDN);
  mpfr_div_ui(t.get(), t.get(), 2, MPFR_RNDN);
  mpfr_mul(u.get(), sh.get(), m0.get(), MPFR_RNDN);
  mpfr_add(m1.get(), t.get(), u.get(), MPFR_RNDN);

  Coefficients out;
  out.alphas.resize(n_max + 1);
  out.betas.resize(n_max + 1);
  out.betas[0] = m0.to_double();

  Big alpha(prec), beta(prec), sum(prec);
  mpfr_div(alpha.get(), m1.get(), m0.get(), MPFR_RNDN);
  mpfr_set(sum.get(), alpha.get(), MPFR_RNDN);
  out.alphas[0] = alpha.to_double();

  // beta_1 = m2/m0 - alpha_0^2 = 1/2 + s alpha_0 - alpha_0^2 (m2 = s m1 + m0/2)
  mpfr_set_zero(beta.get(), 1);
  for (int n = 0; n < n_max; ++n) {
    // beta_{n+1} = n + 1/2 + s alpha_n - alpha_n^2 - beta_n   (beta_0 := 0 here)
    mpfr_mul(t.get(), sh.get(), alpha.get(), MPFR_RNDN);
    mpfr_sqr(u.get(), alpha.get(), MPFR_RNDN);
    mpfr_sub(t.get(), t.get(), u.get(), MPFR_RNDN);
    mpfr_sub(t.get(), t.get(), beta.get(), MPFR_RNDN);
    mpfr_set_d(u.get(), n + 0.5, MPFR_RNDN);
    mpfr_add(beta.get(), t.get(), u.get(), MPFR_RNDN);
    out.betas[n + 1] = beta.to_double();

    // alpha_{n+1} = s - alpha_n + sum_{k<=n} alpha_k / (2 beta_{n+1})
    mpfr_mul_ui(t.get(), beta.get(), 2, MPFR_RNDN);
    mpfr_div(t.get(), sum.get(), t.get(), MPFR_RNDN);
    mpfr_sub(u.get(), sh.get(), alpha.get(), MPFR_RNDN);
    mpfr_add(alpha.get(), u.get(), t.get(), MPFR_RNDN);
    mpfr_add(sum.get(), sum.get(), alpha.get(), MPFR_RNDN);
    out.alphas[n + 1] = alpha.to_double();
  }
  return out;
}

std::vector<double> moments_mpfr(double s, int max_order, mpfr_prec_t prec)
{
  Big sh(prec), a(prec), b(prec), t(prec), u(prec);
  mpfr_set_d(sh.get(), s, MPFR_RNDN);
  mpfr_neg(t.get(), sh.get(), MPFR_RNDN);
  mpfr_erfc(a.get(), t.get(), MPFR_RNDN);
  mpfr_const_pi(u.get(), MPFR_RNDN);
  mpfr_sqrt(u.get(), u.get(), MPFR_RNDN);
  mpfr_mul(a.get(), a.get(), u.get(), MPFR_RNDN);
  mpfr_div_ui(a.get(), a.get(), 2, MPFR_RNDN);
  mpfr_sqr(t.get(), sh.get(), MPFR_RNDN);
  mpfr_neg(t.get(), t.get(), MPFR_RNDN);
  mpfr_exp(t.get(), t.get(), MPFR_RNDN);
  mpfr_div_ui(t.get(), t.get(), 2, MPFR_RNDN);
  mpfr_mul(u.get(), sh.get(), a.get(), MPFR_RNDN);
  mpfr_add(b.get(), t.get(), u.get(), MPFR_RNDN);

  std::vector<double> m(max_order + 1);
  m[0] = a.to_double();
  if (max_order >= 1) m[1] = b.to_double();
  for (int i = 1; i < max_order; ++i) {
    // m_{i+1} = s m_i + (i/2) m_{i-1}
    mpfr_mul(t.get(), sh.get(), b.get(), MPFR_RNDN);
    mpfr_mul_d(u.get(), a.get(), 0.5 * i, MPFR_RNDN);
    mpfr_swap(a.get(), b.get());
    mpfr_add(b.get(), t.get(), u.get(), MPFR_RNDN);
    m[i + 1] = b.to_double();
  }
  return m;
}

Coefficients recurrence_double(double s, int n_max)
{
  const auto g = gaussian_moments(s);
  Coefficients out;
  out.alphas.resize(n_max + 1);
  out.betas.resize(n_max + 1);
  out.betas[0] = g.m0;
  double alpha = g.m1 / g.m0;
  double beta = 0.0;
  double sum = alpha;
  out.alphas[0] = alpha;
  for (int n = 0; n < n_max; ++n) {
    beta = n + 0.5 + s * alpha - alpha * alpha - beta;
    if (!(beta > 0.0)) throw NonPositiveBeta(n + 1, beta);
    out.betas[n + 1] = beta;
    alpha = s - alpha + sum / (2.0 * beta);
    sum += alpha;
    out.alphas[n + 1] = alpha;
  }
  return out;
}

bool agree(const std::vector<double>& a, const std::vector<double>& b)
{
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 2 * eps * std::max(std::abs(a[i]), std::abs(b[i]))) return false;
  }
  return true;
}

}  // namespace

std::vector<double> gaussian_moment_sequence(double s, int max_order)
{
  // the forward recursion cancels for s < 0, so it runs in MPFR until two
  // precisions agree
  mpfr_prec_t prec = 128 + 4 * static_cast<mpfr_prec_t>(max_order) +
                     static_cast<mpfr_prec_t>(2.0 * s * s);
  std::vector<double> m = moments_mpfr(s, max_order, prec);
  for (;;) {
    prec *= 2;
    std::vector<double> finer = moments_mpfr(s, max_order, prec);
    const bool done = agree(m, finer);
    m = std::move(finer);
    if (done || prec > (1 << 20)) return m;
  }
}

RecurrenceTable half_hermite_recurrence(double s, int n_max, PrecisionMode mode)
{
  assert(n_max >= 0);
  RecurrenceTable table;
  table.kind = WeightKind::half_gaussian;
  table.shift = s;
  table.precision = mode;

  Coefficients c;
  if (mode == PrecisionMode::double_precision) {
    c = recurrence_double(s, n_max);
  } else {
    mpfr_prec_t prec = 128 + 8 * static_cast<mpfr_prec_t>(n_max);
    c = recurrence_mpfr(s, n_max, prec);
    for (;;) {
      prec *= 2;
      Coefficients finer = recurrence_mpfr(s, n_max, prec);
      const bool done = agree(c.alphas, finer.alphas) && agree(c.betas, finer.betas);
      c = std::move(finer);
      if (done) break;
      if (prec > (1 << 20)) throw NonPositiveBeta(n_max, c.betas.back());
    }
    for (int n = 1; n <= n_max; ++n) {
      if (!(c.betas[n] > 0.0)) throw NonPositiveBeta(n, c.betas[n]);
    }
  }
  table.alphas = std::move(c.alphas);
  table.betas = std::move(c.betas);
  return table;
}

RecurrenceTable shifted_legendre_recurrence(int n_max)
{
  RecurrenceTable table;
  table.kind = WeightKind::legendre01;
  table.shift = 0.0;
  table.precision = PrecisionMode::double_precision;
  table.alphas.assign(n_max + 1, 0.5);
  table.betas.resize(n_max + 1);
  table.betas[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n) * n;
    table.betas[n] = 1.0 / (4.0 * (4.0 - 1.0 / nn));
  }
  return table;
}

void evaluate_polys(const RecurrenceTable& table, double v, std::span<double> out)
{
  const int n_max = static_cast<int>(out.size()) - 1;
  if (n_max > table.n_max()) throw IndexBeyondTable(n_max, table.n_max());
  if (out.empty()) return;
  out[0] = 1.0 / std::sqrt(table.m0());
  if (n_max == 0) return;
  out[1] = (v - table.alphas[0]) * out[0] / std::sqrt(table.betas[1]);
  for (int n = 1; n < n_max; ++n) {
    out[n + 1] = ((v - table.alphas[n]) * out[n] - std::sqrt(table.betas[n]) * out[n - 1]) /
                 std::sqrt(table.betas[n + 1]);
  }
}

std::vector<double> evaluate_polys(const RecurrenceTable& table, double v, int n_max)
{
  if (n_max > table.n_max()) throw IndexBeyondTable(n_max, table.n_max());
  std::vector<double> out(n_max + 1);
  evaluate_polys(table, v, std::span<double>(out));
  return out;
}

QuadratureRule golub_welsch(const RecurrenceTable& table, int n_points)
{
  if (n_points < 1 || n_points > table.n_max() + 1)
    throw IndexBeyondTable(n_points - 1, table.n_max());

  Eigen::VectorXd diag(n_points);
  Eigen::VectorXd sub(std::max(n_points - 1, 1));
  for (int i = 0; i < n_points; ++i) diag[i] = table.alphas[i];
  for (int i = 0; i + 1 < n_points; ++i) sub[i] = std::sqrt(table.betas[i + 1]);

  QuadratureRule rule;
  rule.weight = {table.kind, table.shift, 1.0};
  rule.nodes.resize(n_points);
  rule.weights.resize(n_points);
  if (n_points == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = table.m0();
    return rule;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub.head(n_points - 1), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw EigenFailure("Golub-Welsch Jacobi matrix");

  // Eigen returns eigenvalues in increasing order. The weights come from the
  // Christoffel function 1 / sum_k p_k(x)^2 rather than m0 * v_0^2: eigenvector
  // components only carry absolute accuracy, which ruins the tiny tail weights.
  std::vector<double> p(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double x = solver.eigenvalues()[i];
    evaluate_polys(table, x, std::span<double>(p));
    double s = 0.0;
    for (double pk : p) s += pk * pk;
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / s;
  }
  return rule;
}

QuadratureRule half_gauss_rule(double s, int n_points)
{
  return golub_welsch(half_hermite_recurrence(s, n_points), n_points);
}

QuadratureRule legendre01_rule(int n_points)
{
  return golub_welsch(shifted_legendre_recurrence(n_points), n_points);
}

}  // namespace halfspace
