#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "halfspace/recovery.hpp"

namespace halfspace {

enum class FilterKind { none, cosine };

const char* to_string(FilterKind kind);
FilterKind parse_filter_kind(const std::string& name);

struct FilterSpec
{
  FilterKind kind = FilterKind::none;
  int order = 2;

  void validate() const;
};

/// sigma_k = cos(pi theta_k / 2)^p with theta_k = deg(psi_k) / (N + 1).
Eigen::VectorXd filter_factors(int N, const FilterSpec& spec);
Eigen::VectorXd apply_filter(const Eigen::VectorXd& a, const FilterSpec& spec, int N);

/// Reference value of the Milne extrapolation length.
constexpr double exact_extrapolation_length = 0.710446089598763;
constexpr double coron_extrapolation_length = 0.71040377;

/// Constant end state eta_0 X_0 of the NTE solution with incoming data v.
double extrapolation_length(const RecoveredSolution& sol);

/// Extrapolation length for a Table-1 order label (Galerkin N = order - 1).
double extrapolation_length_for_order(int order, const SystemOptions& base = {});

/**
 * Conservative isotropic Chandrasekhar H-function on Gauss-Legendre nodes.
 *
 * Iterates the reciprocal form 1/H(mu) = 1/2 \int_0^1 mu' H(mu') / (mu + mu') dmu'
 * with an averaged update (the undamped map oscillates in the conservative case).
 */
struct HFunctionTable
{
  Eigen::VectorXd mu_grid;
  Eigen::VectorXd weights;
  Eigen::VectorXd H_values;
  double iteration_residual = 0.0;
  int iterations = 0;

  /// Nystrom interpolation from the converged table; mu in [0, 1].
  double at(double mu) const;
  double moment0() const;
  double moment1() const;
};

HFunctionTable chandrasekhar_H(int n_mu = 64, double tol = 1e-10, int max_iter = 100000);

struct ProfilePoint
{
  double v;
  double f;
};

std::vector<ProfilePoint> sample_profile(const DampedSolution& sol, double x,
                                         const std::vector<double>& v_grid,
                                         const FilterSpec& filter = {});
std::vector<ProfilePoint> sample_profile(const RecoveredSolution& sol, double x,
                                         const std::vector<double>& v_grid,
                                         const FilterSpec& filter = {});

/// `count` equispaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

std::string profile_csv(const std::vector<ProfilePoint>& profile);

}  // namespace halfspace
