#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "halfspace/spectral.hpp"

namespace halfspace {

/**
 * On-disk cache of auxiliary damped solutions g_{+,i}, g_{0,j}.
 *
 * One JSON file per configuration, named aux-v1-<hash>.json, where <hash> is
 * the FNV-1a 64-bit hash of the canonical configuration string. Each file
 * records the format tag, the hash, the configuration string and the a(0)
 * vectors; anything that does not match on read is ignored and recomputed.
 * Writes go to a temporary file in the same directory followed by a rename.
 */
class AuxiliaryCache
{
 public:
  static constexpr const char* format = "halfspace.aux/1";

  explicit AuxiliaryCache(std::filesystem::path dir)
      : dir_(std::move(dir))
  {
  }

  /// HALFSPACE_CACHE_DIR if set, otherwise `fallback`.
  static std::filesystem::path resolve_dir(const std::filesystem::path& fallback);

  static std::string config_key(const DampedSolver& solver);
  static std::string hash(const std::string& key);

  std::filesystem::path path_for(const std::string& key) const;

  struct Entry
  {
    std::vector<Eigen::VectorXd> g_plus;
    std::vector<Eigen::VectorXd> g_zero;
  };

  std::optional<Entry> load(const std::string& key) const;
  void store(const std::string& key, const Entry& entry) const;

 private:
  std::filesystem::path dir_;
};

struct AuxiliarySet
{
  std::shared_ptr<const DampedSolver> solver;
  std::vector<DampedSolution> g_plus;
  std::vector<DampedSolution> g_zero;
  Eigen::MatrixXd C;
  double condition_estimate = 1.0;
  bool from_cache = false;

  bool empty() const { return g_plus.empty() && g_zero.empty(); }
  int size() const { return static_cast<int>(g_plus.size() + g_zero.size()); }
};

constexpr double max_C_condition = 1e12;

/// Solves the damped problem with each H+ and H0 mode as incoming data and
/// assembles C from their flux moments at x = 0.
AuxiliarySet build_auxiliary(std::shared_ptr<const DampedSolver> solver,
                             const AuxiliaryCache* cache = nullptr);

/// Closed-form end state f_inf = sum eta_i X_i over H+ and H0.
struct EndState
{
  std::vector<NullMode> modes;
  Eigen::VectorXd eta;

  double operator()(double v) const;
};

struct RecoveredSolution
{
  DampedSolution damped;
  std::shared_ptr<const AuxiliarySet> aux;
  Eigen::VectorXd eta;             ///< (eta_+, eta_0)
  Eigen::VectorXd phi_projection;  ///< Phi projected onto the main basis
  EndState end_state;

  /// True when the auxiliary solutions live on the main Galerkin basis.
  bool shares_basis() const;

  /// Coefficients of f - g on the main basis (requires shares_basis()).
  Eigen::VectorXd galerkin_coefficients(double x) const;
  /// Coefficients of f - g + P_N Phi (requires shares_basis()).
  Eigen::VectorXd coefficients(double x) const;

  /// (U_+, U_0) of f - g at x; zero by construction at x = 0.
  Eigen::VectorXd corrected_moments(double x) const;
};

RecoveredSolution recover(const DampedSolution& damped, std::shared_ptr<const AuxiliarySet> aux);

double evaluate_recovered(const RecoveredSolution& sol, double x, double v);

}  // namespace halfspace
