#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

#include <Eigen/Dense>

#include "roughchain/ctmc.hpp"

namespace roughchain {

enum class ExpmMethod {
  automatic,            ///< plan: dense up to the cap, else uniformization, else Krylov
  dense,                ///< scaling and squaring with a Pade approximant
  uniformization,       ///< Poisson-weighted powers of I + G/nu
  krylov_shift_invert,  ///< rational Krylov on (I - gamma G)^-1, for stiff G; falls back to extrapolated
                        ///< backward Euler when the projection breaks down
};

std::string_view expm_method_name(ExpmMethod method);

struct ExpmOptions {
  double tol = 1e-10;
  std::size_t dense_cap = 1024;
  /// Largest nu * t handled by uniformization before switching to Krylov.
  double uniformization_budget = 2e4;
  /// Largest nu * dt per uniformization chunk.
  double uniformization_chunk = 50.0;
  std::size_t krylov_max_dim = 60;
  /// Shift gamma = krylov_shift * t.
  double krylov_shift = 0.1;
  ExpmMethod method = ExpmMethod::automatic;
};

struct ExpmStats {
  ExpmMethod method = ExpmMethod::automatic;
  double nu = 0.0;
  std::size_t matvecs = 0;
  std::size_t chunks = 0;
  std::size_t krylov_dim = 0;
};

/// exp(G t) for a generator G with at most `dense_cap` rows. The result is
/// checked to be a transition matrix (rows sum to 1 within 1e-10, entries
/// >= -1e-12) and tiny negative entries are clamped to 0.
Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& G, double t, std::size_t dense_cap = 1024);

/// exp(G t) w. Uniformization when nu t fits the budget, otherwise a
/// shift-and-invert Krylov approximation; `options.method` can force either.
Eigen::VectorXd expm_action(const SparseGenerator& G, const Eigen::VectorXd& w, double t,
                            const ExpmOptions& options = {}, ExpmStats* stats = nullptr);

/// exp(G t) prepared once and applied to many vectors (Bermudan steps). The
/// dense method caches the full transition matrix; Krylov caches the sparse
/// LU factorization of I - gamma G.
class ExpmPlan {
 public:
  ExpmPlan(const SparseGenerator& G, double t, const ExpmOptions& options = {});
  ~ExpmPlan();
  ExpmPlan(ExpmPlan&&) noexcept;
  ExpmPlan& operator=(ExpmPlan&&) noexcept;

  Eigen::VectorXd apply(const Eigen::VectorXd& w, ExpmStats* stats = nullptr) const;

  ExpmMethod method() const noexcept { return method_; }
  double nu() const noexcept { return nu_; }
  double tol() const noexcept { return options_.tol; }
  double time() const noexcept { return t_; }
  /// Cached transition matrix, or nullptr unless method() == dense.
  const Eigen::MatrixXd* cached() const noexcept;

 private:
  struct Krylov;

  Eigen::VectorXd uniformize(const Eigen::VectorXd& w, ExpmStats* stats) const;
  Eigen::VectorXd extrapolate(const Eigen::VectorXd& w, ExpmStats* stats) const;

  SparseGenerator G_;
  double t_;
  ExpmOptions options_;
  ExpmMethod method_;
  double nu_;
  std::unique_ptr<Eigen::MatrixXd> dense_;
  std::unique_ptr<Krylov> krylov_;
};

}  // namespace roughchain
