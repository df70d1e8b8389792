#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "roughchain/grids.hpp"
#include "roughchain/kernel.hpp"
#include "roughchain/models.hpp"

namespace roughchain {

using SparseGenerator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// What to do when central moment matching yields a negative off-diagonal.
enum class NegativeRatePolicy {
  reject,  ///< throw NegativeRateError
  upwind,  ///< one-sided drift split at the offending node (first moment kept)
  allow,   ///< keep the raw rates
};

std::string_view negative_rate_policy_name(NegativeRatePolicy policy);
NegativeRatePolicy parse_negative_rate_policy(std::string_view name);

/// Tridiagonal rate matrix; lower[i] = G(i, i-1), upper[i] = G(i, i+1).
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  std::size_t repaired_nodes = 0;

  std::size_t size() const noexcept { return diag.size(); }
  Eigen::MatrixXd dense() const;
  SparseGenerator sparse() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const;
};

/// Moment-matched generator on `grid`: interior rows have zero row sum,
/// first moment drift[i] and second moment diffusion[i]; boundary rows are 0.
Tridiagonal moment_matched_generator(const Grid& grid, const std::vector<double>& drift,
                                     const std::vector<double>& diffusion, NegativeRatePolicy policy,
                                     std::string_view chain);

Tridiagonal build_Q(const Grid& vgrid, const ModelSpec& model, const MarketParams& market,
                    const KernelSpec& kernel, NegativeRatePolicy policy = NegativeRatePolicy::upwind);

Tridiagonal build_Lambda(const Grid& xgrid, double v_ell, const ModelSpec& model, const MarketParams& market,
                         const KernelSpec& kernel, NegativeRatePolicy policy = NegativeRatePolicy::upwind,
                         ThetaVariant variant = ThetaVariant::lemma);

/// NM x NM block generator Q (x) I_N + blockdiag(Lambda_l); flat index l*N + i.
SparseGenerator build_coupled(const Tridiagonal& Q, const std::vector<Tridiagonal>& lambdas);

struct GeneratorReport {
  double max_abs_row_sum = 0.0;
  /// max |row sum| / max(1, max |G_ii| over the row)
  double max_rel_row_sum = 0.0;
  double min_offdiag = 0.0;
  double max_diag = 0.0;
  /// uniformization rate bound max |G_ii|
  double nu = 0.0;
  std::size_t negative_offdiag = 0;
  bool boundary_rows_zero = true;

  bool is_generator(double rel_tol = 1e-12) const {
    return max_rel_row_sum <= rel_tol && min_offdiag >= 0.0 && max_diag <= 0.0;
  }
};

GeneratorReport validate_generator(const Tridiagonal& G);
GeneratorReport validate_generator(const SparseGenerator& G);
GeneratorReport validate_generator(const Eigen::MatrixXd& G);

struct GeneratorOptions {
  std::size_t N = 100;
  std::size_t M = 100;
  GridOptions vgrid;
  GridOptions xgrid;
  NegativeRatePolicy policy = NegativeRatePolicy::upwind;
  ThetaVariant theta = ThetaVariant::lemma;
  unsigned threads = 1;
};

struct Provenance {
  std::string model;
  double hurst = 0.0;
  double eps = 0.0;
  double S0 = 0.0;
  double V0 = 0.0;
  double rho = 0.0;
  std::string policy;
  std::string theta;
};

class GeneratorSet {
 public:
  GeneratorSet(Grid vgrid, Grid xgrid, Tridiagonal Q, std::vector<Tridiagonal> lambdas, Provenance provenance);

  const Grid& vgrid() const noexcept { return vgrid_; }
  const Grid& xgrid() const noexcept { return xgrid_; }
  const Tridiagonal& Q() const noexcept { return Q_; }
  const std::vector<Tridiagonal>& lambdas() const noexcept { return lambdas_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::size_t N() const noexcept { return xgrid_.size(); }
  std::size_t M() const noexcept { return vgrid_.size(); }
  std::size_t repaired_nodes() const;

  /// Built on first use and cached; safe to call concurrently.
  const SparseGenerator& coupled() const;

 private:
  Grid vgrid_;
  Grid xgrid_;
  Tridiagonal Q_;
  std::vector<Tridiagonal> lambdas_;
  Provenance provenance_;
  struct LazyCoupled {
    std::once_flag once;
    std::unique_ptr<SparseGenerator> matrix;
  };
  std::shared_ptr<LazyCoupled> coupled_ = std::make_shared<LazyCoupled>();
};

GeneratorSet build_generators(const ModelSpec& model, const MarketParams& market, const KernelSpec& kernel,
                              const GeneratorOptions& options);

/// One "row col value" line per stored entry, 0-based, 17 significant digits,
/// preceded by a "% rows cols nnz" header line.
void write_triplets(std::ostream& out, const SparseGenerator& G);
void write_triplets(std::ostream& out, const Tridiagonal& G);

}  // namespace roughchain
