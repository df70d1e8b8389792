#include "roughchain/matexp.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "roughchain/errors.hpp"

namespace roughchain {

std::string_view expm_method_name(ExpmMethod method) {
  switch (method) {
    case ExpmMethod::automatic:
      return "automatic";
    case ExpmMethod::dense:
      return "dense";
    case ExpmMethod::uniformization:
      return "uniformization";
    case ExpmMethod::krylov_shift_invert:
      return "krylov-shift-invert";
  }
  return "unknown";
}

namespace {

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("expm: time must be finite and >= 0");
}

double max_abs_diagonal(const SparseGenerator& G) {
  double nu = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i) nu = std::max(nu, std::abs(G.coeff(i, i)));
  return nu;
}

}  // namespace

Eigen::MatrixXd expm_dense(const Eigen::MatrixXd& G, double t, std::size_t dense_cap) {
  check_time(t);
  if (G.rows() != G.cols()) throw ConfigError("expm_dense: matrix must be square");
  if (static_cast<std::size_t>(G.rows()) > dense_cap) {
    throw NumericalError("expm_dense: size " + std::to_string(G.rows()) + " exceeds the dense cap " +
                         std::to_string(dense_cap));
  }
  const auto report = validate_generator(G);
  if (!report.is_generator(1e-10)) {
    throw NumericalError("expm_dense: input is not a generator (row sum " + std::to_string(report.max_rel_row_sum) +
                         ", min off-diagonal " + std::to_string(report.min_offdiag) + ")");
  }
  const auto n = G.rows();
  if (t == 0.0 || report.nu == 0.0) return Eigen::MatrixXd::Identity(n, n);
  // Scale so that ||G t / 2^s||_1 <= 1, take the Pade exponential there and
  // square back. Each intermediate is re-projected onto the stochastic
  // matrices; without this the row-sum rounding error doubles with every
  // squaring, which for stiff generators (||G|| ~ 1e10) leaves O(1e-6) drift.
  const double norm = (G * t).cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 1.0) std::frexp(norm, &squarings);
  Eigen::MatrixXd P = (std::ldexp(t, -squarings) * G).exp();
  auto project = [&P] {
    P = P.cwiseMax(0.0);
    for (Eigen::Index i = 0; i < P.rows(); ++i) P.row(i) /= P.row(i).sum();
  };
  if (!P.allFinite()) throw NumericalError("expm_dense: Pade step produced non-finite entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (P(i, j) < -1e-12) {
        throw NumericalError("expm_dense: negative transition probability " + std::to_string(P(i, j)));
      }
    }
  }
  project();
  for (int k = 0; k < squarings; ++k) {
    P = P * P;
    project();
  }
  if (!P.allFinite()) throw NumericalError("expm_dense: overflow in scaling and squaring");
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row = P.row(i).sum();
    if (std::abs(row - 1.0) > 1e-10) {
      throw NumericalError("expm_dense: row " + std::to_string(i) + " sums to " + std::to_string(row));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (P(i, j) < -1e-12) {
        throw NumericalError("expm_dense: negative transition probability " + std::to_string(P(i, j)));
      }
      if (P(i, j) < 0.0) P(i, j) = 0.0;
    }
  }
  return P;
}

struct ExpmPlan::Krylov {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  double gamma = 0.0;
  // Fallback when the projected problem is unusable: backward Euler with n
  // steps for n = 2, 4, 6, ..., extrapolated in 1/n. Factors built on demand.
  std::once_flag euler_once;
  std::vector<std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>>> euler;
};

namespace {

constexpr int kEulerLevels = 12;

int euler_steps(int level) { return 2 * (level + 1); }

}  // namespace

ExpmPlan::ExpmPlan(const SparseGenerator& G, double t, const ExpmOptions& options)
    : G_(G), t_(t), options_(options), method_(options.method), nu_(0.0) {
  check_time(t);
  if (G.rows() != G.cols()) throw ConfigError("expm: matrix must be square");
  if (!(options.tol > 0.0)) throw ConfigError("expm: tol must be positive");
  nu_ = max_abs_diagonal(G_);
  const auto n = static_cast<std::size_t>(G.rows());
  if (method_ == ExpmMethod::automatic) {
    if (n <= options.dense_cap) {
      method_ = ExpmMethod::dense;
    } else if (nu_ * t <= options.uniformization_budget) {
      method_ = ExpmMethod::uniformization;
    } else {
      method_ = ExpmMethod::krylov_shift_invert;
    }
  }
  if (t == 0.0 || nu_ == 0.0) return;
  switch (method_) {
    case ExpmMethod::dense:
      dense_ = std::make_unique<Eigen::MatrixXd>(expm_dense(Eigen::MatrixXd(G_), t, options.dense_cap));
      break;
    case ExpmMethod::uniformization:
      if (nu_ * t > options.uniformization_budget) {
        throw NumericalError("expm: nu*t = " + std::to_string(nu_ * t) + " exceeds the uniformization budget " +
                             std::to_string(options.uniformization_budget) +
                             "; split the horizon or use the Krylov method");
      }
      break;
    case ExpmMethod::krylov_shift_invert: {
      krylov_ = std::make_unique<Krylov>();
      krylov_->gamma = options.krylov_shift * t;
      Eigen::SparseMatrix<double> A(G_.rows(), G_.cols());
      A.setIdentity();
      A -= krylov_->gamma * Eigen::SparseMatrix<double>(G_);
      A.makeCompressed();
      krylov_->lu.compute(A);
      if (krylov_->lu.info() != Eigen::Success) {
        throw NumericalError("expm: sparse LU of I - gamma G failed: " + krylov_->lu.lastErrorMessage());
      }
      break;
    }
    case ExpmMethod::automatic:
      break;
  }
}

ExpmPlan::~ExpmPlan() = default;
ExpmPlan::ExpmPlan(ExpmPlan&&) noexcept = default;
ExpmPlan& ExpmPlan::operator=(ExpmPlan&&) noexcept = default;

const Eigen::MatrixXd* ExpmPlan::cached() const noexcept { return dense_.get(); }

Eigen::VectorXd ExpmPlan::uniformize(const Eigen::VectorXd& w, ExpmStats* stats) const {
  const double total = nu_ * t_;
  const auto chunks = static_cast<std::size_t>(std::max(1.0, std::ceil(total / options_.uniformization_chunk)));
  const double lambda = total / static_cast<double>(chunks);
  Eigen::VectorXd current = w;
  std::size_t matvecs = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const double scale = std::max(current.lpNorm<Eigen::Infinity>(), 1e-300);
    const double tail_target = options_.tol / (static_cast<double>(chunks) * scale);
    const auto k_max = static_cast<std::size_t>(lambda + 20.0 * std::sqrt(lambda) + 60.0);
    double weight = std::exp(-lambda);
    double cumulative = weight;
    Eigen::VectorXd term = current;
    Eigen::VectorXd acc = weight * term;
    for (std::size_t k = 1; k <= k_max && 1.0 - cumulative > tail_target; ++k) {
      term += G_ * term / nu_;
      ++matvecs;
      weight *= lambda / static_cast<double>(k);
      cumulative += weight;
      acc += weight * term;
    }
    current = std::move(acc);
  }
  if (stats) {
    stats->matvecs = matvecs;
    stats->chunks = chunks;
  }
  return current;
}

Eigen::VectorXd ExpmPlan::extrapolate(const Eigen::VectorXd& w, ExpmStats* stats) const {
  std::call_once(krylov_->euler_once, [this] {
    const Eigen::SparseMatrix<double> G(G_);
    for (int level = 0; level < kEulerLevels; ++level) {
      Eigen::SparseMatrix<double> A(G.rows(), G.cols());
      A.setIdentity();
      A -= (t_ / euler_steps(level)) * G;
      A.makeCompressed();
      auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
      lu->compute(A);
      if (lu->info() != Eigen::Success) {
        throw NumericalError("expm: sparse LU for the Euler fallback failed: " + lu->lastErrorMessage());
      }
      krylov_->euler.push_back(std::move(lu));
    }
  });
  // Neville table over h = 1/n; row i holds the extrapolants of level i.
  std::vector<Eigen::VectorXd> row, prev;
  double change = HUGE_VAL;
  std::size_t solves = 0;
  for (int i = 0; i < kEulerLevels; ++i) {
    Eigen::VectorXd y = w;
    for (int k = 0; k < euler_steps(i); ++k) y = krylov_->euler[static_cast<std::size_t>(i)]->solve(y);
    solves += static_cast<std::size_t>(euler_steps(i));
    row.assign(1, std::move(y));
    for (int j = 1; j <= i; ++j) {
      const double ratio = static_cast<double>(euler_steps(i)) / euler_steps(i - j);
      row.push_back(row[static_cast<std::size_t>(j - 1)] +
                    (row[static_cast<std::size_t>(j - 1)] - prev[static_cast<std::size_t>(j - 1)]) / (ratio - 1.0));
    }
    if (i > 0) {
      change = (row.back() - row[row.size() - 2]).lpNorm<Eigen::Infinity>();
      const double scale = std::max(1.0, row.back().lpNorm<Eigen::Infinity>());
      if (change <= options_.tol * scale) break;
    }
    prev = row;
  }
  const double scale = std::max(1.0, row.back().lpNorm<Eigen::Infinity>());
  if (!row.back().allFinite() || change > 1e3 * options_.tol * scale) {
    throw NumericalError("expm: stiff action did not converge (Krylov projection unusable, extrapolated Euler "
                         "change " + std::to_string(change) + ")");
  }
  if (stats) {
    stats->matvecs = solves;
    stats->krylov_dim = 0;
  }
  return row.back();
}

Eigen::VectorXd ExpmPlan::apply(const Eigen::VectorXd& w, ExpmStats* stats) const {
  if (w.size() != G_.rows()) throw ConfigError("expm: vector length does not match the generator");
  if (!w.allFinite()) throw ConfigError("expm: input vector has non-finite entries");
  if (stats) {
    *stats = ExpmStats{};
    stats->method = method_;
    stats->nu = nu_;
  }
  if (t_ == 0.0 || nu_ == 0.0) return w;
  if (method_ == ExpmMethod::dense) return (*dense_) * w;
  if (method_ == ExpmMethod::uniformization) return uniformize(w, stats);

  // exp(tG) = exp((t/gamma)(I - A^-1)) with A = (I - gamma G)^-1 approximated
  // on the Krylov space of A; iterate until successive coefficients agree.
  const double beta = w.norm();
  if (beta == 0.0) return w;
  const auto n = w.size();
  const auto m_max = static_cast<Eigen::Index>(std::min<std::size_t>(options_.krylov_max_dim, n));
  const double tau = t_ / krylov_->gamma;
  Eigen::MatrixXd V(n, m_max + 1);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m_max + 1, m_max);
  V.col(0) = w / beta;
  Eigen::VectorXd prev;
  Eigen::VectorXd best;
  Eigen::Index best_dim = 0;
  double last_change = HUGE_VAL;
  bool converged = false;
  for (Eigen::Index j = 0; j < m_max; ++j) {
    Eigen::VectorXd z = krylov_->lu.solve(V.col(j));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double h = V.col(i).dot(z);
        H(i, j) += h;
        z -= h * V.col(i);
      }
    }
    H(j + 1, j) = z.norm();
    const Eigen::Index k = j + 1;
    const bool breakdown = H(j + 1, j) <= 1e-14 * H.topLeftCorner(k, k).norm();
    if (!breakdown) V.col(j + 1) = z / H(j + 1, j);

    const Eigen::MatrixXd Hk = H.topLeftCorner(k, k);
    // Ritz values of (I - gamma G)^-1 belong in Re z > 0; outside it the
    // projected exponential grows spuriously.
    if ((Hk.eigenvalues().real().array() <= 1e-12).any()) break;
    const Eigen::MatrixXd E = (tau * (Eigen::MatrixXd::Identity(k, k) - Hk.inverse())).exp();
    const Eigen::VectorXd y = beta * E.col(0);
    if (!y.allFinite()) break;
    if (prev.size() > 0) {
      Eigen::VectorXd diff = y;
      diff.head(prev.size()) -= prev;
      last_change = diff.norm();
      if (last_change <= options_.tol * std::max(1.0, y.norm())) converged = true;
    }
    prev = y;
    best = y;
    best_dim = k;
    if (converged || breakdown) {
      converged = true;
      break;
    }
  }
  if (best_dim == 0 || (!converged && last_change > 1e3 * options_.tol * std::max(1.0, best.norm()))) {
    return extrapolate(w, stats);
  }
  if (stats) {
    stats->krylov_dim = static_cast<std::size_t>(best_dim);
    stats->matvecs = static_cast<std::size_t>(best_dim);
  }
  return V.leftCols(best_dim) * best;
}

Eigen::VectorXd expm_action(const SparseGenerator& G, const Eigen::VectorXd& w, double t, const ExpmOptions& options,
                            ExpmStats* stats) {
  ExpmOptions opts = options;
  if (opts.method == ExpmMethod::automatic) {
    opts.method = max_abs_diagonal(G) * t <= opts.uniformization_budget ? ExpmMethod::uniformization
                                                                        : ExpmMethod::krylov_shift_invert;
  }
  return ExpmPlan(G, t, opts).apply(w, stats);
}

}  // namespace roughchain
