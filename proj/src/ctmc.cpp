#include "roughchain/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "parallel.hpp"
#include "roughchain/errors.hpp"

namespace roughchain {

std::string_view negative_rate_policy_name(NegativeRatePolicy policy) {
  switch (policy) {
    case NegativeRatePolicy::reject:
      return "reject";
    case NegativeRatePolicy::upwind:
      return "upwind";
    case NegativeRatePolicy::allow:
      return "allow";
  }
  return "unknown";
}

NegativeRatePolicy parse_negative_rate_policy(std::string_view name) {
  if (name == "reject") return NegativeRatePolicy::reject;
  if (name == "upwind") return NegativeRatePolicy::upwind;
  if (name == "allow") return NegativeRatePolicy::allow;
  throw ConfigError("unknown negative-rate policy '" + std::string(name) + "' (expected reject, upwind or allow)");
}

Eigen::MatrixXd Tridiagonal::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    G(i, i) = diag[i];
    if (i > 0) G(i, i - 1) = lower[i];
    if (i + 1 < n) G(i, i + 1) = upper[i];
  }
  return G;
}

SparseGenerator Tridiagonal::sparse() const {
  const auto n = static_cast<Eigen::Index>(size());
  SparseGenerator G(n, n);
  G.reserve(Eigen::VectorXi::Constant(n, 3));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && lower[i] != 0.0) G.insert(i, i - 1) = lower[i];
    G.insert(i, i) = diag[i];
    if (i + 1 < n && upper[i] != 0.0) G.insert(i, i + 1) = upper[i];
  }
  G.makeCompressed();
  return G;
}

Eigen::VectorXd Tridiagonal::apply(const Eigen::VectorXd& w) const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = diag[i] * w[i];
    if (i > 0) acc += lower[i] * w[i - 1];
    if (i + 1 < n) acc += upper[i] * w[i + 1];
    out[i] = acc;
  }
  return out;
}

Tridiagonal moment_matched_generator(const Grid& grid, const std::vector<double>& drift,
                                     const std::vector<double>& diffusion, NegativeRatePolicy policy,
                                     std::string_view chain) {
  const std::size_t n = grid.size();
  if (drift.size() != n || diffusion.size() != n) {
    throw ConfigError(std::string(chain) + " generator: moment vectors do not match the grid size");
  }
  Tridiagonal G;
  G.lower.assign(n, 0.0);
  G.diag.assign(n, 0.0);
  G.upper.assign(n, 0.0);
  const double range = grid.back() - grid.front();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = grid.nodes[i] - grid.nodes[i - 1];
    const double h1 = grid.nodes[i + 1] - grid.nodes[i];
    const double m = drift[i];
    const double s2 = diffusion[i];
    if (!std::isfinite(m) || !std::isfinite(s2) || s2 < 0.0) {
      throw NumericalError(std::string(chain) + " generator: invalid moments at node " + std::to_string(i) +
                           " (drift " + std::to_string(m) + ", diffusion " + std::to_string(s2) + ")");
    }
    double lo = (s2 - m * h1) / (h0 * (h0 + h1));
    double up = (s2 + m * h0) / (h1 * (h0 + h1));
    if (lo < 0.0 || up < 0.0) {
      if (policy == NegativeRatePolicy::reject) {
        const double need = s2 > 0.0 ? range * std::abs(m) / s2 + 1.0 : HUGE_VAL;
        const auto min_nodes = need < 1e15 ? static_cast<std::size_t>(std::ceil(need)) : std::size_t(-1);
        throw NegativeRateError(std::string(chain), i, std::min(lo, up), min_nodes);
      }
      if (policy == NegativeRatePolicy::upwind) {
        lo = s2 / (h0 * (h0 + h1)) + std::max(-m, 0.0) / h0;
        up = s2 / (h1 * (h0 + h1)) + std::max(m, 0.0) / h1;
        ++G.repaired_nodes;
      }
    }
    G.lower[i] = lo;
    G.upper[i] = up;
    G.diag[i] = -(lo + up);
  }
  return G;
}

Tridiagonal build_Q(const Grid& vgrid, const ModelSpec& model, const MarketParams& market,
                    const KernelSpec& kernel, NegativeRatePolicy policy) {
  const auto c = laplace_constants(kernel);
  const std::size_t n = vgrid.size();
  std::vector<double> drift(n), diffusion(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = vgrid.nodes[i];
    drift[i] = (v - market.V0) * c.r_hat + c.k_eps * model.drift_b(v);
    const double s = c.k_eps * model.sigma(v);
    diffusion[i] = s * s;
  }
  return moment_matched_generator(vgrid, drift, diffusion, policy, "variance");
}

Tridiagonal build_Lambda(const Grid& xgrid, double v_ell, const ModelSpec& model, const MarketParams& market,
                         const KernelSpec& kernel, NegativeRatePolicy policy, ThetaVariant variant) {
  const auto c = laplace_constants(kernel);
  const std::size_t n = xgrid.size();
  const double ph = model.phi(v_ell);
  std::vector<double> drift(n, 0.0), diffusion(n, (1.0 - market.rho * market.rho) * ph * ph);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    drift[i] = drift_theta(xgrid.nodes[i], v_ell, model, market, c, variant);
  }
  return moment_matched_generator(xgrid, drift, diffusion, policy, "auxiliary");
}

SparseGenerator build_coupled(const Tridiagonal& Q, const std::vector<Tridiagonal>& lambdas) {
  const std::size_t M = Q.size();
  if (lambdas.size() != M || M == 0) {
    throw ConfigError("build_coupled: need one auxiliary generator per variance state");
  }
  const std::size_t N = lambdas.front().size();
  for (const auto& L : lambdas) {
    if (L.size() != N) throw ConfigError("build_coupled: auxiliary generators differ in size");
  }
  const auto n = static_cast<Eigen::Index>(N * M);
  SparseGenerator G(n, n);
  G.reserve(Eigen::VectorXi::Constant(n, 5));
  for (std::size_t l = 0; l < M; ++l) {
    const auto& L = lambdas[l];
    for (std::size_t i = 0; i < N; ++i) {
      const auto row = static_cast<Eigen::Index>(l * N + i);
      if (l > 0 && Q.lower[l] != 0.0) G.insert(row, row - static_cast<Eigen::Index>(N)) = Q.lower[l];
      if (i > 0 && L.lower[i] != 0.0) G.insert(row, row - 1) = L.lower[i];
      G.insert(row, row) = Q.diag[l] + L.diag[i];
      if (i + 1 < N && L.upper[i] != 0.0) G.insert(row, row + 1) = L.upper[i];
      if (l + 1 < M && Q.upper[l] != 0.0) G.insert(row, row + static_cast<Eigen::Index>(N)) = Q.upper[l];
    }
  }
  G.makeCompressed();
  return G;
}

namespace {

struct RowStats {
  GeneratorReport report;
  bool any_offdiag = false;

  void add_row(double row_sum, double diag, double row_scale) {
    report.max_abs_row_sum = std::max(report.max_abs_row_sum, std::abs(row_sum));
    report.max_rel_row_sum = std::max(report.max_rel_row_sum, std::abs(row_sum) / std::max(1.0, row_scale));
    report.max_diag = std::max(report.max_diag, diag);
    report.nu = std::max(report.nu, std::abs(diag));
  }
  void add_offdiag(double value) {
    report.min_offdiag = any_offdiag ? std::min(report.min_offdiag, value) : value;
    any_offdiag = true;
    if (value < 0.0) ++report.negative_offdiag;
  }
};

}  // namespace

GeneratorReport validate_generator(const Tridiagonal& G) {
  RowStats st;
  const std::size_t n = G.size();
  st.report.max_diag = n ? G.diag[0] : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i > 0 ? G.lower[i] : 0.0;
    const double up = i + 1 < n ? G.upper[i] : 0.0;
    if (i > 0) st.add_offdiag(lo);
    if (i + 1 < n) st.add_offdiag(up);
    st.add_row(lo + G.diag[i] + up, G.diag[i], std::abs(G.diag[i]));
  }
  if (n > 0) {
    const bool first = G.diag[0] == 0.0 && (n < 2 || G.upper[0] == 0.0);
    const bool last = G.diag[n - 1] == 0.0 && (n < 2 || G.lower[n - 1] == 0.0);
    st.report.boundary_rows_zero = first && last;
  }
  return st.report;
}

GeneratorReport validate_generator(const SparseGenerator& G) {
  RowStats st;
  const Eigen::Index n = G.rows();
  bool first_diag = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0, diag = 0.0, scale = 0.0;
    bool zero_row = true;
    for (SparseGenerator::InnerIterator it(G, i); it; ++it) {
      sum += it.value();
      scale = std::max(scale, std::abs(it.value()));
      if (it.value() != 0.0) zero_row = false;
      if (it.col() == i) {
        diag = it.value();
      } else {
        st.add_offdiag(it.value());
      }
    }
    if (first_diag) {
      st.report.max_diag = diag;
      first_diag = false;
    }
    st.add_row(sum, diag, scale);
    if ((i == 0 || i == n - 1) && !zero_row) st.report.boundary_rows_zero = false;
  }
  return st.report;
}

GeneratorReport validate_generator(const Eigen::MatrixXd& G) {
  return validate_generator(SparseGenerator(G.sparseView(0.0, 0.0)));
}

GeneratorSet::GeneratorSet(Grid vgrid, Grid xgrid, Tridiagonal Q, std::vector<Tridiagonal> lambdas,
                           Provenance provenance)
    : vgrid_(std::move(vgrid)),
      xgrid_(std::move(xgrid)),
      Q_(std::move(Q)),
      lambdas_(std::move(lambdas)),
      provenance_(std::move(provenance)) {}

std::size_t GeneratorSet::repaired_nodes() const {
  std::size_t total = Q_.repaired_nodes;
  for (const auto& L : lambdas_) total += L.repaired_nodes;
  return total;
}

const SparseGenerator& GeneratorSet::coupled() const {
  std::call_once(coupled_->once,
                 [this] { coupled_->matrix = std::make_unique<SparseGenerator>(build_coupled(Q_, lambdas_)); });
  return *coupled_->matrix;
}

GeneratorSet build_generators(const ModelSpec& model, const MarketParams& market, const KernelSpec& kernel,
                              const GeneratorOptions& options) {
  kernel.validate();
  market.validate(model);
  Grid vgrid = build_variance_grid(options.M, market, model, options.vgrid);
  Grid xgrid = build_x_grid(options.N, market, model, kernel, options.xgrid);
  Tridiagonal Q = build_Q(vgrid, model, market, kernel, options.policy);
  std::vector<Tridiagonal> lambdas(vgrid.size());
  detail::parallel_for(vgrid.size(), options.threads, [&](std::size_t l) {
    lambdas[l] = build_Lambda(xgrid, vgrid.nodes[l], model, market, kernel, options.policy, options.theta);
  });
  Provenance prov{std::string(model.name()),
                  kernel.hurst,
                  kernel.eps,
                  market.S0,
                  market.V0,
                  market.rho,
                  std::string(negative_rate_policy_name(options.policy)),
                  std::string(theta_variant_name(options.theta))};
  return GeneratorSet(std::move(vgrid), std::move(xgrid), std::move(Q), std::move(lambdas), std::move(prov));
}

void write_triplets(std::ostream& out, const SparseGenerator& G) {
  out << "% " << G.rows() << ' ' << G.cols() << ' ' << G.nonZeros() << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < G.outerSize(); ++i) {
    for (SparseGenerator::InnerIterator it(G, i); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() << ' ' << it.col() << ' ' << buf << '\n';
    }
  }
}

void write_triplets(std::ostream& out, const Tridiagonal& G) { write_triplets(out, G.sparse()); }

}  // namespace roughchain
