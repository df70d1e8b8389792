#include "roughchain/grids.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "roughchain/errors.hpp"

namespace roughchain {

std::string_view grid_style_name(GridStyle style) {
  return style == GridStyle::uniform ? "uniform" : "piecewise-uniform";
}

GridStyle parse_grid_style(std::string_view name) {
  if (name == "uniform") return GridStyle::uniform;
  if (name == "piecewise-uniform") return GridStyle::piecewise_uniform;
  throw ConfigError("unknown grid style '" + std::string(name) + "' (expected uniform or piecewise-uniform)");
}

std::vector<double> Grid::spacings() const {
  std::vector<double> h(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) h[i] = nodes[i] - nodes[i - 1];
  return h;
}

double Grid::max_spacing() const {
  double m = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) m = std::max(m, nodes[i] - nodes[i - 1]);
  return m;
}

namespace {

void check_regularity(const Grid& grid, double regularity, bool check_variation) {
  const double n = static_cast<double>(grid.size());
  const double range = grid.back() - grid.front();
  const auto h = grid.spacings();
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (!(h[i] > 0.0)) {
      throw ConfigError("grid: nodes not strictly increasing at index " + std::to_string(i));
    }
    if (h[i] > regularity * range / n) {
      throw ConfigError("grid: spacing " + std::to_string(h[i]) + " at index " + std::to_string(i) +
                        " exceeds C/n; increase the node count");
    }
    if (check_variation && i + 1 < h.size() && std::abs(h[i] - h[i + 1]) > regularity * range / (n * n)) {
      throw ConfigError("grid: adjacent spacings differ by " + std::to_string(std::abs(h[i] - h[i + 1])) +
                        " at index " + std::to_string(i) + ", above C/n^2; increase the node count");
    }
  }
}

}  // namespace

Grid build_grid(std::size_t n, double lo, double hi, double anchor, const GridOptions& options) {
  if (n < 3) throw ConfigError("grid: need at least 3 nodes, got " + std::to_string(n));
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < anchor && anchor < hi)) {
    throw ConfigError("grid: bounds must satisfy lo < anchor < hi (lo=" + std::to_string(lo) +
                      ", anchor=" + std::to_string(anchor) + ", hi=" + std::to_string(hi) + ")");
  }
  Grid grid;
  grid.nodes.resize(n);
  const double last = static_cast<double>(n - 1);

  if (options.style == GridStyle::piecewise_uniform) {
    auto k = static_cast<std::size_t>(std::lround((anchor - lo) / (hi - lo) * last));
    k = std::clamp<std::size_t>(k, 1, n - 2);
    const double hl = (anchor - lo) / static_cast<double>(k);
    const double hr = (hi - anchor) / static_cast<double>(n - 1 - k);
    for (std::size_t i = 0; i < k; ++i) grid.nodes[i] = lo + static_cast<double>(i) * hl;
    for (std::size_t i = k + 1; i + 1 < n; ++i) grid.nodes[i] = anchor + static_cast<double>(i - k) * hr;
    grid.nodes[k] = anchor;
    grid.nodes[n - 1] = hi;
    grid.anchor_index = k;
  } else {
    const double h = (hi - lo) / last;
    for (std::size_t i = 0; i + 1 < n; ++i) grid.nodes[i] = lo + static_cast<double>(i) * h;
    grid.nodes[n - 1] = hi;
    auto k = static_cast<std::size_t>(std::lround((anchor - lo) / h));
    k = std::clamp<std::size_t>(k, 1, n - 2);
    grid.nodes[k] = anchor;
    grid.anchor_index = k;
  }
  check_regularity(grid, options.regularity, options.style == GridStyle::piecewise_uniform);
  return grid;
}

Grid build_variance_grid(std::size_t M, const MarketParams& market, const ModelSpec& model,
                         const GridOptions& options) {
  const GridBounds b = options.bounds.value_or(GridBounds{1e-3 * market.V0, 4.0 * market.V0});
  if (!model.variance_in_domain(b.lo)) {
    throw ConfigError("variance grid: lower bound " + std::to_string(b.lo) + " outside the variance domain");
  }
  Grid grid = build_grid(M, b.lo, b.hi, market.V0, options);
  for (double v : grid.nodes) {
    if (!(model.phi(v) > 0.0) || !(model.sigma(v) > 0.0)) {
      throw ConfigError("variance grid: phi or sigma not positive at v=" + std::to_string(v));
    }
  }
  return grid;
}

double auxiliary_initial_state(const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel) {
  return model.g(market.S0) - market.rho * model.f(market.V0, kernel);
}

GridBounds default_x_bounds(const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel) {
  const double x0 = auxiliary_initial_state(market, model, kernel);
  const double scale = std::abs(x0);
  GridBounds b{x0 - 0.999 * scale, x0 + 3.0 * scale};
  const auto [g_lo, g_hi] = model.g_range();
  const double shift = market.rho * model.f(market.V0, kernel);
  if (std::isfinite(g_hi) && b.hi + shift >= g_hi) b.hi = model.g(4.0 * market.S0) - shift;
  if (std::isfinite(g_lo) && b.lo + shift <= g_lo) b.lo = x0 - 0.999 * (x0 + shift - g_lo);
  return b;
}

Grid build_x_grid(std::size_t N, const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel,
                  const GridOptions& options) {
  const double x0 = auxiliary_initial_state(market, model, kernel);
  const GridBounds b = options.bounds.value_or(default_x_bounds(market, model, kernel));
  return build_grid(N, b.lo, b.hi, x0, options);
}

std::size_t locate(const Grid& grid, double value) {
  if (grid.nodes.empty() || !(value >= grid.front() && value <= grid.back())) {
    throw DomainError("locate: value " + std::to_string(value) + " outside the grid");
  }
  const auto it = std::lower_bound(grid.nodes.begin(), grid.nodes.end(), value);
  const auto hi = static_cast<std::size_t>(it - grid.nodes.begin());
  if (grid.nodes[hi] == value || hi == 0) return hi;
  const std::size_t lo = hi - 1;
  return (grid.nodes[hi] - value < value - grid.nodes[lo]) ? hi : lo;
}

void write_grid_csv(std::ostream& out, const Grid& grid) {
  out << "index,node,spacing\n";
  const auto h = grid.spacings();
  char buf[64];
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", grid.nodes[i], h[i]);
    out << i << ',' << buf << '\n';
  }
}

}  // namespace roughchain
