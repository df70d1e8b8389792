#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "roughchain/kernel.hpp"
#include "roughchain/models.hpp"

namespace roughchain {

enum class GridStyle {
  uniform,            ///< equispaced, nearest interior node moved onto the anchor
  piecewise_uniform,  ///< two uniform pieces meeting exactly at the anchor
};

std::string_view grid_style_name(GridStyle style);
GridStyle parse_grid_style(std::string_view name);

struct Grid {
  std::vector<double> nodes;
  std::size_t anchor_index = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  double front() const { return nodes.front(); }
  double back() const { return nodes.back(); }
  double anchor() const { return nodes[anchor_index]; }
  /// h_i = nodes[i] - nodes[i-1]; element 0 is unused and set to 0.
  std::vector<double> spacings() const;
  double max_spacing() const;
};

struct GridBounds {
  double lo;
  double hi;
};

struct GridOptions {
  GridStyle style = GridStyle::piecewise_uniform;
  std::optional<GridBounds> bounds;
  /// Regularity constant: max h <= C (hi - lo) / n and
  /// max |h_i - h_{i+1}| <= C (hi - lo) / n^2 (piecewise-uniform only).
  double regularity = 8.0;
};

/// Grid on [lo, hi] with `anchor` as an exact node.
Grid build_grid(std::size_t n, double lo, double hi, double anchor, const GridOptions& options);

/// Variance grid, by default on [1e-3 V0, 4 V0].
Grid build_variance_grid(std::size_t M, const MarketParams& market, const ModelSpec& model,
                         const GridOptions& options = {});

/// X0 = g(S0) - rho f(V0).
double auxiliary_initial_state(const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel);

/// Default auxiliary bounds: [1e-3 X0, 4 X0] for positive X0, mirrored
/// around X0 otherwise, with the upper end capped at g(4 S0) - rho f(V0)
/// when 4 X0 would leave the range of g.
GridBounds default_x_bounds(const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel);

Grid build_x_grid(std::size_t N, const MarketParams& market, const ModelSpec& model, const KernelSpec& kernel,
                  const GridOptions& options = {});

/// Nearest node; ties go to the lower index. Throws DomainError outside
/// [front, back].
std::size_t locate(const Grid& grid, double value);

/// Columns: index,node,spacing (17 significant digits).
void write_grid_csv(std::ostream& out, const Grid& grid);

}  // namespace roughchain
