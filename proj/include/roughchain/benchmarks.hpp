#pragma once

#include <string_view>

#include "roughchain/models.hpp"

namespace roughchain {

enum class Product { european, barrier, american };

std::string_view product_name(Product product);

/// Published Monte Carlo reference prices for the reference parameter set
/// (call, D = 4, T = 1; barrier L = 2, U = 15; American via LSMC).
double reference_price(ModelFamily family, Product product);

}  // namespace roughchain
