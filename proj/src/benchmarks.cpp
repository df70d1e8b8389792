#include "roughchain/benchmarks.hpp"

namespace roughchain {

std::string_view product_name(Product product) {
  switch (product) {
    case Product::european:
      return "european";
    case Product::barrier:
      return "barrier";
    case Product::american:
      return "american";
  }
  return "unknown";
}

double reference_price(ModelFamily family, Product product) {
  // columns: european, barrier, american
  static constexpr double table[6][3] = {
      {6.0545, 6.0492, 6.0635},  // rough Heston
      {0.0362, 0.0345, 0.0418},  // rough 4/2
      {6.0001, 5.9753, 6.1111},  // rough alpha-hypergeometric
      {4.9269, 4.8099, 6.0000},  // rough SABR
      {6.0018, 6.0000, 6.4410},  // rough Heston-SABR
      {6.0000, 5.9814, 7.1658},  // rough quadratic SLV
  };
  return table[static_cast<int>(family)][static_cast<int>(product)];
}

}  // namespace roughchain
