#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace roughchain {

/// Argument outside the mathematical domain of a kernel, transform or coefficient.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration or parameter set. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed (non-convergence, overflow, invalid rates).
/// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Central moment matching produced a negative off-diagonal rate.
class NegativeRateError : public NumericalError {
 public:
  NegativeRateError(std::string chain, std::size_t node, double value, std::size_t min_nodes)
      : NumericalError(chain + " generator: negative rate " + std::to_string(value) + " at node " +
                       std::to_string(node) + "; grid too coarse for the local drift (need about " +
                       std::to_string(min_nodes) + " nodes, or use the upwind policy)"),
        chain_(std::move(chain)),
        node_(node),
        value_(value),
        min_nodes_(min_nodes) {}

  const std::string& chain() const noexcept { return chain_; }
  std::size_t node() const noexcept { return node_; }
  double value() const noexcept { return value_; }
  std::size_t min_nodes() const noexcept { return min_nodes_; }

 private:
  std::string chain_;
  std::size_t node_;
  double value_;
  std::size_t min_nodes_;
};

}  // namespace roughchain
