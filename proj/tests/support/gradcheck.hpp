#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jamlab/common/rng.hpp"
#include "jamlab/fusion_net/tensor.hpp"

namespace jamlab::testing {

using fusion_net::Tensor;

// Inputs are leaves that require grad; f rebuilds the op output from them.
struct GradProblem {
  std::vector<Tensor> inputs;
  std::function<Tensor()> f;
};

struct GradCase {
  std::string name;
  std::function<GradProblem(Rng&)> make;
};

struct GradReport {
  std::string name;
  std::size_t sampled = 0;
  std::size_t passed = 0;
  double worst_rel = 0.0;
  bool ok() const { return sampled > 0 && passed == sampled; }
};

// Projects the output on fixed random weights, then compares backward()
// against central differences at `samples` coordinates drawn across inputs.
// Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradReport run_grad_case(const GradCase& c, std::uint64_t seed, std::size_t samples = 50, double eps = 1e-4,
                         double tol = 1e-3);

// Random leaf with entries in +-[0.05, 1], away from relu kinks.
Tensor rand_leaf(fusion_net::Shape shape, Rng& rng, double scale = 1.0);
// Distinct, well separated values (for max-pooling).
Tensor distinct_leaf(fusion_net::Shape shape, Rng& rng);

std::vector<GradCase> fusion_net_grad_cases();
// Whole networks; a step of 1e-4 in a first-layer weight can flip ReLUs
// further down, so these are checked with a smaller step.
std::vector<GradCase> fusion_net_network_cases();
inline constexpr double kNetworkEps = 1e-6;
std::vector<GradCase> q_forge_grad_cases();

}  // namespace jamlab::testing
