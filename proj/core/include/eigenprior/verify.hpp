#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eigenprior/linalg.hpp"

namespace eigenprior {

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  double worst = 0.0;      // largest normalized error seen
  double tolerance = 0.0;  // bound on `worst`
  double seconds = 0.0;
  std::string detail;      // names the violated identity on failure
};

// Gaussian matrix, orthonormalized; `cols` may be 0.
DenseMatrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

// Each check draws its instances from its own stream derived from `seed`.
CheckResult verify_uniform_laplacian(std::uint64_t seed, std::size_t instances = 100);
// With `perturb`, an asymmetric bump is added to every Laplacian and the
// identity is evaluated without the strictness precondition, so it must fail.
CheckResult verify_distance_identity(std::uint64_t seed, std::size_t instances = 100, bool perturb = false);
CheckResult verify_dominance(std::uint64_t seed, std::size_t instances = 20,
                             std::size_t candidates = 1000);
CheckResult verify_accumulation(std::uint64_t seed, std::size_t instances = 50);
CheckResult verify_svd(std::uint64_t seed, std::size_t instances = 20);

struct VerifyOptions {
  std::uint64_t seed = 20160601;
  std::size_t uniform_laplacian = 100;
  std::size_t distance_identity = 100;
  std::size_t dominance = 20;
  std::size_t candidates = 1000;
  std::size_t accumulation = 50;
  std::size_t svd = 20;
  bool perturb_laplacian = false;
};

std::vector<CheckResult> run_all(const VerifyOptions& options);

}  // namespace eigenprior
