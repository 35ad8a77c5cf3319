#include <gtest/gtest.h>

#include <random>

#include "eigenprior/verify.hpp"

namespace ep = eigenprior;

TEST(Verify, SmallRunsPass) {
  ep::VerifyOptions o;
  o.uniform_laplacian = 10;
  o.distance_identity = 10;
  o.dominance = 2;
  o.candidates = 100;
  o.accumulation = 5;
  o.svd = 2;
  const auto results = ep::run_all(o);
  ASSERT_EQ(results.size(), 5u);
  for (const auto& r : results) {
    EXPECT_TRUE(r.passed) << r.name << ": " << r.detail;
    EXPECT_LE(r.worst, r.tolerance) << r.name;
    EXPECT_GT(r.instances, 0u);
  }
}

TEST(Verify, SameSeedSameNumbers) {
  const auto a = ep::verify_distance_identity(7, 5);
  const auto b = ep::verify_distance_identity(7, 5);
  EXPECT_EQ(a.worst, b.worst);
}

TEST(Verify, PerturbedLaplacianIsCaught) {
  const auto r = ep::verify_distance_identity(20160601, 10, true);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.worst, r.tolerance);
  EXPECT_FALSE(r.detail.empty());
}

TEST(RandomOrthonormal, ColumnsAreOrthonormal) {
  std::mt19937_64 rng(3);
  const auto q = ep::random_orthonormal(9, 4, rng);
  EXPECT_LE((q.transpose() * q - ep::DenseMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(ep::random_orthonormal(5, 0, rng).cols(), 0);
}
