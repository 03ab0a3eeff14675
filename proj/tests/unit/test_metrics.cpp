#include <gtest/gtest.h>

#include "homconv/metrics.hpp"
#include "oracles.hpp"

using namespace homconv;

TEST(Metrics, WorkedBinaryExample) {
  const ConfusionMatrix cm(2, {45, 5, 10, 40});
  EXPECT_NEAR(accuracy(cm), 0.85, 1e-12);
  EXPECT_NEAR(macro_f1(cm), 0.8497, 1e-4);
  EXPECT_NEAR(mcc(cm), 0.7035, 1e-4);
  const auto o = oracle::binary_metrics(45, 5, 10, 40);
  EXPECT_NEAR(macro_f1(cm), o.macro_f1, 1e-12);
  EXPECT_NEAR(mcc(cm), o.mcc, 1e-12);
}

TEST(Metrics, MajorityPredictor) {
  const ConfusionMatrix cm(2, {90, 0, 10, 0});
  EXPECT_NEAR(macro_f1(cm), 0.4737, 1e-4);
  EXPECT_DOUBLE_EQ(accuracy(cm), 0.9);
  EXPECT_EQ(mcc(cm), 0.0);
}

TEST(Metrics, PerfectAndInverted) {
  const ConfusionMatrix perfect(3, {4, 0, 0, 0, 5, 0, 0, 0, 6});
  EXPECT_EQ(accuracy(perfect), 1.0);
  EXPECT_EQ(macro_f1(perfect), 1.0);
  EXPECT_DOUBLE_EQ(mcc(perfect), 1.0);
  const ConfusionMatrix inverted(2, {0, 7, 3, 0});
  EXPECT_EQ(accuracy(inverted), 0.0);
  EXPECT_DOUBLE_EQ(mcc(inverted), -1.0);
}

TEST(Metrics, EmptyMatrixThrows) {
  const ConfusionMatrix empty(2);
  EXPECT_THROW(accuracy(empty), DataError);
  EXPECT_THROW(macro_f1(empty), DataError);
  EXPECT_THROW(mcc(empty), DataError);
  EXPECT_THROW(ConfusionMatrix(2, {1, 2, 3}), DataError);
  EXPECT_THROW(ConfusionMatrix(2, {1, -2, 3, 4}), DataError);
}

TEST(Metrics, FromLabels) {
  const std::vector<int> truth{0, 0, 1, 1, 2};
  const std::vector<int> pred{0, 1, 1, 1, 0};
  const auto cm = ConfusionMatrix::from_labels(truth, pred, 3);
  EXPECT_EQ(cm(0, 1), 1);
  EXPECT_EQ(cm(2, 0), 1);
  EXPECT_EQ(cm.total(), 5);
  EXPECT_THROW(ConfusionMatrix::from_labels(truth, std::vector<int>{0, 0, 0, 0, 3}, 3), DataError);
}

TEST(Metrics, PermutationInvariantAndBinaryAgreement) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 2 + rng.uniform_index(4);
    std::vector<std::int64_t> counts(c * c);
    for (auto& v : counts) v = static_cast<std::int64_t>(rng.uniform_index(20));
    counts[0] += 1;
    const ConfusionMatrix cm(c, counts);
    std::vector<std::size_t> perm(c);
    for (std::size_t i = 0; i < c; ++i) perm[i] = i;
    rng.shuffle(std::span<std::size_t>(perm));
    std::vector<std::int64_t> permuted(c * c);
    for (std::size_t a = 0; a < c; ++a)
      for (std::size_t b = 0; b < c; ++b) permuted[perm[a] * c + perm[b]] = counts[a * c + b];
    const ConfusionMatrix pm(c, permuted);
    EXPECT_NEAR(accuracy(cm), accuracy(pm), 1e-15);
    EXPECT_NEAR(macro_f1(cm), macro_f1(pm), 1e-12);
    EXPECT_NEAR(mcc(cm), mcc(pm), 1e-12);
    EXPECT_GE(mcc(cm), -1.0);
    EXPECT_LE(mcc(cm), 1.0);
    if (c == 2) {
      const auto o = oracle::binary_metrics(double(counts[0]), double(counts[1]), double(counts[2]), double(counts[3]));
      EXPECT_NEAR(mcc(cm), o.mcc, 1e-12);
      EXPECT_NEAR(macro_f1(cm), o.macro_f1, 1e-12);
    }
  }
}
