#include <gtest/gtest.h>

#include <random>

#include "bcn/stp.hpp"
#include "oracles.hpp"

using namespace bcn;

TEST(CanonicalVector, RejectsOutOfRangeIndex) {
  EXPECT_THROW(CanonicalVector(4, 0), DimensionError);
  EXPECT_THROW(CanonicalVector(4, 5), DimensionError);
  EXPECT_EQ(CanonicalVector(4, 4).index(), 4u);
}

TEST(Encoding, CornersAndRoundTrip) {
  EXPECT_EQ(encode_state({{1, 1, 1}}), CanonicalVector(8, 1));
  EXPECT_EQ(encode_state({{0, 0, 0}}), CanonicalVector(8, 8));
  EXPECT_EQ(encode_state({{1, 0, 1}}), CanonicalVector(8, 3));
  for (std::size_t x = 1; x <= 16; ++x) EXPECT_EQ(encode_state(decode_state(CanonicalVector(16, x), 4)).index(), x);
}

TEST(Encoding, MatchesKroneckerOfBits) {
  for (std::size_t x = 1; x <= 8; ++x) {
    const auto bits = decode_state(CanonicalVector(8, x), 3);
    CanonicalVector acc(2, bits.bits[0] ? 1 : 2);
    for (std::size_t i = 1; i < 3; ++i) acc = kron(acc, CanonicalVector(2, bits.bits[i] ? 1 : 2));
    EXPECT_EQ(acc.index(), x);
  }
}

TEST(Stp, DegeneratesToMatrixProduct) {
  RationalMatrix a(2, 2, {1, 2, 3, 4}), b(2, 1, {5, 6});
  EXPECT_EQ(stp(a, b), a * b);
}

TEST(Stp, KnownMixedShape) {
  // [1 2 3 4] (1x4) times (2x1): (A)(B kron I2)
  RationalMatrix a(1, 4, {1, 2, 3, 4}), b(2, 1, {1, 0});
  EXPECT_EQ(stp(a, b), RationalMatrix(1, 2, {1, 2}));
}

TEST(Stp, LogicalAgreesWithDenseOracle) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const std::size_t dims[] = {1, 2, 4, 8};
    const auto a = gen::random_logical(dims[rng() % 4], dims[rng() % 4], rng);
    const auto b = gen::random_logical(dims[rng() % 4], dims[rng() % 4], rng);
    EXPECT_EQ(oracle::to_dense(stp(a, b)), oracle::stp(oracle::to_dense(a), oracle::to_dense(b)));
    EXPECT_EQ(stp(a, b).densify(), stp(a.densify(), b.densify()));
  }
}

TEST(Stp, ActionOnCanonicalVectorsSelectsColumn) {
  const auto f = delta(8, {2, 3, 3, 3, 7, 7, 8, 8, 4, 4, 6, 6, 8, 8, 5, 5});
  const auto u2 = LogicalMatrix::from_vector(CanonicalVector(2, 2));
  const auto x3 = LogicalMatrix::from_vector(CanonicalVector(8, 3));
  EXPECT_EQ(stp(stp(f, u2), x3).column(1), 6u);
  EXPECT_EQ(successor(f, 2, 3), 6u);
}

TEST(Swap, ExchangesFactors) {
  for (std::size_t m = 1; m <= 4; ++m)
    for (std::size_t n = 1; n <= 4; ++n)
      for (std::size_t i = 1; i <= m; ++i)
        for (std::size_t j = 1; j <= n; ++j)
          EXPECT_EQ(swap_matrix(m, n).apply(kron(CanonicalVector(m, i), CanonicalVector(n, j))),
                    kron(CanonicalVector(n, j), CanonicalVector(m, i)));
}

TEST(PowerReducing, SquaresCanonicalVectors) {
  for (std::size_t d = 1; d <= 16; ++d)
    for (std::size_t i = 1; i <= d; ++i)
      EXPECT_EQ(power_reducing_matrix(d).apply(CanonicalVector(d, i)), kron(CanonicalVector(d, i), CanonicalVector(d, i)));
}

TEST(StructureMatrix, Conjunction) {
  // inputs in encoded order: (1,1), (1,0), (0,1), (0,0)
  const std::uint8_t table[] = {1, 0, 0, 0};
  EXPECT_EQ(structure_matrix(table), delta(2, {1, 2, 2, 2}));
}

TEST(Permutation, IsInvolution) {
  for (std::size_t k = 1; k <= 8; ++k) {
    const auto p = equilibrium_permutation(k, 8);
    EXPECT_EQ(stp(p, p), LogicalMatrix::identity(8));
    EXPECT_EQ(p.column(k), 8u);
  }
}

TEST(Capacity, DenseAndLogicalCaps) {
  EXPECT_THROW(kron(RationalMatrix::identity(1 << 7), RationalMatrix::identity(1 << 7)), CapacityError);
  EXPECT_THROW(kron(LogicalMatrix::identity(1 << 15), LogicalMatrix::identity(1 << 15)), CapacityError);
}

TEST(Shapes, MismatchedProductThrows) {
  EXPECT_THROW(RationalMatrix(2, 3) * RationalMatrix(2, 3), DimensionError);
  EXPECT_THROW(LogicalMatrix(2, {1, 3}), DimensionError);
}
