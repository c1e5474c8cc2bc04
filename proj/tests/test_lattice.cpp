#include <gtest/gtest.h>

#include <set>

#include "herzflow/lattice.hpp"

using namespace herzflow;

TEST(Lattice, RejectsInvalidParameters) {
  EXPECT_THROW(FrequencyLattice(0.0, 2), ParameterError);
  EXPECT_THROW(FrequencyLattice(-1.0, 2), ParameterError);
  EXPECT_THROW(FrequencyLattice(1.0, 0), ParameterError);
  EXPECT_THROW(FrequencyLattice(1.0, 65), ParameterError);
  EXPECT_THROW(FrequencyLattice(std::nan(""), 2), ParameterError);
}

TEST(Lattice, ModeCountExcludesZero) {
  for (int K : {1, 2, 3, 8}) {
    const auto L = make_lattice(0.5, K);
    const std::size_t D = 2 * K + 1;
    EXPECT_EQ(L.size(), D * D * D);
    EXPECT_EQ(L.mode_count(), D * D * D - 1);
    EXPECT_FALSE(L.is_mode(L.zero_index()));
    EXPECT_EQ(L.coords(L.zero_index()), (IVec3{0, 0, 0}));
  }
}

TEST(Lattice, MirrorNegatesCoordinates) {
  const auto L = make_lattice(1.0, 3);
  for (std::size_t n = 0; n < L.size(); ++n) {
    const auto& c = L.coords(n);
    const auto& m = L.coords(L.mirror(n));
    EXPECT_EQ(m, (IVec3{-c[0], -c[1], -c[2]}));
    EXPECT_EQ(L.mirror(L.mirror(n)), n);
  }
}

TEST(Lattice, IndexRoundTripAndOrdering) {
  const auto L = make_lattice(0.25, 2);
  std::set<std::size_t> seen;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      for (int l = -2; l <= 2; ++l) {
        const IVec3 k{i, j, l};
        const auto n = L.index_of(k);
        if (i == 0 && j == 0 && l == 0) {
          EXPECT_FALSE(n.has_value());
          continue;
        }
        ASSERT_TRUE(n.has_value());
        EXPECT_EQ(L.coords(*n), k);
        EXPECT_DOUBLE_EQ(L.xi(*n)[1], 0.25 * j);
        EXPECT_NEAR(L.norm(*n), 0.25 * std::sqrt(double(i * i + j * j + l * l)), 1e-15);
        seen.insert(*n);
      }
  EXPECT_EQ(seen.size(), L.mode_count());
  EXPECT_FALSE(L.index_of({3, 0, 0}).has_value());
  // lexicographic: the last coordinate varies fastest
  EXPECT_EQ(*L.index_of({-2, -2, -1}), *L.index_of({-2, -2, -2}) + 1);
}

TEST(Lattice, EqualityByParameters) {
  EXPECT_TRUE(make_lattice(1.0, 2) == make_lattice(1.0, 2));
  EXPECT_FALSE(make_lattice(1.0, 2) == make_lattice(1.0, 3));
  EXPECT_FALSE(make_lattice(1.0, 2) == make_lattice(0.5, 2));
}

TEST(SpectralField, SetModeFillsConjugatePartner) {
  const auto L = make_lattice(1.0, 2);
  SpectralField u(L);
  u.set_mode({1, -1, 0}, {Complex(1, 2), Complex(0, -1), 3.0});
  const auto n = *L.index_of({1, -1, 0});
  const auto m = *L.index_of({-1, 1, 0});
  EXPECT_EQ(u[m][0], Complex(1, -2));
  EXPECT_EQ(u[m][1], Complex(0, 1));
  EXPECT_EQ(u[n][2], Complex(3, 0));
  EXPECT_EQ(u.nonzero_count(), 2u);
  EXPECT_EQ(u.hermitian_defect(), 0.0);
}

TEST(SpectralField, ComplexFieldLeavesPartnerAlone) {
  const auto L = make_lattice(1.0, 1);
  SpectralField u(L, false);
  u.set_mode({1, 0, 0}, {1.0, 0.0, 0.0});
  EXPECT_EQ(u.nonzero_count(), 1u);
  EXPECT_GT(u.hermitian_defect(), 0.0);
}

TEST(SpectralField, RejectsZeroModeAndOutside) {
  const auto L = make_lattice(1.0, 1);
  SpectralField u(L);
  EXPECT_THROW(u.set_mode({0, 0, 0}, {1.0, 0.0, 0.0}), ParameterError);
  EXPECT_THROW(u.set_mode({2, 0, 0}, {1.0, 0.0, 0.0}), ParameterError);
}

TEST(SpectralField, ArithmeticNeedsSameLattice) {
  SpectralField a(make_lattice(1.0, 1)), b(make_lattice(1.0, 2));
  EXPECT_THROW(a + b, MismatchError);
  SpectralField c(make_lattice(1.0, 1));
  c.set_mode({0, 1, 0}, {0.0, 0.0, 2.0});
  const auto d = c - scaled(c, 0.5);
  EXPECT_EQ(d[*c.lattice().index_of({0, 1, 0})][2], Complex(1.0, 0.0));
}

TEST(TimeGrid, NodesAndEndpoint) {
  const TimeGrid g(0.3, 7);
  EXPECT_EQ(g.nodes(), 8u);
  EXPECT_EQ(g.time(7), 0.3);
  EXPECT_DOUBLE_EQ(g.time(3), 3 * 0.3 / 7);
  EXPECT_THROW(TimeGrid(0.0, 4), ParameterError);
  EXPECT_THROW(TimeGrid(1.0, 0), ParameterError);
}

TEST(Trajectory, ValidatesShape) {
  const auto L = make_lattice(1.0, 1);
  const TimeGrid g(1.0, 2);
  EXPECT_THROW(Trajectory(g, std::vector<SpectralField>(2, SpectralField(L))), ParameterError);
  std::vector<SpectralField> mixed{SpectralField(L), SpectralField(L), SpectralField(make_lattice(1.0, 2))};
  EXPECT_THROW(Trajectory(g, mixed), MismatchError);
  const Trajectory zero(g, L);
  EXPECT_EQ(zero.size(), 3u);
  EXPECT_THROW(trajectory_axpy(1.0, zero, Trajectory(TimeGrid(1.0, 3), L)), MismatchError);
}
