#include <gtest/gtest.h>

#include <cmath>

#include "sable/attacks.hpp"

namespace {

using namespace sable;

RealMatrix honest_set() { return RealMatrix::from_rows({{1.0, 4.0}, {3.0, 0.0}, {2.0, 2.0}, {6.0, 2.0}}); }

TEST(Attacks, Parse) {
  EXPECT_EQ(parse_attack("FOE"), AttackKind::FOE);
  EXPECT_EQ(parse_attack("alie"), AttackKind::ALIE);
  EXPECT_EQ(parse_attack("LabelFlip"), AttackKind::LF);
  EXPECT_EQ(parse_attack("LF"), AttackKind::LF);
  EXPECT_EQ(parse_attack("mimic"), AttackKind::Mimic);
  EXPECT_EQ(parse_attack("none"), AttackKind::None);
  EXPECT_THROW(parse_attack("gauss"), ValidationError);
  for (auto k : {AttackKind::None, AttackKind::FOE, AttackKind::ALIE, AttackKind::LF, AttackKind::Mimic}) {
    EXPECT_EQ(parse_attack(to_string(k)), k);
  }
}

TEST(Attacks, DefaultGrid) {
  const auto g = default_tau_grid();
  ASSERT_EQ(g.size(), 41U);
  EXPECT_DOUBLE_EQ(g.front(), -10.0);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  EXPECT_DOUBLE_EQ(g[21] - g[20], 0.5);
}

TEST(Attacks, FoeScalesTheMean) {
  const auto h = honest_set();
  EXPECT_EQ(foe(h, 0.0), (std::vector<double>{3.0, 2.0}));
  EXPECT_EQ(foe(h, 2.0), (std::vector<double>{-3.0, -2.0}));  // sign flip
  EXPECT_EQ(foe(h, 1.0), (std::vector<double>{0.0, 0.0}));
}

TEST(Attacks, AlieShiftsBySigma) {
  const auto h = honest_set();
  // column 0: mean 3, population variance (4 + 0 + 1 + 9) / 4 = 3.5
  // column 1: mean 2, population variance (4 + 4 + 0 + 0) / 4 = 2
  const auto v = alie(h, 1.5);
  EXPECT_NEAR(v[0], 3.0 + 1.5 * std::sqrt(3.5), 1e-12);
  EXPECT_NEAR(v[1], 2.0 + 1.5 * std::sqrt(2.0), 1e-12);
}

TEST(Attacks, OptimizeTauMaximisesDeviation) {
  const auto h = honest_set();
  const std::vector<double> grid{-1.0, 0.0, 1.0, 3.0};
  const Aggregator mean = [](const RealMatrix& x) { return column_mean(x); };
  // With the mean, the deviation grows with |tau|; the largest |tau| wins.
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, mean, grid, 2), 3.0);
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::ALIE, h, mean, grid, 2), 3.0);
  // Independent check: brute-force distances.
  double best = -1, best_tau = 0;
  const Aggregator trimmed = [](const RealMatrix& x) { return cwtm(x, 1); };
  for (double tau : grid) {
    RealMatrix all = h;
    const auto v = foe(h, tau);
    all.append_row(v);
    const auto out = trimmed(all);
    const double dist = std::pow(out[0] - 3.0, 2) + std::pow(out[1] - 2.0, 2);
    if (dist > best) {
      best = dist;
      best_tau = tau;
    }
  }
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, trimmed, grid, 1), best_tau);
}

TEST(Attacks, OptimizeTauTiesKeepFirstAndSingleGrid) {
  const auto h = RealMatrix::from_rows({{1.0}, {1.0}});
  const Aggregator mean = [](const RealMatrix& x) { return column_mean(x); };
  // Under the mean the deviation is |tau| * mean / 3, so tau = 2 and -2 tie.
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, mean, std::vector<double>{2.0, -2.0, 1.0}, 1), 2.0);
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, mean, std::vector<double>{-2.0, 2.0, 1.0}, 1), -2.0);
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::ALIE, h, mean, std::vector<double>{7.0}, 1), 7.0);
  EXPECT_THROW(optimize_tau(AttackKind::ALIE, h, mean, std::vector<double>{}, 1), ValidationError);
}

TEST(Attacks, ProjectionAppliedBeforeAggregation) {
  const auto h = RealMatrix::from_rows({{1.0}, {2.0}});
  const Aggregator mean = [](const RealMatrix& x) { return column_mean(x); };
  const Projection clip = [](std::vector<double> v) {
    for (auto& x : v) x = std::clamp(x, -2.0, 2.0);
    return v;
  };
  // Unclipped the two candidates 16.5 and -13.5 are equally far from the mean
  // and the first wins; clipped to 2 and -2 only the negative one hurts.
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, mean, std::vector<double>{-10.0, 10.0}, 1), -10.0);
  EXPECT_DOUBLE_EQ(optimize_tau(AttackKind::FOE, h, mean, std::vector<double>{-10.0, 10.0}, 1, clip), 10.0);
}

TEST(Attacks, LabelFlip) {
  EXPECT_EQ(labelflip(0, 10), 9);
  EXPECT_EQ(labelflip(9, 10), 0);
  EXPECT_EQ(labelflip(4, 10), 5);
  for (int l = 0; l < 10; ++l) EXPECT_EQ(labelflip(labelflip(l, 10), 10), l);
  EXPECT_THROW(labelflip(10, 10), ValidationError);
}

TEST(Attacks, MimicCopiesAnHonestVector) {
  // Spread lies along the first axis; node 3 is the most extreme.
  const auto h = RealMatrix::from_rows({{0.0, 0.0}, {1.0, 0.1}, {-1.0, -0.1}, {5.0, 0.0}});
  MimicState st;
  auto [v, next] = mimic(h, st);
  EXPECT_EQ(v, (std::vector<double>{5.0, 0.0}));
  EXPECT_EQ(next.steps, 1U);
  EXPECT_NEAR(std::hypot(next.direction[0], next.direction[1]), 1.0, 1e-12);
  auto [v2, next2] = mimic(h, next);
  EXPECT_EQ(v2, v);
  EXPECT_EQ(next2.steps, 2U);
}

TEST(Attacks, MimicIdenticalVectors) {
  const auto h = RealMatrix::from_rows({{1.0, 2.0}, {1.0, 2.0}});
  auto [v, st] = mimic(h, MimicState{});
  EXPECT_EQ(v, (std::vector<double>{1.0, 2.0}));
  EXPECT_NEAR(st.direction[0], 1.0 / std::sqrt(2.0), 1e-12);
}

}  // namespace
