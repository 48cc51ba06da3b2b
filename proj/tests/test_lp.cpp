#include <gtest/gtest.h>

#include <random>

#include "vcache/lp.hpp"

using namespace vcache;

TEST(Simplex, TextbookMaximum) {
  lp::Problem p(2);
  p.set_objective(0, 3);
  p.set_objective(1, 5);
  p.add_le({{0, 1}}, 4);
  p.add_le({{1, 2}}, 12);
  p.add_le({{0, 3}, {1, 2}}, 18);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, 36.0, 1e-9);
  EXPECT_NEAR(r.x[0], 2.0, 1e-9);
  EXPECT_NEAR(r.x[1], 6.0, 1e-9);
}

// Beale's example cycles under textbook Dantzig pricing without an
// anti-cycling rule.
lp::Problem beale() {
  lp::Problem p(4);
  p.set_objective(0, 0.75);
  p.set_objective(1, -150);
  p.set_objective(2, 0.02);
  p.set_objective(3, -6);
  p.add_le({{0, 0.25}, {1, -60}, {2, -0.04}, {3, 9}}, 0);
  p.add_le({{0, 0.5}, {1, -90}, {2, -0.02}, {3, 3}}, 0);
  p.add_le({{2, 1}}, 1);
  return p;
}

TEST(Simplex, BealeTerminates) {
  const auto r = lp::solve(beale());
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, 0.05, 1e-9);
  lp::Options bland;
  bland.always_bland = true;
  const auto rb = lp::solve(beale(), bland);
  ASSERT_EQ(rb.status, lp::Status::optimal);
  EXPECT_NEAR(rb.objective, 0.05, 1e-9);
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // max -x - y, x + y >= 2, x <= 3
  lp::Problem p(2);
  p.set_objective(0, -1);
  p.set_objective(1, -1);
  p.add_ge({{0, 1}, {1, 1}}, 2);
  p.add_le({{0, 1}}, 3);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, -2.0, 1e-9);
}

TEST(Simplex, Equality) {
  lp::Problem p(3);
  p.set_objective(0, 1);
  p.set_objective(1, 2);
  p.set_objective(2, 3);
  p.add_eq({{0, 1}, {1, 1}, {2, 1}}, 1);
  p.add_le({{2, 1}}, 0.25);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_NEAR(r.objective, 0.75 * 2 + 0.25 * 3, 1e-9);
}

TEST(Simplex, Infeasible) {
  lp::Problem p(1);
  p.set_objective(0, 1);
  p.add_le({{0, 1}}, 1);
  p.add_ge({{0, 1}}, 2);
  EXPECT_EQ(lp::solve(p).status, lp::Status::infeasible);
}

TEST(Simplex, Unbounded) {
  lp::Problem p(2);
  p.set_objective(0, 1);
  p.add_le({{0, 1}, {1, -1}}, 1);
  EXPECT_EQ(lp::solve(p).status, lp::Status::unbounded);
}

TEST(Simplex, NoConstraints) {
  lp::Problem p(2);
  p.set_objective(0, -1);
  const auto r = lp::solve(p);
  ASSERT_EQ(r.status, lp::Status::optimal);
  EXPECT_DOUBLE_EQ(r.objective, 0.0);
}

namespace {

struct Halfplane {
  double a, b, rhs;  // a x + b y <= rhs
};

// Best objective over all vertices of the feasible polygon.
std::optional<double> vertex_oracle(const std::vector<Halfplane>& hs, double cx, double cy) {
  std::optional<double> best;
  for (std::size_t p = 0; p < hs.size(); ++p)
    for (std::size_t q = p + 1; q < hs.size(); ++q) {
      const double det = hs[p].a * hs[q].b - hs[p].b * hs[q].a;
      if (std::abs(det) < 1e-12) continue;
      const double x = (hs[p].rhs * hs[q].b - hs[p].b * hs[q].rhs) / det;
      const double y = (hs[p].a * hs[q].rhs - hs[p].rhs * hs[q].a) / det;
      bool ok = true;
      for (const auto& h : hs) ok = ok && h.a * x + h.b * y <= h.rhs + 1e-9;
      if (ok && (!best || cx * x + cy * y > *best)) best = cx * x + cy * y;
    }
  return best;
}

}  // namespace

TEST(Simplex, RandomTwoVariableProgramsMatchVertexEnumeration) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> coef(-5, 5), rhs(-2, 10);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Halfplane> hs{{-1, 0, 0}, {0, -1, 0}, {1, 0, 10}, {0, 1, 10}};
    lp::Problem p(2);
    const double cx = coef(rng), cy = coef(rng);
    p.set_objective(0, cx);
    p.set_objective(1, cy);
    p.add_le({{0, 1}}, 10);
    p.add_le({{1, 1}}, 10);
    for (int c = 0; c < 4; ++c) {
      Halfplane h{coef(rng), coef(rng), rhs(rng)};
      hs.push_back(h);
      p.add_le({{0, h.a}, {1, h.b}}, h.rhs);
    }
    const auto want = vertex_oracle(hs, cx, cy);
    const auto got = lp::solve(p);
    if (!want) {
      EXPECT_EQ(got.status, lp::Status::infeasible) << trial;
      continue;
    }
    ++feasible;
    ASSERT_EQ(got.status, lp::Status::optimal) << trial;
    EXPECT_NEAR(got.objective, *want, 1e-7 * (1 + std::abs(*want))) << trial;
  }
  EXPECT_GT(feasible, 50);
}
