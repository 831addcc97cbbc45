#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

namespace {

/// Direct transcription of the definition: max descent quotient over the
/// closed ball, nullopt when the ball holds no other point.
std::optional<double> brute_slope(const MetricSpace& s, const ScalarField& u, PointId x, double r) {
  std::optional<double> best;
  for (PointId y = 0; y < s.size(); ++y) {
    double d = s.dist(x, y);
    if (y == x || d > r || !u.defined(y)) continue;
    double q = std::max(u[x] - u[y], 0.0) / d;
    if (!best || q > *best) best = q;
  }
  return best;
}

/// Reported value by the rule: smallest radius whose ball holds at least
/// `k` candidates, else the smallest nonempty one, else 0.
double brute_reported(const MetricSpace& s, const ScalarField& u, PointId x, const RadiusSchedule& sch) {
  std::optional<double> fallback;
  for (auto it = sch.radii.rbegin(); it != sch.radii.rend(); ++it) {
    std::size_t count = 0;
    for (PointId y = 0; y < s.size(); ++y) count += y != x && u.defined(y) && s.dist(x, y) <= *it;
    auto v = brute_slope(s, u, x, *it);
    if (v && !fallback) fallback = v;
    if (count >= static_cast<std::size_t>(sch.min_neighbors)) return *v;
  }
  return fallback.value_or(0.0);
}

}  // namespace

TEST(SlopeAtScale, ConstantFieldIsFlat) {
  GallerySpace g = build_interval(21);
  ScalarField u = ScalarField::constant(21, 3.0);
  for (double r : {0.05, 0.2, 1.0}) EXPECT_EQ(*slope_at_scale(*g.space, u, 10, r), 0.0);
  EXPECT_FALSE(slope_at_scale(*g.space, u, 10, 0.01).has_value());
}

TEST(SlopeAtScale, UndefinedFieldInBall) {
  GallerySpace g = build_interval(5);
  ScalarField u({0, 1, 2, 3, 4}, {true, true, false, true, true});
  try {
    slope_at_scale(*g.space, u, 1, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::undefined_field);
  }
  EXPECT_EQ(*slope_at_scale(*g.space, u, 1, 0.3, UndefinedPolicy::skip), 4.0);
}

TEST(SlopeAtScale, PatoLimitHasSlopeTwoWithJunctionWitness) {
  GallerySpace g = build_pato(12, 5);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{g.mark("origin")});
  const PointId x = g.mark("x_inf");
  for (int n = 2; n <= 12; ++n) {
    auto s = slope_at_scale_detail(*g.space, u, x, std::ldexp(1.0, -n));
    ASSERT_TRUE(s.value);
    EXPECT_EQ(*s.value, 2.0);
    // The witness is a junction x_m with m >= n.
    bool junction = false;
    for (int m = n; m <= 13; ++m) junction = junction || s.witness == g.mark("x_n:" + std::to_string(m));
    EXPECT_TRUE(junction) << n;
  }
}

TEST(SlopeAtScale, SnowflakePsiBoundedByRadius) {
  GallerySpace g = build_snowflake_interval(401);
  ScalarField psi = snowflake_psi(*g.space, 0.25, 0.75);
  for (double r : {0.2, 0.1, 0.05, 0.025}) {
    for (PointId x = 1; x < 400; ++x) {
      // At r = 0.025 every ball is empty: neighbors sit at sqrt(1/400).
      auto v = slope_at_scale(*g.space, psi, x, r);
      auto b = brute_slope(*g.space, psi, x, r);
      ASSERT_EQ(v.has_value(), b.has_value());
      if (!v) continue;
      EXPECT_LE(*v, r + 1e-15);
      EXPECT_EQ(*v, *b);
    }
  }
}

TEST(SlopeProfile, AffineOnInterval) {
  GallerySpace g = build_interval(101);
  const double h = 0.01;
  std::vector<double> v(101);
  for (int i = 0; i < 101; ++i) v[i] = g.space->coordinates(i)[0];
  ScalarField u(v);
  RadiusSchedule sch{{8 * h, 4 * h, 2 * h}, 3};
  SlopeProfile p = slope_profile(*g.space, u, 50, sch);
  for (const auto& s : p.per_radius) EXPECT_NEAR(*s.value, 1.0, 1e-12);
  EXPECT_NEAR(p.reported, 1.0, 1e-12);
}

TEST(SlopeProfile, CircleDistanceOffCutLocus) {
  const int n = 512;
  GallerySpace g = build_circle(n);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{0});
  RadiusSchedule sch = default_schedule(*g.space);
  const double h = 2 * std::numbers::pi / n;
  for (PointId x = 2; x < n; ++x) {
    if (x > n / 2 - 2 && x < n / 2 + 2) continue;  // cut locus
    // Quotients are arc over chord; within chord R the largest such ratio
    // is asin(R/2) / (R/2).
    SlopeProfile p = slope_profile(*g.space, u, x, sch);
    const double half = p.reported_radius / 2;
    EXPECT_LE(p.reported, std::asin(half) / half + 1e-12) << x;
    EXPECT_GE(p.reported, 1.0 - 2 * h) << x;
  }
}

TEST(SlopeProfile, SpiderLeafReportsStraightSegment) {
  GallerySpace g = build_spider(4, 9);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{g.mark("origin")});
  RadiusSchedule sch = default_schedule(*g.space);
  for (int n = 1; n <= 4; ++n) {
    PointId leaf = g.mark("leaf:" + std::to_string(n));
    double r = slope_profile(*g.space, u, leaf, sch).reported;
    EXPECT_NEAR(r, 1.0, 1e-9) << n;
    EXPECT_NEAR(r, brute_reported(*g.space, u, leaf, sch), 1e-15);
  }
}

TEST(SlopeProfile, MonotoneAndMatchesBruteForce) {
  // Property: on random fields over random finite spaces, the indexed
  // profile agrees with the definition radius by radius.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> c(60, std::vector<double>(2));
    std::vector<double> v(60);
    for (auto& row : c)
      for (double& z : row) z = U(rng);
    for (double& z : v) z = U(rng);
    auto s = MetricSpace::from_coordinates(trial % 2 ? NormTag::l1 : NormTag::euclidean, c);
    ScalarField u(v);
    RadiusSchedule sch = default_schedule(s);
    NeighborIndex full(s, sch.radii.front());
    NeighborIndex cut(s, sch.radii.front(), 4);
    for (PointId x = 0; x < 60; ++x) {
      SlopeProfile p = slope_profile(full, u, x, sch);
      double prev = INFINITY;
      for (std::size_t i = 0; i < p.per_radius.size(); ++i) {
        auto b = brute_slope(s, u, x, p.per_radius[i].radius);
        ASSERT_EQ(p.per_radius[i].value.has_value(), b.has_value());
        if (b) {
          EXPECT_EQ(*p.per_radius[i].value, *b);
          EXPECT_LE(*b, prev);
          prev = *b;
        }
      }
      EXPECT_EQ(p.reported, brute_reported(s, u, x, sch));
      // A truncated index falls back to direct scans beyond its lists.
      EXPECT_EQ(slope_profile(cut, u, x, sch).reported, p.reported);
      EXPECT_EQ(slope_profile(cut, u, x, sch, UndefinedPolicy::error, true).reported, p.reported);
    }
  }
}

TEST(SlopeProfile, WitnessTiesGoToSmallerId) {
  auto s = MetricSpace::from_coordinates(NormTag::euclidean, {{0.0}, {-1.0}, {1.0}});
  ScalarField u({1.0, 0.0, 0.0});
  auto d = slope_at_scale_detail(s, u, 0, 1.0);
  EXPECT_EQ(d.witness, 1u);
  EXPECT_EQ(*d.value, 1.0);
}

TEST(SlopeProfile, IsolatedPointReportsZero) {
  auto s = MetricSpace::from_coordinates(NormTag::euclidean, {{0.0}, {10.0}});
  ScalarField u({5.0, 0.0});
  SlopeProfile p = slope_profile(s, u, 0, RadiusSchedule{{1.0, 0.5}, 3});
  EXPECT_EQ(p.reported, 0.0);
}

TEST(Schedule, DefaultIsGeometricAndValidated) {
  GallerySpace g = build_interval(101);
  RadiusSchedule s = default_schedule(*g.space);
  EXPECT_DOUBLE_EQ(s.radii.front(), 0.25);
  for (std::size_t i = 1; i < s.radii.size(); ++i) EXPECT_DOUBLE_EQ(s.radii[i], s.radii[i - 1] / 2);
  EXPECT_GE(s.radii.back(), 2 * 0.01 - 1e-15);
  EXPECT_THROW((RadiusSchedule{{0.1, 0.2}, 3}).validate(), Error);
  EXPECT_THROW((RadiusSchedule{{}, 3}).validate(), Error);
}

TEST(FlatPerturbation, ZeroPsiIsIdentical) {
  GallerySpace g = build_interval(41);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{0});
  auto rep = flat_perturbation_check(*g.space, u, ScalarField::constant(41, 0.0), default_schedule(*g.space));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_difference, 0.0);
}

TEST(FlatPerturbation, SnowflakePsiIsInvisible) {
  GallerySpace g = build_snowflake_interval(401);
  std::vector<double> v(401);
  for (PointId x = 0; x < 401; ++x) v[x] = g.space->dist(0, x);
  RadiusSchedule sch{{0.2, 0.1, 0.05}, 3};
  auto rep = flat_perturbation_check(*g.space, ScalarField(v), snowflake_psi(*g.space, 0.25, 0.75), sch);
  EXPECT_TRUE(rep.passed) << rep.max_difference;
}

TEST(FlatPerturbation, EuclideanTentIsVisible) {
  GallerySpace g = build_interval(401);
  std::vector<double> v(401);
  for (PointId x = 0; x < 401; ++x) v[x] = g.space->coordinates(x)[0];
  RadiusSchedule sch{{0.02, 0.01, 0.005}, 3};
  auto rep = flat_perturbation_check(*g.space, ScalarField(v), snowflake_psi(*g.space, 0.25, 0.75), sch);
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.max_difference, 1.0, 1e-9);
}
