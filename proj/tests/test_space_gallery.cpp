#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

TEST(Snowflake, SmallCases) {
  EXPECT_THROW(build_snowflake_interval(2), Error);
  GallerySpace g = build_snowflake_interval(3, 0.5);
  EXPECT_DOUBLE_EQ(g.space->dist(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(g.space->dist(0, 1), std::sqrt(0.5));
  EXPECT_TRUE(g.complex->empty());
  try {
    build_snowflake_interval(11, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::bad_alpha);
  }
}

TEST(Snowflake, PsiProfile) {
  GallerySpace g = build_snowflake_interval(401);
  ScalarField psi = snowflake_psi(*g.space, 0.25, 0.75);
  EXPECT_DOUBLE_EQ(psi[200], 0.25);
  EXPECT_DOUBLE_EQ(psi[0], 0.0);
  EXPECT_DOUBLE_EQ(psi[100], 0.0);
  EXPECT_DOUBLE_EQ(psi[150], 0.125);
  EXPECT_DOUBLE_EQ(psi[300], 0.0);
}

TEST(Snowflake, Alpha09ValidatesByBruteForce) {
  GallerySpace g = build_snowflake_interval(101, 0.9);
  auto r = validate_metric(*g.space);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_TRUE(r.passed);
}

TEST(Circle, ChordsAndArcs) {
  const int n = 2048;
  GallerySpace g = build_circle(n);
  const PointId p0 = g.mark("p0"), a = g.mark("antipode"), q = g.mark("quarter");
  EXPECT_NEAR(g.space->dist(p0, a), 2.0, 1e-12);
  EXPECT_NEAR(intrinsic_distance(*g.complex, p0, a).raw(), std::numbers::pi, 1e-9);
  EXPECT_NEAR(g.space->dist(p0, q), std::sqrt(2.0), 1e-12);
  const double ratio = intrinsic_distance(*g.complex, 0, 1).raw() / g.space->dist(0, 1);
  EXPECT_NEAR(ratio, (2 * std::numbers::pi / n) / (2 * std::sin(std::numbers::pi / n)), 1e-12);
  EXPECT_NEAR(ratio, 1.0, 1e-5);
}

TEST(Spider, Coordinates) {
  for (bool graded : {true, false}) {
    GallerySpace g = build_spider(10, 9, graded);
    const PointId o = g.mark("origin");
    for (int n = 1; n <= 10; ++n) {
      const double nn = double(n) * n;
      PointId leaf = g.mark("leaf:" + std::to_string(n)), apex = g.mark("apex:" + std::to_string(n));
      EXPECT_DOUBLE_EQ(g.space->dist(o, leaf), 1.0 / nn);
      EXPECT_NEAR(intrinsic_distance(*g.complex, o, leaf).raw(), 1.0 / nn + 2.0 / n, 1e-12);
      EXPECT_NEAR(g.space->dist(o, apex), 1.0 / (2 * nn) + 1.0 / n, 1e-15);
      EXPECT_NEAR(intrinsic_distance(*g.complex, o, apex).raw(), g.space->dist(o, apex), 1e-12);
      auto c = g.space->coordinates(apex);
      EXPECT_DOUBLE_EQ(c[2 * n - 2], 1.0 / (2 * nn));
      EXPECT_DOUBLE_EQ(c[2 * n - 1], 1.0 / n);
    }
  }
}

TEST(Spider, EdgesAreStraightSegments) {
  GallerySpace g = build_spider(6, 9);
  for (const Edge& e : g.complex->edges()) EXPECT_NEAR(e.length, g.space->dist(e.a, e.b), 1e-15);
  EXPECT_TRUE(validate_metric(*g.space, 20000).passed);
}

TEST(Spider, GradedSpacingIsUnimodalOnOuterSegments) {
  // From the apex the mesh coarsens, then refines again toward the leaf,
  // which sits close to the origin; it never oscillates.
  GallerySpace g = build_spider(4, 9);
  for (int n = 1; n <= 4; ++n) {
    PointId apex = g.mark("apex:" + std::to_string(n)), leaf = g.mark("leaf:" + std::to_string(n));
    std::vector<double> h;
    for (PointId x = apex; x < leaf; ++x) h.push_back(g.space->dist(x, x + 1));
    std::size_t k = 0;
    while (k + 1 < h.size() && h[k + 1] >= h[k] * (1 - 1e-6)) ++k;
    while (k + 1 < h.size() && h[k + 1] <= h[k] * (1 + 1e-6)) ++k;
    EXPECT_EQ(k + 1, h.size()) << "branch " << n;
  }
}

TEST(Pato, JunctionDistances) {
  GallerySpace g = build_pato(20, 9);
  const PointId x_inf = g.mark("x_inf");
  for (int k = 1; k <= 21; ++k) EXPECT_DOUBLE_EQ(g.space->dist(x_inf, g.mark("x_n:" + std::to_string(k))), std::ldexp(1.0, -k));
  for (int k = 1; k <= 20; ++k) {
    PointId a = g.mark("x_n:" + std::to_string(k)), b = g.mark("x_n:" + std::to_string(k + 1));
    double di = intrinsic_distance(*g.complex, a, b).raw();
    EXPECT_NEAR(di, 2.0 * std::ldexp(1.0, -(k + 1)), 1e-15);
    EXPECT_NEAR(di, 2.0 * g.space->dist(a, b), 1e-15);
  }
  // Closing edge: straight l1 distance to the last junction.
  PointId last = g.mark("x_n:21");
  EXPECT_DOUBLE_EQ(*g.complex->edge_length(last, x_inf), std::ldexp(1.0, -20));
  EXPECT_DOUBLE_EQ(g.space->dist(last, x_inf), std::ldexp(1.0, -21));
  EXPECT_NEAR(intrinsic_distance(*g.complex, g.mark("origin"), x_inf).raw(), 1.0, 1e-12);
  EXPECT_THROW(build_pato(5, 4), Error);
}

TEST(Pato, SampledMetricIsValid) {
  GallerySpace g = build_pato(8, 5);
  EXPECT_TRUE(validate_metric(*g.space).passed);
}

TEST(Hyperpato, DepthBound) {
  try {
    build_hyperpato(5, 2, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::depth_exceeded);
  }
}

TEST(Hyperpato, GlueMetricAndLeafEffect) {
  GallerySpace g = build_hyperpato(2, 3, 5, 4);
  const MetricSpace& s = *g.space;
  EXPECT_TRUE(validate_metric(s).passed);
  // Glue points inherit the trunk metric, which is the pato metric pulled
  // back to arc length.
  const auto& trunk = g.meta.at("trunk_parameter");
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      PointId a = g.mark("glue:2," + std::to_string(i)), b = g.mark("glue:2," + std::to_string(j));
      EXPECT_NEAR(s.dist(a, b), detail::pato_theta(trunk.at(a).get<double>(), trunk.at(b).get<double>()), 1e-15);
    }
  }
  // d_I from a leaf to the point at parameter r(1 - 2^{-(n-1)}) of its own
  // branch is twice the rho distance.
  ScalarField d = intrinsic_distance_field(*g.complex, std::vector<PointId>{g.mark("leaf:1,1")});
  for (int n = 2; n <= 5; ++n) {
    double t = 1.0 - std::ldexp(1.0, -(n - 1));
    PointId q = kNoPoint;
    for (PointId x = 0; x < s.size(); ++x) {
      if (trunk.at(x).get<double>() == t) q = x;
    }
    ASSERT_NE(q, kNoPoint);
    EXPECT_NEAR(d[q], 2.0 * s.dist(q, g.mark("leaf:1,1")), 1e-12) << n;
  }
}

TEST(Hyperpato, TwoQuasiconvexAtSmallDensity) {
  GallerySpace g = build_hyperpato(3, 2, 3, 3);
  auto qc = quasiconvexity_constant(*g.space, *g.complex);
  EXPECT_LE(qc.constant.raw(), 2.0 + 1e-6);
  EXPECT_GE(qc.constant.raw(), 2.0 - 1e-6);
}

TEST(C0Star, TipsAndIsolatedLimit) {
  GallerySpace g = build_c0_star(10, 9);
  const PointId o = g.mark("origin"), e1 = g.mark("e1");
  EXPECT_DOUBLE_EQ(g.space->dist(o, e1), 1.0);
  EXPECT_TRUE(g.complex->incident(e1).empty());
  EXPECT_TRUE(intrinsic_distance(*g.complex, o, e1).is_infinite());
  double last_q = 0.0;
  for (int n = 2; n <= 11; ++n) {
    PointId tip = g.mark("tip:" + std::to_string(n));
    auto c = g.space->coordinates(tip);
    const double t = c[0];
    EXPECT_LT(t, 1.0 - 1.0 / n);
    const double h = t <= 0.5 ? t : 1.0 - t;
    EXPECT_DOUBLE_EQ(c[n - 1], h);
    // l-infinity norm of (1 - t) e1 - h e_n.
    EXPECT_DOUBLE_EQ(g.space->dist(tip, e1), std::max(1.0 - t, h));
    last_q = (g.space->dist(o, e1) - g.space->dist(o, tip)) / g.space->dist(tip, e1);
    EXPECT_NEAR(last_q, 1.0, 1e-12);
  }
  EXPECT_TRUE(validate_metric(*g.space, 20000).passed);
}

TEST(Product, SumMetric) {
  GallerySpace base = build_circle(32);
  GallerySpace g = product_with_interval(base, 5);
  const PointId x0 = g.mark("p0@0"), x1 = g.mark("p0@4");
  EXPECT_DOUBLE_EQ(g.space->dist(x0, x1), 1.0);
  ScalarField db = intrinsic_distance_field(*base.complex, std::vector<PointId>{0});
  ScalarField dp = intrinsic_distance_field(*g.complex, std::vector<PointId>{x0});
  const auto& pts = g.space->product_points();
  for (PointId x = 0; x < g.space->size(); ++x) {
    EXPECT_NEAR(dp[x], db[pts[x].first] + pts[x].second, 1e-9);
  }
  auto qc = quasiconvexity_constant(*g.space, *g.complex);
  EXPECT_LE(qc.constant.raw(), std::max(std::numbers::pi / 2, 1.0) + 1e-3);
}

TEST(Mesh, AdaptiveMeshIsNestedUnderRefinement) {
  for (int steps : {4, 8}) {
    auto coarse = adaptive_mesh(1.0, 1.0, [&](double f) { return apex_spacing(f, steps); });
    auto fine = adaptive_mesh(1.0, 1.0, [&](double f) { return apex_spacing(f, 2 * steps); });
    EXPECT_TRUE(std::is_sorted(coarse.begin(), coarse.end()));
    EXPECT_TRUE(std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end()));
    for (std::size_t i = 1; i < coarse.size(); ++i) EXPECT_LE(coarse[i] - coarse[i - 1], 1.0 / steps + 1e-15);
  }
}

TEST(Mesh, ApexDecayBeatsConeRatio) {
  for (double c : {2.0, 3.0, 5.0, 21.0}) EXPECT_GE(std::ldexp(1.0, apex_decay(c)), 2.5 * c);
}

TEST(Rebuild, MetaRoundTripAndRefinement) {
  for (const GallerySpace& g :
       {build_interval(11), build_circle(16), build_spider(3, 5), build_pato(4, 5), build_c0_star(4, 5)}) {
    GallerySpace r = rebuild(g.meta);
    ASSERT_EQ(r.space->size(), g.space->size()) << g.name();
    for (PointId x = 0; x < g.space->size(); ++x) EXPECT_EQ(locator(r, x), locator(g, x));
    GallerySpace fine = rebuild(refined_meta(g.meta));
    EXPECT_GT(fine.space->size(), g.space->size());
    PointMatcher match(fine);
    for (const auto& [name, id] : g.marks) EXPECT_TRUE(match(g, id).has_value()) << g.name() << " " << name;
  }
  EXPECT_THROW(rebuild({{"builder", "nope"}}), Error);
}
