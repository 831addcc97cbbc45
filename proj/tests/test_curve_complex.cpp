#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

namespace {

/// Exhaustive simple-path enumeration: the oracle for shortest lengths on
/// small complexes.
double brute_shortest(const CurveComplex& c, PointId from, PointId to) {
  std::vector<bool> on(c.size(), false);
  double best = INFINITY;
  std::function<void(PointId, double)> dfs = [&](PointId v, double len) {
    if (len >= best) return;
    if (v == to) {
      best = len;
      return;
    }
    on[v] = true;
    for (auto k : c.incident(v)) {
      const Edge& e = c.edges()[k];
      PointId w = e.other(v);
      if (!on[w]) dfs(w, len + e.length);
    }
    on[v] = false;
  };
  dfs(from, 0.0);
  return best;
}

}  // namespace

TEST(CurveComplex, RejectsEdgesShorterThanChord) {
  auto s = std::make_shared<const MetricSpace>(MetricSpace::from_coordinates(NormTag::euclidean, {{0.0}, {1.0}}));
  EXPECT_THROW(CurveComplex(s, {{0, 1, 0.5}}), Error);
  EXPECT_THROW(CurveComplex(s, {{0, 0, 1.0}}), Error);
  EXPECT_THROW(CurveComplex(s, {{0, 2, 1.0}}), Error);
  EXPECT_NO_THROW(CurveComplex(s, {{0, 1, 1.5}}));
}

TEST(CurveComplex, CurveLength) {
  GallerySpace g = build_interval(101);
  EXPECT_EQ(curve_length(*g.complex, Polyline{{5}}), 0.0);
  Polyline all;
  for (PointId i = 0; i < 101; ++i) all.vertices.push_back(i);
  EXPECT_NEAR(curve_length(*g.complex, all), 1.0, 1e-12);
  try {
    curve_length(*g.complex, Polyline{{0, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::disconnected_step);
  }
}

TEST(CurveComplex, PatoTraverseTelescopes) {
  for (int N : {3, 6, 10}) {
    GallerySpace g = build_pato(N, 5);
    Polyline p;
    for (PointId x = 0; x <= g.mark("x_n:" + std::to_string(N + 1)); ++x) p.vertices.push_back(x);
    double expect = 0.0;
    for (int n = 1; n <= N; ++n) expect += 2.0 * std::ldexp(1.0, -(n + 1));
    EXPECT_NEAR(curve_length(*g.complex, p), expect, 1e-12);
    EXPECT_NEAR(expect, 1.0 - std::ldexp(1.0, -N), 1e-15);
  }
}

TEST(CurveComplex, IntrinsicDistanceSpiderAndC0) {
  GallerySpace s = build_spider(10, 9);
  for (int n = 1; n <= 10; ++n) {
    double d = intrinsic_distance(*s.complex, s.mark("origin"), s.mark("leaf:" + std::to_string(n))).raw();
    EXPECT_NEAR(d, 1.0 / (n * n) + 2.0 / n, 1e-10);
  }
  EXPECT_EQ(intrinsic_distance(*s.complex, 7, 7).raw(), 0.0);
  GallerySpace c = build_c0_star(6, 5);
  EXPECT_TRUE(intrinsic_distance(*c.complex, c.mark("origin"), c.mark("e1")).is_infinite());
}

TEST(CurveComplex, IntrinsicFieldMatchesArcOracleOnCircle) {
  const int n = 360;
  GallerySpace g = build_circle(n);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{0});
  for (int i = 0; i < n; ++i) {
    double arc = 2.0 * std::numbers::pi * std::min(i, n - i) / n;
    EXPECT_NEAR(u[i], arc, 1e-10) << i;
  }
  std::vector<PointId> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  ScalarField z = intrinsic_distance_field(*g.complex, all);
  for (int i = 0; i < n; ++i) EXPECT_EQ(z[i], 0.0);
  EXPECT_THROW(intrinsic_distance_field(*g.complex, std::vector<PointId>{}), Error);
}

TEST(CurveComplex, PatoJunctionValuesAgainstPathEnumeration) {
  GallerySpace g = build_pato(5, 5, false);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{g.mark("origin")});
  for (int n = 1; n <= 6; ++n) {
    PointId x = g.mark("x_n:" + std::to_string(n));
    EXPECT_NEAR(u[x], 1.0 - std::ldexp(1.0, -(n - 1)), 1e-10);
    EXPECT_NEAR(u[x], brute_shortest(*g.complex, g.mark("origin"), x), 1e-12);
  }
  EXPECT_NEAR(u[g.mark("x_inf")], 1.0, 1e-12);
}

TEST(CurveComplex, QuasiconvexityConstants) {
  GallerySpace seg = build_interval(51);
  EXPECT_NEAR(quasiconvexity_constant(*seg.space, *seg.complex).constant.raw(), 1.0, 1e-12);

  GallerySpace circ = build_circle(2048);
  auto qc = quasiconvexity_constant(*circ.space, *circ.complex,
                                    PairSampling::from_sources({circ.mark("p0"), circ.mark("quarter")}));
  EXPECT_NEAR(qc.constant.raw(), std::numbers::pi / 2, 1e-3);
  EXPECT_LE(qc.constant.raw(), std::numbers::pi / 2);

  GallerySpace sp = build_spider(10, 9);
  auto q2 = quasiconvexity_constant(*sp.space, *sp.complex, PairSampling::from_sources({sp.mark("origin")}));
  EXPECT_GE(q2.constant.raw(), 21.0 - 1e-9);
  for (int n = 1; n <= 10; ++n) {
    PointId leaf = sp.mark("leaf:" + std::to_string(n));
    auto one = quasiconvexity_constant(*sp.space, *sp.complex, PairSampling::from_pairs({{sp.mark("origin"), leaf}}));
    EXPECT_NEAR(one.constant.raw(), 1.0 + 2.0 * n, 1e-9);
  }

  GallerySpace c = build_c0_star(4, 5);
  EXPECT_TRUE(quasiconvexity_constant(*c.space, *c.complex).constant.is_infinite());
}

TEST(CurveComplex, ShortestPolylineOnInterval) {
  GallerySpace g = build_interval(11);
  std::vector<PointId> k{0, 10};
  Polyline p = extract_shortest_polyline(*g.complex, 3, k);
  EXPECT_EQ(p.vertices, (std::vector<PointId>{3, 2, 1, 0}));
  EXPECT_EQ(extract_shortest_polyline(*g.complex, 0, k).vertices, (std::vector<PointId>{0}));
  // Path length equals the field value at its start.
  EXPECT_NEAR(curve_length(*g.complex, p), 0.3, 1e-12);
}

TEST(CurveComplex, HyperpatoLeafPathIsShortest) {
  GallerySpace g = build_hyperpato(2, 2, 3, 2, false);
  std::vector<PointId> root{g.mark("root")};
  ScalarField u = intrinsic_distance_field(*g.complex, root);
  for (const char* leaf : {"leaf:2,1", "leaf:2,2"}) {
    PointId x = g.mark(leaf);
    Polyline p = extract_shortest_polyline(*g.complex, x, root);
    EXPECT_EQ(p.vertices.back(), g.mark("root"));
    EXPECT_NEAR(curve_length(*g.complex, p), brute_shortest(*g.complex, x, g.mark("root")), 1e-12);
    // The path passes through the glue point of its branch.
    std::string glue = std::string("glue:") + (leaf + 5);
    EXPECT_NE(std::find(p.vertices.begin(), p.vertices.end(), g.mark(glue)), p.vertices.end());
    EXPECT_NEAR(u[x], curve_length(*g.complex, p), 1e-12);
  }
}
