#include <gtest/gtest.h>

#include <cmath>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

namespace {

bool has_stable_witness(const EikonalVerdict& v, PointId x) {
  for (const Witness& w : v.witnesses)
    if (w.point == x && w.stable()) return true;
  return false;
}

}  // namespace

TEST(Verdict, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::pass), 0);
  EXPECT_EQ(exit_code(Verdict::fail), 1);
  EXPECT_EQ(exit_code(Verdict::inconclusive), 2);
  EXPECT_STREQ(to_string(Verdict::inconclusive), "INCONCLUSIVE");
}

TEST(ProbeFamily, DeterministicBySeedAndDeduplicated) {
  GallerySpace g = build_circle(256);
  VerifyOptions a, b, c;
  b.seed = 0;
  c.seed = 7;
  auto fa = probe_family(g, a), fb = probe_family(g, b), fc = probe_family(g, c);
  ASSERT_EQ(fa.size(), fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) EXPECT_EQ(fa[i].points, fb[i].points);
  bool differs = fa.size() != fc.size();
  for (std::size_t i = 0; i < std::min(fa.size(), fc.size()); ++i) differs = differs || fa[i].points != fc[i].points;
  EXPECT_TRUE(differs);
  std::set<std::vector<PointId>> seen;
  for (const ProbeSet& p : fa) {
    EXPECT_TRUE(std::is_sorted(p.points.begin(), p.points.end()));
    EXPECT_TRUE(seen.insert(p.points).second) << p.description;
  }
  // Marks come first as singletons.
  EXPECT_EQ(fa.front().kind, ProbeSet::Kind::singleton);
}

TEST(CheckEikonal, CirclePasses) {
  GallerySpace g = build_circle(1024);
  VerifyOptions opt;
  opt.tolerance = 0.02;
  EikonalVerdict v = check_eikonal_property(g, opt);
  EXPECT_EQ(v.verdict, Verdict::pass);
  EXPECT_TRUE(v.applicable);
  for (const ProbeResult& p : v.probes) EXPECT_EQ(p.unreachable, 0u);
}

TEST(CheckEikonal, IntervalPasses) {
  EXPECT_EQ(check_eikonal_property(build_interval(201)).verdict, Verdict::pass);
}

TEST(CheckEikonal, PatoFailsAtLimit) {
  GallerySpace g = build_pato(20, 9);
  EikonalVerdict v = check_eikonal_property(g);
  EXPECT_EQ(v.verdict, Verdict::fail);
  EXPECT_TRUE(has_stable_witness(v, g.mark("x_inf")));
  ASSERT_FALSE(v.witnesses.empty());
  EXPECT_TRUE(v.witnesses.front().stable());
}

TEST(CheckEikonal, HyperpatoFailsAtLeaves) {
  GallerySpace g = build_hyperpato(3, 4, 5, 4);
  EikonalVerdict v = check_eikonal_property(g);
  EXPECT_EQ(v.verdict, Verdict::fail);
  bool leaf = false;
  for (const Witness& w : v.witnesses) {
    if (!w.stable()) continue;
    for (const auto& [name, id] : g.marks) leaf = leaf || (id == w.point && name.rfind("leaf:", 0) == 0);
  }
  EXPECT_TRUE(leaf);
}

TEST(CheckEikonal, C0StarIsInconclusive) {
  GallerySpace g = build_c0_star(50, 9);
  EikonalVerdict v = check_eikonal_property(g);
  EXPECT_EQ(v.verdict, Verdict::inconclusive);
  EXPECT_FALSE(v.notes.empty());
  bool disconnected = false;
  for (const ProbeResult& p : v.probes) disconnected = disconnected || p.disconnected();
  EXPECT_TRUE(disconnected);
}

TEST(CheckEikonal, SnowflakeNotApplicable) {
  EikonalVerdict v = check_eikonal_property(build_snowflake_interval(101));
  EXPECT_FALSE(v.applicable);
  EXPECT_EQ(v.verdict, Verdict::inconclusive);
  EXPECT_TRUE(v.probes.empty());
}

TEST(Determination, SnowflakeContradiction) {
  GallerySpace g = build_snowflake_interval(401);
  const MetricSpace& s = *g.space;
  // Chain length from the left end: slope 1 at the finest scale and about
  // sqrt(k) over k steps, so only the left end has zero slope.
  std::vector<double> chain(s.size(), 0.0);
  for (PointId x = 1; x < s.size(); ++x) chain[x] = chain[x - 1] + s.dist(x - 1, x);
  ScalarField u1(chain);
  ScalarField u2 = u1 + snowflake_psi(s, 0.25, 0.75);
  RadiusSchedule sch = default_schedule(s);
  // The slope of psi at radius r is at most r.
  DeterminationReport r = determination_check(s, u1, u2, sch, sch.radii.back());
  EXPECT_EQ(r.zero_slope_points, 1u);
  EXPECT_EQ(r.status, DeterminationStatus::contradiction);
  EXPECT_NEAR(r.max_value_difference, 0.25, 1e-12);
  EXPECT_LE(r.max_zero_set_difference, r.tolerance);
}

TEST(Determination, IntervalTentIsNotApplicable) {
  GallerySpace g = build_interval(401);
  std::vector<double> x(401);
  for (PointId i = 0; i < 401; ++i) x[i] = g.space->coordinates(i)[0];
  ScalarField psi = snowflake_psi(*g.space, 0.25, 0.75);
  std::vector<double> y(401);
  for (PointId i = 0; i < 401; ++i) y[i] = x[i] + 0.1 * psi[i];
  ScalarField u1(x), u2(y);
  RadiusSchedule sch{{0.02, 0.01, 0.005}, 3};
  DeterminationReport r = determination_check(*g.space, u1, u2, sch, 0.01);
  EXPECT_EQ(r.status, DeterminationStatus::not_applicable);
  EXPECT_GT(r.max_slope_difference, 0.05);
}

TEST(Determination, IdenticalFieldsAreConsistent) {
  GallerySpace g = build_interval(101);
  ScalarField u = intrinsic_distance_field(*g.complex, std::vector<PointId>{0, 100});
  DeterminationReport r = determination_check(*g.space, u, u, default_schedule(*g.space), 1e-9);
  EXPECT_EQ(r.status, DeterminationStatus::consistent);
  EXPECT_EQ(r.max_value_difference, 0.0);
}

TEST(SpiderDemo, LeafQuotientAndCounts) {
  GallerySpace g = build_spider(6, 9);
  SpiderDemoReport r = spider_eikonal_demo(g, "origin");
  EXPECT_EQ(r.defect, 0u);
  EXPECT_EQ(r.unreachable, 0u);
  EXPECT_GT(r.solution, 0u);
  EXPECT_LE(r.max_dpp_residual, 1e-9);
  EXPECT_LE(r.max_leaf_quotient_error, r.tolerance);
}
