#pragma once

// Numerical test of the eikonal characterization: s[d_I(., K)] = 1 off K
// for closed sets K, probed on marks, seeded random subsets and balls.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slopekit/curve_complex.hpp"
#include "slopekit/eikonal.hpp"
#include "slopekit/gallery.hpp"
#include "slopekit/slope.hpp"

namespace slopekit {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::inconclusive: return 2;
  }
  return 2;
}

struct ProbeSet {
  enum class Kind { singleton, random, ball };
  Kind kind = Kind::singleton;
  std::string description;
  std::vector<PointId> points;  // sorted, distinct
};

/// How an out-of-tolerance point behaves when the sampling density doubles.
enum class Persistence {
  stable,      // still out of tolerance, deviation within 20% of the original
  resolved,    // back within tolerance: discretization error
  unresolved,  // neither, or the point has no counterpart in the refinement
};

inline const char* to_string(Persistence p) {
  switch (p) {
    case Persistence::stable: return "stable";
    case Persistence::resolved: return "resolved";
    case Persistence::unresolved: return "unresolved";
  }
  return "?";
}

struct Witness {
  std::string set;
  PointId point = kNoPoint;
  double slope = 0.0;
  double deviation = 0.0;
  std::optional<double> refined_deviation;
  Persistence persistence = Persistence::unresolved;

  bool stable() const { return persistence == Persistence::stable; }
};

struct ProbeResult {
  ProbeSet set;
  PointId worst = kNoPoint;
  double worst_slope = 1.0;
  double worst_deviation = 0.0;
  std::size_t points_tested = 0;
  std::size_t unreachable = 0;  // points at infinite intrinsic distance from K
  std::vector<Witness> outliers;  // every tested point beyond tolerance

  bool disconnected() const { return unreachable > 0; }
};

struct EikonalVerdict {
  nlohmann::json meta;
  Verdict verdict = Verdict::inconclusive;
  double tolerance = 0.0;
  bool applicable = true;  // false when the complex has no edges
  std::vector<ProbeResult> probes;
  std::vector<Witness> witnesses;
  std::vector<std::string> notes;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::optional<double> tolerance;
  std::optional<RadiusSchedule> schedule;
  int random_subsets = 16;
  std::vector<int> subset_sizes{1, 2, 5};
  int ball_count = 3;
  bool refine = true;
};

/// Singletons at marks, seeded random subsets, and closed balls around
/// point 0 at diameter/4, /8, /16. Sets already listed are dropped.
inline std::vector<ProbeSet> probe_family(const GallerySpace& g, const VerifyOptions& opt) {
  std::vector<ProbeSet> out;
  std::set<std::vector<PointId>> seen;
  auto add = [&](ProbeSet p) {
    std::sort(p.points.begin(), p.points.end());
    p.points.erase(std::unique(p.points.begin(), p.points.end()), p.points.end());
    if (seen.insert(p.points).second) out.push_back(std::move(p));
  };
  for (const auto& [name, id] : g.marks) add({ProbeSet::Kind::singleton, "mark:" + name, {id}});

  const std::size_t n = g.space->size();
  std::mt19937_64 rng(opt.seed);
  for (int i = 0; i < opt.random_subsets && !opt.subset_sizes.empty(); ++i) {
    std::size_t want = std::min<std::size_t>(opt.subset_sizes[i % opt.subset_sizes.size()], n);
    std::set<PointId> pick;
    while (pick.size() < want) pick.insert(static_cast<PointId>(rng() % n));
    ProbeSet p{ProbeSet::Kind::random, "", {pick.begin(), pick.end()}};
    std::ostringstream desc;
    desc << "random:" << i << ":{";
    for (std::size_t k = 0; k < p.points.size(); ++k) desc << (k ? "," : "") << p.points[k];
    desc << "}";
    p.description = desc.str();
    add(std::move(p));
  }

  const double diam = diameter(*g.space);
  double r = diam / 4.0;
  for (int i = 0; i < opt.ball_count && diam > 0.0; ++i, r /= 2.0) {
    std::vector<PointId> pts = ball(*g.space, 0, r);
    pts.push_back(0);
    add({ProbeSet::Kind::ball, "ball:0:" + format_real(r), std::move(pts)});
  }
  return out;
}

/// Slopes of d_I(., K) at every point off K that K reaches; records the
/// worst |slope - 1| and every point beyond `tol`.
inline ProbeResult run_probe(const GallerySpace& g, const NeighborIndex& index, const RadiusSchedule& schedule,
                             const ProbeSet& set, double tol) {
  ProbeResult res;
  res.set = set;
  ScalarField u = intrinsic_distance_field(*g.complex, set.points);
  std::vector<bool> in_k(g.space->size(), false);
  for (PointId k : set.points) in_k[k] = true;
  std::vector<PointId> pts;
  for (PointId x = 0; x < g.space->size(); ++x) {
    if (in_k[x]) continue;
    if (!u.defined(x)) {
      ++res.unreachable;
      continue;
    }
    pts.push_back(x);
  }
  if (pts.empty()) return res;
  auto profiles = slope_profiles(index, u, schedule, pts, UndefinedPolicy::skip, true);
  for (const SlopeProfile& p : profiles) {
    ++res.points_tested;
    double dev = std::abs(p.reported - 1.0);
    if (res.worst == kNoPoint || dev > res.worst_deviation) {
      res.worst = p.point;
      res.worst_deviation = dev;
      res.worst_slope = p.reported;
    }
    if (dev > tol) res.outliers.push_back({set.description, p.point, p.reported, dev, std::nullopt, Persistence::unresolved});
  }
  return res;
}

/// Neighbor lists kept per point; enough for the reported radius almost
/// everywhere, larger balls are scanned directly.
inline constexpr std::size_t kProbeNeighbors = 64;

inline double default_verify_tolerance(const MetricSpace& space) {
  return std::max(0.02, 3.0 * sampling_resolution(space));
}

namespace detail {

/// Re-measures the outliers of `probe` on the refined space.
inline void classify_outliers(ProbeResult& probe, const GallerySpace& coarse, const GallerySpace& fine,
                              const PointMatcher& match, const NeighborIndex& fine_index,
                              const RadiusSchedule& fine_schedule, double tol) {
  std::vector<PointId> k;
  for (PointId x : probe.set.points) {
    auto y = match(coarse, x);
    if (!y) return;  // K has no counterpart: everything stays unresolved
    k.push_back(*y);
  }
  ScalarField u = intrinsic_distance_field(*fine.complex, k);
  for (Witness& w : probe.outliers) {
    auto y = match(coarse, w.point);
    if (!y || !u.defined(*y)) continue;
    double d = std::abs(slope_profile(fine_index, u, *y, fine_schedule, UndefinedPolicy::skip, true).reported - 1.0);
    w.refined_deviation = d;
    if (d <= tol) {
      w.persistence = Persistence::resolved;
    } else if (std::abs(d - w.deviation) <= 0.2 * w.deviation) {
      w.persistence = Persistence::stable;
    }
  }
}

}  // namespace detail

/// FAIL when some out-of-tolerance point keeps its deviation (within 20%,
/// still beyond tolerance) after the sampling density doubles. PASS when
/// every probe is connected and every out-of-tolerance point falls back
/// within tolerance at the doubled density. INCONCLUSIVE otherwise.
inline EikonalVerdict check_eikonal_property(const GallerySpace& g, const VerifyOptions& opt = {}) {
  EikonalVerdict v;
  v.meta = g.meta;
  v.tolerance = opt.tolerance ? *opt.tolerance : default_verify_tolerance(*g.space);
  if (g.complex->empty()) {
    v.applicable = false;
    v.verdict = Verdict::inconclusive;
    v.notes.push_back("no rectifiable curves: every intrinsic distance is INFINITE");
    return v;
  }
  const RadiusSchedule schedule = opt.schedule ? *opt.schedule : default_schedule(*g.space);
  schedule.validate();
  {
    NeighborIndex index(*g.space, schedule.radii.front(), kProbeNeighbors);
    for (const ProbeSet& set : probe_family(g, opt)) v.probes.push_back(run_probe(g, index, schedule, set, v.tolerance));
  }
  std::sort(v.probes.begin(), v.probes.end(),
            [](const ProbeResult& a, const ProbeResult& b) { return a.set.description < b.set.description; });

  bool disconnected = false, any_outlier = false;
  for (const ProbeResult& p : v.probes) {
    disconnected = disconnected || p.disconnected();
    any_outlier = any_outlier || !p.outliers.empty();
  }
  if (disconnected) v.notes.push_back("some probes leave points at INFINITE intrinsic distance");

  if (any_outlier && opt.refine) {
    try {
      GallerySpace fine = rebuild(refined_meta(g.meta));
      RadiusSchedule fine_schedule = opt.schedule ? *opt.schedule : default_schedule(*fine.space);
      NeighborIndex fine_index(*fine.space, fine_schedule.radii.front(), kProbeNeighbors);
      PointMatcher match(fine);
      for (ProbeResult& p : v.probes) {
        if (!p.outliers.empty()) detail::classify_outliers(p, g, fine, match, fine_index, fine_schedule, v.tolerance);
      }
    } catch (const Error& e) {
      v.notes.push_back(std::string("refinement unavailable: ") + e.what());
    }
  }

  bool any_stable = false, any_unresolved = false;
  for (const ProbeResult& p : v.probes) {
    if (p.outliers.empty()) continue;
    // One witness per probe: its strongest stable outlier, otherwise its
    // strongest outlier.
    const Witness* best = nullptr;
    for (const Witness& w : p.outliers) {
      any_stable = any_stable || w.stable();
      any_unresolved = any_unresolved || w.persistence == Persistence::unresolved;
      if (!best || (w.stable() && !best->stable()) ||
          (w.stable() == best->stable() && w.deviation > best->deviation)) {
        best = &w;
      }
    }
    v.witnesses.push_back(*best);
  }
  std::stable_sort(v.witnesses.begin(), v.witnesses.end(), [](const Witness& a, const Witness& b) {
    if (a.stable() != b.stable()) return a.stable();
    return a.deviation > b.deviation;
  });
  if (any_stable) {
    v.verdict = Verdict::fail;
  } else if (any_unresolved || disconnected) {
    v.verdict = Verdict::inconclusive;
  } else {
    v.verdict = Verdict::pass;
  }
  return v;
}

enum class DeterminationStatus { consistent, contradiction, not_applicable };

inline const char* to_string(DeterminationStatus s) {
  switch (s) {
    case DeterminationStatus::consistent: return "CONSISTENT";
    case DeterminationStatus::contradiction: return "CONTRADICTION";
    case DeterminationStatus::not_applicable: return "NOT-APPLICABLE";
  }
  return "?";
}

struct DeterminationReport {
  double tolerance = 0.0;
  double max_slope_difference = 0.0;  // over all points
  std::size_t zero_slope_points = 0;  // points where either slope <= tol
  double max_zero_set_difference = 0.0;
  double max_value_difference = 0.0;
  DeterminationStatus status = DeterminationStatus::not_applicable;
};

/// Bookkeeping for the determination theorem on a sample: if slopes agree
/// within tol and u1 = u2 where the slope vanishes, are u1 and u2 equal?
inline DeterminationReport determination_check(const MetricSpace& space, const ScalarField& u1,
                                               const ScalarField& u2, const RadiusSchedule& schedule, double tol) {
  schedule.validate();
  NeighborIndex index(space, schedule.radii.front());
  auto a = slope_profiles(index, u1, schedule);
  auto b = slope_profiles(index, u2, schedule);
  DeterminationReport rep;
  rep.tolerance = tol;
  for (std::size_t i = 0; i < a.size(); ++i) {
    PointId x = a[i].point;
    rep.max_slope_difference = std::max(rep.max_slope_difference, std::abs(a[i].reported - b[i].reported));
    double diff = std::abs(u1[x] - u2[x]);
    rep.max_value_difference = std::max(rep.max_value_difference, diff);
    if (a[i].reported <= tol || b[i].reported <= tol) {
      ++rep.zero_slope_points;
      rep.max_zero_set_difference = std::max(rep.max_zero_set_difference, diff);
    }
  }
  const double slack = tol + 1e-12;
  if (rep.max_slope_difference > slack || rep.max_zero_set_difference > slack) {
    rep.status = DeterminationStatus::not_applicable;
  } else {
    rep.status = rep.max_value_difference <= slack ? DeterminationStatus::consistent
                                                   : DeterminationStatus::contradiction;
  }
  return rep;
}

struct SpiderDemoReport {
  std::string variant;
  std::size_t solution = 0, super = 0, defect = 0, unreachable = 0;
  std::size_t excluded_near_leaves = 0;
  double tolerance = 0.0;
  double max_oracle_error = 0.0;       // against the 1-D or extension formula
  std::size_t oracle_points = 0;
  double max_leaf_quotient_error = 0.0;  // |quotient toward leaf - 1|
  double max_dpp_residual = 0.0;
};

namespace detail {

/// Points of each spider branch in walking order from the origin, keyed by
/// branch number. Uses the apex/leaf marks and the complex.
inline std::vector<std::vector<PointId>> spider_branches(const GallerySpace& g) {
  const int branches = g.meta.at("branches").get<int>();
  std::vector<std::vector<PointId>> out(branches + 1);
  const CurveComplex& c = *g.complex;
  const PointId origin = g.mark("origin");
  for (int n = 1; n <= branches; ++n) {
    PointId leaf = g.mark("leaf:" + std::to_string(n));
    // Walk back from the leaf; every branch vertex has degree <= 2.
    std::vector<PointId> walk{leaf};
    PointId prev = kNoPoint, cur = leaf;
    while (cur != origin) {
      PointId next = kNoPoint;
      for (std::uint32_t k : c.incident(cur)) {
        PointId o = c.edges()[k].other(cur);
        if (o != prev) {
          next = o;
          break;
        }
      }
      prev = cur;
      cur = next;
      walk.push_back(cur);
    }
    std::reverse(walk.begin(), walk.end());
    out[n] = std::move(walk);
  }
  return out;
}

}  // namespace detail

/// Branchwise solvability on the spider with ell = 1, g = 0.
///
/// "branch:n": omega is the open branch n, boundary {origin, leaf_n}; V is
/// checked against the 1-D distance to the branch ends. "origin": omega
/// holds the origin, boundary is every leaf; on points whose optimal curve
/// passes through the origin V is checked against V(0) + d_I(x, 0).
/// Residual classes exclude the two samples next to each leaf.
inline SpiderDemoReport spider_eikonal_demo(const GallerySpace& g, const std::string& variant,
                                            std::optional<RadiusSchedule> schedule = std::nullopt) {
  if (g.name() != "spider") throw Error(Errc::bad_params, "spider demo needs a spider space");
  const auto branches = detail::spider_branches(g);
  const int count = static_cast<int>(branches.size()) - 1;
  const PointId origin = g.mark("origin");
  const MetricSpace& space = *g.space;

  EikonalProblem problem;
  problem.complex = g.complex;
  std::vector<PointId> near_leaf;
  SpiderDemoReport rep;
  rep.variant = variant;
  std::vector<double> arc;  // arc length from the origin along the branch
  int branch = 0;
  if (variant.rfind("branch:", 0) == 0) {
    branch = std::stoi(variant.substr(7));
    if (branch < 1 || branch > count) throw Error(Errc::bad_params, "no such spider branch");
    const auto& walk = branches[branch];
    problem.boundary = {origin, walk.back()};
    problem.omega.assign(walk.begin() + 1, walk.end() - 1);
  } else if (variant == "origin") {
    std::vector<bool> is_leaf(space.size(), false);
    for (int n = 1; n <= count; ++n) {
      problem.boundary.push_back(branches[n].back());
      is_leaf[branches[n].back()] = true;
    }
    for (PointId x = 0; x < space.size(); ++x) {
      if (!is_leaf[x]) problem.omega.push_back(x);
    }
  } else {
    throw Error(Errc::bad_params, "unknown spider demo variant '" + variant + "'");
  }
  const std::size_t n = space.size();
  problem.ell = ScalarField::constant(n, 1.0);
  std::vector<double> gv(n, 0.0);
  std::vector<bool> gm(n, false);
  for (PointId b : problem.boundary) gm[b] = true;
  problem.g = ScalarField(std::move(gv), std::move(gm));

  ValueFunction vf = solve(problem);
  rep.max_dpp_residual = verify_dpp(vf, problem).max_residual;

  std::vector<bool> excluded(n, false);
  for (int b = 1; b <= count; ++b) {
    const auto& walk = branches[b];
    for (std::size_t k = walk.size() >= 3 ? walk.size() - 3 : 0; k + 1 < walk.size(); ++k) excluded[walk[k]] = true;
    // Quotient of V toward the leaf along the last edge.
    PointId leaf = walk.back(), prev = walk[walk.size() - 2];
    if (vf.solved(prev) && vf.solved(leaf) && (variant == "origin" || b == branch)) {
      double q = (vf.V[prev] - vf.V[leaf]) / space.dist(prev, leaf);
      rep.max_leaf_quotient_error = std::max(rep.max_leaf_quotient_error, std::abs(q - 1.0));
    }
  }

  // Oracles.
  if (branch > 0) {
    const auto& walk = branches[branch];
    std::vector<double> s(walk.size(), 0.0);
    for (std::size_t k = 1; k < walk.size(); ++k) s[k] = s[k - 1] + *g.complex->edge_length(walk[k - 1], walk[k]);
    for (std::size_t k = 1; k + 1 < walk.size(); ++k) {
      double expect = std::min(s[k], s.back() - s[k]);
      rep.max_oracle_error = std::max(rep.max_oracle_error, std::abs(vf.V[walk[k]] - expect));
      ++rep.oracle_points;
    }
  } else {
    ScalarField d0 = intrinsic_distance_field(*g.complex, std::vector<PointId>{origin});
    for (PointId x : problem.omega) {
      if (!vf.solved(x)) continue;
      bool via_origin = false;
      for (PointId v = x; v != kNoPoint; v = vf.pred[v]) {
        if (v == origin) {
          via_origin = true;
          break;
        }
      }
      if (!via_origin) continue;
      rep.max_oracle_error = std::max(rep.max_oracle_error, std::abs(vf.V[x] - (vf.V[origin] + d0[x])));
      ++rep.oracle_points;
    }
  }

  const RadiusSchedule sched = schedule ? *schedule : default_schedule(space);
  ResidualReport rr = residual_report(vf, problem, sched);
  rep.tolerance = rr.tolerance;
  for (const ResidualRow& row : rr.rows) {
    if (excluded[row.point]) {
      ++rep.excluded_near_leaves;
      continue;
    }
    switch (row.cls) {
      case ResidualClass::solution: ++rep.solution; break;
      case ResidualClass::super: ++rep.super; break;
      case ResidualClass::defect: ++rep.defect; break;
      case ResidualClass::unreachable: ++rep.unreachable; break;
    }
  }
  return rep;
}

}  // namespace slopekit
