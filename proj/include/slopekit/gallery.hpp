#pragma once

// Finite discretizations of the example spaces: each builder returns the
// metric, the segment skeleton carrying d_I, and named points.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "slopekit/curve_complex.hpp"
#include "slopekit/error.hpp"
#include "slopekit/metric_space.hpp"

namespace slopekit {

struct GallerySpace {
  std::shared_ptr<const MetricSpace> space;
  std::shared_ptr<const CurveComplex> complex;
  std::map<std::string, PointId> marks;
  /// Every parameter needed to rebuild the space; "builder" names the
  /// constructor.
  nlohmann::json meta;

  PointId mark(const std::string& name) const {
    auto it = marks.find(name);
    if (it == marks.end()) throw Error(Errc::bad_params, "unknown mark '" + name + "'");
    return it->second;
  }

  std::string name() const { return meta.value("builder", std::string("custom")); }
};

namespace detail {

inline Labels labels_from_marks(const std::map<std::string, PointId>& marks) {
  Labels labels;
  for (const auto& [name, id] : marks) {
    auto it = labels.find(id);
    if (it == labels.end() || name < it->second) labels[id] = name;
  }
  return labels;
}

inline GallerySpace assemble(std::vector<std::vector<double>> coords, NormTag norm, double alpha,
                             std::vector<Edge> edges, std::map<std::string, PointId> marks, nlohmann::json meta) {
  auto space = std::make_shared<const MetricSpace>(
      MetricSpace::from_coordinates(norm, coords, alpha, labels_from_marks(marks)));
  auto complex = std::make_shared<const CurveComplex>(space, std::move(edges));
  return GallerySpace{std::move(space), std::move(complex), std::move(marks), std::move(meta)};
}

inline double pow2(int e) { return std::ldexp(1.0, e); }

inline double tent_profile(double t) { return t <= 0.5 ? t : 1.0 - t; }

}  // namespace detail

/// Euclidean [0, 1] at n equispaced points; a length space.
inline GallerySpace build_interval(int n) {
  if (n < 2) throw Error(Errc::bad_params, "interval needs n >= 2");
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < n; ++i) coords.push_back({static_cast<double>(i) / (n - 1)});
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) {
    edges.push_back({static_cast<PointId>(i), static_cast<PointId>(i + 1), coords[i + 1][0] - coords[i][0]});
  }
  std::map<std::string, PointId> marks{{"left", 0}, {"right", static_cast<PointId>(n - 1)}};
  if (n % 2 == 1) marks["mid"] = static_cast<PointId>(n / 2);
  return detail::assemble(std::move(coords), NormTag::euclidean, 1.0, std::move(edges), std::move(marks),
                          {{"builder", "interval"}, {"n", n}});
}

/// [0, 1] with d = |x - y|^alpha. No nonconstant rectifiable curves exist,
/// so the complex has no edges.
inline GallerySpace build_snowflake_interval(int n, double alpha = 0.5) {
  if (n < 3) throw Error(Errc::bad_params, "snowflake interval needs n >= 3");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::bad_alpha, "alpha must lie in (0,1)");
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < n; ++i) coords.push_back({static_cast<double>(i) / (n - 1)});
  std::map<std::string, PointId> marks{{"left", 0}, {"right", static_cast<PointId>(n - 1)}};
  if (n % 2 == 1) marks["mid"] = static_cast<PointId>(n / 2);
  return detail::assemble(std::move(coords), NormTag::snowflake, alpha, {}, std::move(marks),
                          {{"builder", "snowflake"}, {"n", n}, {"alpha", alpha}});
}

/// Locally flat bump on [a, b]: rises with slope 1 to the midpoint and falls
/// back to 0. Reads the first coordinate of each point.
inline ScalarField snowflake_psi(const MetricSpace& space, double a, double b) {
  if (!(a < b)) throw Error(Errc::bad_params, "psi needs a < b");
  const double mid = 0.5 * (a + b);
  std::vector<double> v(space.size(), 0.0);
  for (PointId i = 0; i < space.size(); ++i) {
    double x = space.coordinates(i)[0];
    if (x >= a && x <= mid) {
      v[i] = x - a;
    } else if (x > mid && x <= b) {
      v[i] = b - x;
    }
  }
  return ScalarField(std::move(v));
}

/// Unit circle at angles 2 pi i / n with the chordal (euclidean) metric;
/// neighbors are joined by arcs of length 2 pi / n.
inline GallerySpace build_circle(int n) {
  if (n < 8) throw Error(Errc::bad_params, "circle needs n >= 8");
  std::vector<std::vector<double>> coords;
  for (int i = 0; i < n; ++i) {
    double theta = 2.0 * std::numbers::pi * i / n;
    coords.push_back({std::cos(theta), std::sin(theta)});
  }
  const double arc = 2.0 * std::numbers::pi / n;
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    edges.push_back({static_cast<PointId>(i), static_cast<PointId>((i + 1) % n), arc});
  }
  std::map<std::string, PointId> marks{{"p0", 0}};
  if (n % 2 == 0) marks["antipode"] = static_cast<PointId>(n / 2);
  if (n % 4 == 0) marks["quarter"] = static_cast<PointId>(n / 4);
  return detail::assemble(std::move(coords), NormTag::euclidean, 1.0, std::move(edges), std::move(marks),
                          {{"builder", "circle"}, {"n", n}});
}

/// Interior nodes of an adaptive bisection of [0, root], kept below `end`
/// (end <= root), ascending. A cell is split while it is longer than the
/// target spacing h at either of its ends (clamped to `end`).
///
/// Shrinking h can only split more cells, so meshes for pointwise smaller
/// targets contain the coarser ones. Adjacent cells differ by at most the
/// variation of h, which keeps slope balls two-sided where h is graded.
inline std::vector<double> adaptive_mesh(double root, double end, const std::function<double(double)>& h) {
  std::vector<double> out;
  std::function<void(double, double, int)> visit = [&](double a, double b, int depth) {
    if (!(a < end)) return;
    const double hb = h(std::min(b, end));
    if (depth < 60 && b - a > std::min(h(a), hb)) {
      const double mid = 0.5 * (a + b);
      visit(a, mid, depth + 1);
      if (mid < end) out.push_back(mid);
      visit(mid, b, depth + 1);
    }
  };
  visit(0.0, root, 0);
  std::sort(out.begin(), out.end());
  return out;
}

/// Graded target spacing toward a cone apex at f = 0 on [0, 1]: at most
/// 1/steps, ratio * f away from the apex, and ratio * f_min within f_min of
/// it, where f_min = 1 / (16 steps^decay).
///
/// Spacing never shrinks away from the apex, so no slope ball is one sided.
/// Samples within a few floor spacings of the apex do see the far side of
/// the cone; doubling the density divides the floor by 2^decay. A sample k
/// floor spacings out then sits k 2^decay fine spacings out, while the
/// reported ball can reach about four spacings; the far side is 2/c times
/// the arc away for a cone of arc/chord ratio c, hence 2^decay >= 2.5 c.
inline double apex_spacing(double f, int steps, double ratio = 1.0 / 8.0, int decay = 2) {
  const double f_min = 1.0 / (16.0 * std::pow(static_cast<double>(steps), decay));
  return std::min(1.0 / steps, ratio * std::max(f, f_min));
}

/// Smallest decay with 2^decay >= 5/2 * cone ratio.
inline int apex_decay(double cone_ratio) {
  return std::max(2, static_cast<int>(std::ceil(std::log2(2.5 * cone_ratio))));
}

/// Union over n = 1..N of the l1 segments [0, apex_n] and [apex_n, leaf_n]
/// with apex_n = e_{2n}/(2n^2) + e_{2n+1}/n and leaf_n = e_{2n}/n^2.
///
/// Without grading each segment carries exactly m samples. With `graded`
/// (default) each segment is an adaptive mesh whose spacing is at most
/// 1/(m-1) of the segment and additionally
///   - graded toward the apex with ratio 1/(4+8n), the apex cone being
///     that much sharper than a flat corner;
///   - at most 1/8 of (distance to the origin + 1/(2N^2)) on the inner
///     segments, common to all branches so the origin's ball sees each one;
///   - at most 1/8 of the distance to the origin on the outer segments,
///     because short leaves sit only 1/n^2 away from it.
inline GallerySpace build_spider(int branches, int m, bool graded = true) {
  if (branches < 2) throw Error(Errc::bad_params, "spider needs at least 2 branches");
  if (m < 2) throw Error(Errc::bad_params, "spider needs m >= 2 samples per segment");
  const std::size_t dim = 2 * static_cast<std::size_t>(branches);
  std::vector<std::vector<double>> coords{std::vector<double>(dim, 0.0)};
  std::vector<Edge> edges;
  std::map<std::string, PointId> marks{{"origin", 0}};
  const double near_origin = 1.0 / (2.0 * branches * branches);

  for (int n = 1; n <= branches; ++n) {
    const double nn = static_cast<double>(n) * n;
    const double seg = 1.0 / (2.0 * nn) + 1.0 / n;
    const std::size_t ia = 2 * n - 2, ib = 2 * n - 1;  // e_{2n}, e_{2n+1}
    const double ratio = 1.0 / (4.0 + 8.0 * n);
    const int decay = apex_decay(1.0 + 2.0 * n);

    // Arc positions in (0, seg], origin -> apex and apex -> leaf.
    std::vector<double> inner, outer;
    if (graded) {
      const double half = 0.5 * seg;
      auto h_inner = [&](double s) {
        return std::min(seg * apex_spacing((seg - s) / seg, m - 1, ratio, decay), (s + near_origin) / 8.0);
      };
      // Origin half on the common dyadic root 2, so every branch places its
      // first samples at the same distances from the origin.
      inner = adaptive_mesh(2.0, half, h_inner);
      // Drop a sliver cell left where the common root overshoots the middle.
      if (inner.size() >= 2 && half - inner.back() < 0.5 * (inner.back() - inner[inner.size() - 2])) inner.pop_back();
      inner.push_back(half);
      std::vector<double> upper = adaptive_mesh(half, half, [&](double r) { return h_inner(seg - r); });
      for (auto it = upper.rbegin(); it != upper.rend(); ++it) inner.push_back(seg - *it);
      outer = adaptive_mesh(seg, seg, [&](double s) {
        const double mu = s / seg;
        return std::min(seg * apex_spacing(mu, m - 1, ratio, decay), ((1.0 + mu) / (2.0 * nn) + (1.0 - mu) / n) / 8.0);
      });
    } else {
      for (int j = 1; j < m - 1; ++j) inner.push_back(seg * j / (m - 1));
      outer = inner;
    }
    inner.push_back(seg);
    outer.push_back(seg);

    PointId prev = 0;
    double prev_s = 0.0;
    for (double s : inner) {
      const double l = s / seg;
      std::vector<double> c(dim, 0.0);
      c[ia] = s == seg ? 1.0 / (2.0 * nn) : l / (2.0 * nn);
      c[ib] = s == seg ? 1.0 / n : l / n;
      PointId id = static_cast<PointId>(coords.size());
      coords.push_back(std::move(c));
      edges.push_back({prev, id, s - prev_s});
      prev = id;
      prev_s = s;
    }
    marks["apex:" + std::to_string(n)] = prev;
    prev_s = 0.0;
    for (double s : outer) {
      const double mu = s / seg;
      std::vector<double> c(dim, 0.0);
      c[ia] = s == seg ? 1.0 / nn : (1.0 + mu) / (2.0 * nn);
      c[ib] = s == seg ? 0.0 : (1.0 - mu) / n;
      PointId id = static_cast<PointId>(coords.size());
      coords.push_back(std::move(c));
      edges.push_back({prev, id, s - prev_s});
      prev = id;
      prev_s = s;
    }
    marks["leaf:" + std::to_string(n)] = prev;
  }
  return detail::assemble(std::move(coords), NormTag::l1, 1.0, std::move(edges), std::move(marks),
                          {{"builder", "spider"}, {"branches", branches}, {"samples", m}, {"graded", graded}});
}

namespace detail {

/// Tent parameters t in (0, 1], ascending, always containing the apex 1/2
/// and the end 1. Each half carries (m-1)/2 uniform steps, or an apex
/// graded mesh when requested.
inline std::vector<double> tent_parameters(int m, bool graded) {
  const int steps = (m - 1) / 2;
  std::vector<double> fs;  // interior fractions from the apex, ascending
  if (graded) {
    fs = adaptive_mesh(1.0, 1.0, [&](double f) { return apex_spacing(f, steps); });
  } else {
    for (int j = 1; j < steps; ++j) fs.push_back(static_cast<double>(j) / steps);
  }
  std::vector<double> ts;
  for (auto it = fs.rbegin(); it != fs.rend(); ++it) ts.push_back(0.5 - 0.5 * *it);
  ts.push_back(0.5);
  for (double f : fs) ts.push_back(0.5 + 0.5 * f);
  ts.push_back(1.0);
  return ts;
}

}  // namespace detail

/// Junction x_n = (1/2 - 2^{-n}) e_1 followed by N scaled tents
/// x_n + 2^{-(n+1)} (t e_1 + alpha(t) e_{n+1}), plus x_inf = e_1 / 2.
///
/// The untouched tail beyond tent N is replaced by one closing edge from
/// x_{N+1} to x_inf of length 2^{-N}, the tail's intrinsic length, so
/// d_I(origin, x_inf) = 1 and every retained junction keeps d_I = 2 d.
/// With `graded` (default) samples accumulate toward each tent apex.
inline GallerySpace build_pato(int tents, int m, bool graded = true) {
  if (tents < 2) throw Error(Errc::bad_params, "pato needs at least 2 tents");
  if (m < 3 || m % 2 == 0) throw Error(Errc::bad_params, "pato needs an odd m >= 3 so tent apexes are sampled");
  const std::size_t dim = static_cast<std::size_t>(tents) + 1;
  const std::vector<double> ts = detail::tent_parameters(m, graded);
  std::vector<std::vector<double>> coords;
  std::vector<Edge> edges;
  std::map<std::string, PointId> marks;

  coords.push_back(std::vector<double>(dim, 0.0));
  marks["origin"] = 0;
  marks["x_n:1"] = 0;
  for (int n = 1; n <= tents; ++n) {
    const double x_n = 0.5 - detail::pow2(-n);
    const double scale = detail::pow2(-(n + 1));
    double prev_t = 0.0;
    for (double t : ts) {
      std::vector<double> c(dim, 0.0);
      c[0] = x_n + scale * t;
      c[n] = scale * detail::tent_profile(t);
      PointId id = static_cast<PointId>(coords.size());
      coords.push_back(std::move(c));
      edges.push_back({id - 1, id, detail::pow2(-n) * (t - prev_t)});
      if (t == 0.5) marks["apex:" + std::to_string(n)] = id;
      prev_t = t;
    }
    marks["x_n:" + std::to_string(n + 1)] = static_cast<PointId>(coords.size() - 1);
  }
  std::vector<double> inf(dim, 0.0);
  inf[0] = 0.5;
  PointId last = static_cast<PointId>(coords.size() - 1);
  PointId x_inf = static_cast<PointId>(coords.size());
  coords.push_back(std::move(inf));
  edges.push_back({last, x_inf, detail::pow2(-tents)});
  marks["x_inf"] = x_inf;
  return detail::assemble(std::move(coords), NormTag::l1, 1.0, std::move(edges), std::move(marks),
                          {{"builder", "pato"}, {"tents", tents}, {"samples", m}, {"graded", graded}});
}

namespace detail {

/// Point of the unit pato at arc-length parameter s in [0, 1]: e_1
/// coordinate, tent index (0 for x_inf) and height along e_{n+1}.
struct PatoPoint {
  double e1 = 0.0;
  int tent = 0;
  double height = 0.0;
};

inline PatoPoint pato_point(double s) {
  if (s >= 1.0) return {0.5, 0, 0.0};
  int n = 1;
  while (1.0 - s <= pow2(-n)) ++n;
  const double start = 1.0 - pow2(-(n - 1));
  const double t = (s - start) / pow2(-n);
  const double scale = pow2(-(n + 1));
  double h = scale * tent_profile(t);
  return {0.5 - pow2(-n) + scale * t, n, h};
}

/// The pato metric pulled back to the arc-length parameter.
inline double pato_theta(double s, double t) {
  if (s == t) return 0.0;
  PatoPoint a = pato_point(s), b = pato_point(t);
  double d = std::abs(a.e1 - b.e1);
  if (a.tent == b.tent && a.tent != 0) return d + std::abs(a.height - b.height);
  return d + a.height + b.height;
}

/// Arc-length parameters of a pato sampled at `tents` tents, plus the
/// endpoint 1, ascending.
inline std::vector<double> pato_parameters(int tents, int m, bool graded) {
  const std::vector<double> ts = tent_parameters(m, graded);
  std::vector<double> ps{0.0};
  for (int n = 1; n <= tents; ++n) {
    const double start = 1.0 - pow2(-(n - 1));
    for (double t : ts) ps.push_back(t == 1.0 ? 1.0 - pow2(-n) : start + pow2(-n) * t);
  }
  ps.push_back(1.0);
  return ps;
}

}  // namespace detail

/// Iterated gluing of scaled pato segments.
///
/// Level 1 is the unit pato parametrized by arc length on [0, 1] (root at 0,
/// leaf at 1). Gluing onto level L attaches `per_level` copies of [0, r_i]
/// with r_i = 2^{-(i+L)} and metric r theta(s/r, t/r). Glue points are
/// sample points of level-L segments with nonzero level-L coordinate,
/// distinct coordinates, never a leaf, chosen equispaced in id order. The
/// metric between segments follows the gluing rule: climb from the deeper
/// point to its glue point and add.
inline GallerySpace build_hyperpato(int depth, int per_level, int m, int tents = 4, bool graded = true) {
  if (depth > 4) throw Error(Errc::depth_exceeded, "hyperpato depth " + std::to_string(depth) + " exceeds 4");
  if (depth < 1) throw Error(Errc::bad_params, "hyperpato depth must be at least 1");
  if (per_level < 1) throw Error(Errc::bad_params, "hyperpato needs at least one branch per level");
  if (tents < 1) throw Error(Errc::bad_params, "hyperpato needs at least one tent per segment");
  if (m < 3 || m % 2 == 0) throw Error(Errc::bad_params, "hyperpato needs an odd m >= 3");

  struct Segment {
    int level = 1;
    double r = 1.0;
    PointId glue = kNoPoint;
  };
  struct Sample {
    std::size_t segment = 0;
    double y = 0.0;
  };
  std::vector<Segment> segments{{1, 1.0, kNoPoint}};
  std::vector<Sample> samples;
  std::vector<Edge> edges;
  std::map<std::string, PointId> marks;
  const std::vector<double> unit = detail::pato_parameters(tents, m, graded);

  auto add_segment_samples = [&](std::size_t seg_index) {
    const Segment& seg = segments[seg_index];
    std::vector<double> ys;
    for (double t : unit) ys.push_back(seg.r * t);
    if (graded && seg.glue != kNoPoint) {
      // Match the host's spacing at the glue point, or a ball there sees
      // only host samples.
      double host = INFINITY;
      for (const Edge& e : edges)
        if (e.a == seg.glue || e.b == seg.glue) host = std::min(host, e.length);
      std::vector<double> head{0.0};
      for (double y = ys[1] / 2; 2 * y > host; y /= 2) head.insert(head.begin() + 1, y);
      ys.insert(ys.begin() + 1, head.begin() + 1, head.end());
    }
    PointId prev = seg.glue;
    double prev_y = 0.0;
    for (std::size_t k = 0; k < ys.size(); ++k) {
      if (k == 0 && seg.glue != kNoPoint) continue;
      double y = ys[k];
      PointId id = static_cast<PointId>(samples.size());
      samples.push_back({seg_index, y});
      if (prev != kNoPoint) edges.push_back({prev, id, y - prev_y});
      prev = id;
      prev_y = y;
    }
    return prev;
  };

  PointId trunk_leaf = add_segment_samples(0);
  marks["root"] = 0;
  marks["leaf:1,1"] = trunk_leaf;

  for (int level = 1; level < depth; ++level) {
    std::vector<PointId> candidates;
    for (PointId id = 0; id < samples.size(); ++id) {
      const Segment& seg = segments[samples[id].segment];
      if (seg.level == level && samples[id].y > 0.0 && samples[id].y < seg.r) candidates.push_back(id);
    }
    std::set<double> used_coordinate;
    std::set<PointId> used;
    std::vector<PointId> chosen;
    const std::size_t c = candidates.size();
    for (int i = 0; i < per_level; ++i) {
      std::size_t idx = (static_cast<std::size_t>(i) + 1) * c / (per_level + 1);
      std::size_t tries = 0;
      while (tries < c && (used.count(candidates[idx % c]) || used_coordinate.count(samples[candidates[idx % c]].y))) {
        ++idx;
        ++tries;
      }
      if (tries == c) throw Error(Errc::bad_params, "not enough admissible glue points at level " + std::to_string(level));
      PointId q = candidates[idx % c];
      used.insert(q);
      used_coordinate.insert(samples[q].y);
      chosen.push_back(q);
    }
    for (int i = 0; i < per_level; ++i) {
      segments.push_back({level + 1, detail::pow2(-(i + 1 + level)), chosen[i]});
      PointId leaf = add_segment_samples(segments.size() - 1);
      std::string tag = std::to_string(level + 1) + "," + std::to_string(i + 1);
      marks["leaf:" + tag] = leaf;
      marks["glue:" + tag] = chosen[i];
    }
  }

  const std::size_t n = samples.size();
  auto theta_r = [&](const Segment& seg, double a, double b) {
    return seg.r * detail::pato_theta(a / seg.r, b / seg.r);
  };
  std::function<double(PointId, PointId)> rho = [&](PointId p, PointId q) -> double {
    if (p == q) return 0.0;
    const Sample& sp = samples[p];
    const Sample& sq = samples[q];
    if (sp.segment == sq.segment) return theta_r(segments[sp.segment], sp.y, sq.y);
    const Segment& gp = segments[sp.segment];
    const Segment& gq = segments[sq.segment];
    if (gp.level < gq.level || (gp.level == gq.level && sp.segment < sq.segment)) return rho(q, p);
    return theta_r(gp, sp.y, 0.0) + rho(gp.glue, q);
  };
  std::vector<double> matrix(n * n, 0.0);
  for (PointId i = 0; i < n; ++i) {
    for (PointId j = i + 1; j < n; ++j) {
      double d = rho(i, j);
      matrix[static_cast<std::size_t>(i) * n + j] = d;
      matrix[static_cast<std::size_t>(j) * n + i] = d;
    }
  }
  std::vector<double> trunk;
  for (const Sample& s : samples) trunk.push_back(s.segment == 0 ? s.y : -1.0);

  auto space = std::make_shared<const MetricSpace>(
      MetricSpace::from_matrix(std::move(matrix), n, detail::labels_from_marks(marks)));
  auto complex = std::make_shared<const CurveComplex>(space, std::move(edges));
  nlohmann::json meta{{"builder", "hyperpato"}, {"depth", depth}, {"per_level", per_level},
                      {"samples", m},           {"tents", tents}, {"graded", graded},
                      {"trunk_parameter", trunk}};
  return GallerySpace{std::move(space), std::move(complex), std::move(marks), std::move(meta)};
}

/// Polylines Gamma_n in c_0 (sup norm) for n = 2..N+1: t (e_1 + e_n) for
/// t in [0, 1/2), then t e_1 + (1 - t) e_n for t in [1/2, 1 - 1/n). Both
/// pieces are half open, so each branch ends at the last sample before its
/// open endpoint ("tip:n"), and e_1 is an isolated vertex.
///
/// With `graded` (default) the uniform steps are replaced by adaptive
/// meshes graded toward the origin, where any two branches form a cone of
/// arc/chord ratio 2, and toward e_1, which the tips approach at distance
/// 1/n.
inline GallerySpace build_c0_star(int branches, int m, bool graded = true) {
  if (branches < 3) throw Error(Errc::bad_params, "c0 star needs at least 3 branches");
  if (m < 3) throw Error(Errc::bad_params, "c0 star needs m >= 3 samples per segment");
  const std::size_t dim = static_cast<std::size_t>(branches) + 1;  // e_1 -> 0, e_n -> n - 1
  std::vector<std::vector<double>> coords{std::vector<double>(dim, 0.0)};
  std::vector<double> e1(dim, 0.0);
  e1[0] = 1.0;
  coords.push_back(std::move(e1));
  std::map<std::string, PointId> marks{{"origin", 0}, {"e1", 1}};
  std::vector<Edge> edges;
  // Rising piece, identical on every branch.
  std::vector<double> rising;
  if (graded) {
    rising = adaptive_mesh(0.5, 0.5, [&](double t) { return 0.5 * apex_spacing(2.0 * t, m - 1); });
  } else {
    for (int j = 1; j < m - 1; ++j) rising.push_back(0.5 * j / (m - 1));
  }

  for (int n = 2; n <= branches + 1; ++n) {
    const double end = 1.0 - 1.0 / n;
    std::vector<double> ts = rising;
    if (end > 0.5) {
      ts.push_back(0.5);
      if (graded) {
        for (double r : adaptive_mesh(0.5, end - 0.5, [&](double r) {
               return std::min(0.5 / (m - 1), (0.5 - r) / 8.0);
             })) {
          ts.push_back(0.5 + r);
        }
      } else {
        for (int j = 1; j < m - 1; ++j) ts.push_back(0.5 + (end - 0.5) * j / (m - 1));
      }
    }
    PointId prev = 0;
    double prev_t = 0.0;
    for (double t : ts) {
      std::vector<double> c(dim, 0.0);
      c[0] = t;
      c[n - 1] = t <= 0.5 ? t : 1.0 - t;
      PointId id = static_cast<PointId>(coords.size());
      coords.push_back(std::move(c));
      edges.push_back({prev, id, t - prev_t});
      prev = id;
      prev_t = t;
    }
    marks["tip:" + std::to_string(n)] = prev;
  }
  return detail::assemble(std::move(coords), NormTag::linf, 1.0, std::move(edges), std::move(marks),
                          {{"builder", "c0star"}, {"branches", branches}, {"samples", m}, {"graded", graded}});
}

/// X x [0, 1] at m heights with rho((x, s), (y, t)) = d(x, y) + |s - t|.
/// The complex holds a copy of X's edges at each height plus vertical rungs.
inline GallerySpace product_with_interval(const GallerySpace& g, int m) {
  if (m < 2) throw Error(Errc::bad_params, "product needs m >= 2 heights");
  const std::size_t nb = g.space->size();
  std::vector<std::pair<PointId, double>> points;
  std::vector<double> heights;
  for (int j = 0; j < m; ++j) heights.push_back(static_cast<double>(j) / (m - 1));
  for (int j = 0; j < m; ++j) {
    for (PointId i = 0; i < nb; ++i) points.emplace_back(i, heights[j]);
  }
  std::vector<Edge> edges;
  for (int j = 0; j < m; ++j) {
    const PointId off = static_cast<PointId>(j * nb);
    for (const Edge& e : g.complex->edges()) edges.push_back({e.a + off, e.b + off, e.length});
  }
  for (int j = 0; j + 1 < m; ++j) {
    for (PointId i = 0; i < nb; ++i) {
      edges.push_back({static_cast<PointId>(i + j * nb), static_cast<PointId>(i + (j + 1) * nb),
                       heights[j + 1] - heights[j]});
    }
  }
  std::map<std::string, PointId> marks;
  for (int j = 0; j < m; ++j) {
    for (const auto& [name, id] : g.marks) marks[name + "@" + std::to_string(j)] = static_cast<PointId>(id + j * nb);
  }
  auto space = std::make_shared<const MetricSpace>(
      MetricSpace::product_sum(g.space, std::move(points), detail::labels_from_marks(marks)));
  auto complex = std::make_shared<const CurveComplex>(space, std::move(edges));
  return GallerySpace{std::move(space), std::move(complex), std::move(marks),
                      {{"builder", "product"}, {"levels", m}, {"base", g.meta}}};
}

/// Rebuilds a gallery space from its meta record.
inline GallerySpace rebuild(const nlohmann::json& meta) {
  const std::string b = meta.value("builder", std::string());
  try {
    if (b == "interval") return build_interval(meta.at("n").get<int>());
    if (b == "snowflake") return build_snowflake_interval(meta.at("n").get<int>(), meta.value("alpha", 0.5));
    if (b == "circle") return build_circle(meta.at("n").get<int>());
    if (b == "spider") {
      return build_spider(meta.at("branches").get<int>(), meta.at("samples").get<int>(), meta.value("graded", true));
    }
    if (b == "pato") {
      return build_pato(meta.at("tents").get<int>(), meta.at("samples").get<int>(), meta.value("graded", true));
    }
    if (b == "hyperpato") {
      return build_hyperpato(meta.at("depth").get<int>(), meta.at("per_level").get<int>(),
                             meta.at("samples").get<int>(), meta.value("tents", 4), meta.value("graded", true));
    }
    if (b == "c0star") return build_c0_star(meta.at("branches").get<int>(), meta.at("samples").get<int>(),
                                           meta.value("graded", true));
    if (b == "product") return product_with_interval(rebuild(meta.at("base")), meta.at("levels").get<int>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_params, std::string("malformed meta: ") + e.what());
  }
  throw Error(Errc::unknown_space, "unknown builder '" + b + "'");
}

/// Meta of the same space at doubled sampling density. Nested samplings
/// are used wherever the builder allows, so coarse points reappear.
inline nlohmann::json refined_meta(const nlohmann::json& meta) {
  nlohmann::json r = meta;
  const std::string b = meta.value("builder", std::string());
  if (b == "interval" || b == "snowflake") {
    r["n"] = 2 * meta.at("n").get<int>() - 1;
  } else if (b == "circle") {
    r["n"] = 2 * meta.at("n").get<int>();
  } else if (b == "spider" || b == "pato" || b == "hyperpato" || b == "c0star") {
    r["samples"] = 2 * meta.at("samples").get<int>() - 1;
  } else if (b == "product") {
    r["base"] = refined_meta(meta.at("base"));
    r["levels"] = 2 * meta.at("levels").get<int>() - 1;
  } else {
    throw Error(Errc::unknown_space, "cannot refine builder '" + b + "'");
  }
  if (r.contains("trunk_parameter")) r.erase("trunk_parameter");
  return r;
}

/// Position of a point that survives refinement: coordinates, base locator
/// plus height for products, trunk parameter for hyperpato. Empty when the
/// point has no stable position.
inline std::vector<double> locator(const GallerySpace& g, PointId x) {
  const MetricSpace& s = *g.space;
  if (s.has_coordinates()) {
    auto c = s.coordinates(x);
    return {c.begin(), c.end()};
  }
  if (s.norm() == NormTag::product_sum && g.meta.contains("base")) {
    GallerySpace base{s.base(), nullptr, {}, g.meta.at("base")};
    auto [b, h] = s.product_points()[x];
    std::vector<double> loc = locator(base, b);
    if (loc.empty()) return {};
    loc.push_back(h);
    return loc;
  }
  if (g.meta.contains("trunk_parameter")) {
    double t = g.meta.at("trunk_parameter").at(x).get<double>();
    if (t >= 0.0) return {t};
  }
  return {};
}

/// Finds the points of a target space that correspond to points of a
/// source space: same mark name, otherwise the same locator.
class PointMatcher {
 public:
  explicit PointMatcher(const GallerySpace& target) : target_(&target) {
    for (PointId y = 0; y < target.space->size(); ++y) {
      std::vector<double> loc = locator(target, y);
      if (!loc.empty()) by_locator_.emplace(std::move(loc), y);
    }
  }

  std::optional<PointId> operator()(const GallerySpace& source, PointId x) const {
    for (const auto& [name, id] : source.marks) {
      if (id != x) continue;
      auto it = target_->marks.find(name);
      if (it != target_->marks.end()) return it->second;
    }
    std::vector<double> loc = locator(source, x);
    if (loc.empty()) return std::nullopt;
    if (auto it = by_locator_.find(loc); it != by_locator_.end()) return it->second;
    // Tolerate last-digit differences between independently built samplings.
    for (const auto& [other, y] : by_locator_) {
      if (other.size() != loc.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < loc.size() && same; ++k) same = std::abs(loc[k] - other[k]) <= 1e-12;
      if (same) return y;
    }
    return std::nullopt;
  }

 private:
  const GallerySpace* target_;
  std::map<std::vector<double>, PointId> by_locator_;
};

}  // namespace slopekit
