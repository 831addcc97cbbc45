#pragma once

// Discrete local slope: s[u](x) at scale r is the largest descent quotient
// max(u(x) - u(y), 0) / d(x, y) over the punctured ball of radius r.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "slopekit/error.hpp"
#include "slopekit/metric_space.hpp"
#include "slopekit/parallel.hpp"

namespace slopekit {

struct RadiusSchedule {
  std::vector<double> radii;  // strictly decreasing
  int min_neighbors = 3;

  void validate() const {
    if (radii.empty()) throw Error(Errc::bad_params, "radius schedule is empty");
    if (min_neighbors < 1) throw Error(Errc::bad_params, "min_neighbors must be positive");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw Error(Errc::bad_params, "radii must be positive");
      if (i > 0 && !(radii[i] < radii[i - 1])) throw Error(Errc::bad_params, "radii must be strictly decreasing");
    }
  }
};

/// Geometric radii with ratio 1/2 from diameter/4 down to twice the finest
/// nearest-neighbor spacing (at least one radius).
inline RadiusSchedule default_schedule(const MetricSpace& space, int min_neighbors = 3) {
  RadiusSchedule s;
  s.min_neighbors = min_neighbors;
  const double top = diameter(space) / 4.0;
  const double floor = 2.0 * finest_spacing(space);
  if (!(top > 0.0)) {
    s.radii = {1.0};
    return s;
  }
  for (double r = top; r >= floor && s.radii.size() < 64; r *= 0.5) s.radii.push_back(r);
  if (s.radii.empty()) s.radii.push_back(top);
  return s;
}

/// Whether undefined values inside a ball are an error or simply excluded
/// (slope of the restriction to the field's domain).
enum class UndefinedPolicy { error, skip };

struct ScaleValue {
  double radius = 0.0;
  std::optional<double> value;  // nullopt = EMPTY ball
  PointId witness = kNoPoint;
  std::size_t candidates = 0;
};

struct SlopeProfile {
  PointId point = kNoPoint;
  std::vector<ScaleValue> per_radius;
  double reported = 0.0;
  PointId witness = kNoPoint;
  double reported_radius = 0.0;  // 0 when the point is isolated at every scale
  bool populated = false;        // reported radius had >= min_neighbors candidates

  bool isolated() const { return reported_radius == 0.0; }
};

namespace detail {

// Strictly larger quotient wins; equal quotients go to the smaller id.
inline bool better(double q, PointId y, double best_q, PointId best_y) {
  return q > best_q || (q == best_q && y < best_y);
}

inline double descent_quotient(double ux, double uy, double d) {
  double drop = ux - uy;
  return drop > 0.0 ? drop / d : 0.0;
}

inline void require_defined(const ScalarField& u, PointId x) {
  if (!u.defined(x)) throw Error(Errc::undefined_field, "field undefined at point " + std::to_string(x));
}

}  // namespace detail

inline ScaleValue slope_at_scale_detail(const MetricSpace& space, const ScalarField& u, PointId x, double r,
                                        UndefinedPolicy policy = UndefinedPolicy::error) {
  if (!(r > 0.0)) throw Error(Errc::bad_params, "radius must be positive");
  detail::require_defined(u, x);
  ScaleValue out;
  out.radius = r;
  double best = -1.0;
  for (PointId y = 0; y < space.size(); ++y) {
    if (y == x) continue;
    double d = space.dist(x, y);
    if (!(d <= r) || d == 0.0) continue;
    if (!u.defined(y)) {
      if (policy == UndefinedPolicy::error) detail::require_defined(u, y);
      continue;
    }
    ++out.candidates;
    double q = detail::descent_quotient(u[x], u[y], d);
    if (detail::better(q, y, best, out.witness)) {
      best = q;
      out.witness = y;
    }
  }
  if (out.candidates > 0) out.value = best;
  return out;
}

/// Slope of u at x restricted to the ball of radius r; nullopt when the
/// ball holds no other point.
inline std::optional<double> slope_at_scale(const MetricSpace& space, const ScalarField& u, PointId x, double r,
                                            UndefinedPolicy policy = UndefinedPolicy::error) {
  return slope_at_scale_detail(space, u, x, r, policy).value;
}

/// Neighbors of every point within a fixed radius, sorted by (distance, id).
/// Built once and shared by many profile computations.
///
/// With `keep` > 0 each list is cut after about `keep` entries: it then
/// holds every neighbor closer than limit(x) and nothing else, which keeps
/// memory linear in the number of points on large spaces.
class NeighborIndex {
 public:
  struct Neighbor {
    double d;
    PointId id;
  };

  NeighborIndex(const MetricSpace& space, double r_max, std::size_t keep = 0) : space_(&space), r_max_(r_max) {
    const std::size_t n = space.size();
    lists_.resize(n);
    limits_.assign(n, std::numeric_limits<double>::infinity());
    auto less = [](const Neighbor& a, const Neighbor& b) { return a.d < b.d || (a.d == b.d && a.id < b.id); };
    parallel_for(n, [&](std::size_t i) {
      std::vector<Neighbor> list;
      for (PointId y = 0; y < n; ++y) {
        if (y == i) continue;
        double d = space.dist(static_cast<PointId>(i), y);
        if (d > 0.0 && d <= r_max) list.push_back({d, y});
      }
      if (keep > 0 && list.size() > keep) {
        std::nth_element(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(keep), list.end(), less);
        const double cut = list[keep].d;
        std::erase_if(list, [cut](const Neighbor& nb) { return nb.d >= cut; });
        limits_[i] = cut;
      }
      std::sort(list.begin(), list.end(), less);
      list.shrink_to_fit();
      lists_[i] = std::move(list);
    });
  }

  const MetricSpace& space() const { return *space_; }
  double radius() const { return r_max_; }
  const std::vector<Neighbor>& neighbors(PointId x) const { return lists_[x]; }
  /// Balls of radius r around x are fully listed iff r < limit(x) (and
  /// r <= radius()).
  double limit(PointId x) const { return limits_[x]; }

 private:
  const MetricSpace* space_;
  double r_max_;
  std::vector<std::vector<Neighbor>> lists_;
  std::vector<double> limits_;
};

namespace detail {

inline void finish_profile(SlopeProfile& p, int min_neighbors) {
  const ScaleValue* fallback = nullptr;
  const ScaleValue* chosen = nullptr;
  for (const ScaleValue& s : p.per_radius) {  // radii decrease, so the last hit is the smallest
    if (!s.value) continue;
    fallback = &s;
    if (s.candidates >= static_cast<std::size_t>(min_neighbors)) chosen = &s;
  }
  const ScaleValue* use = chosen ? chosen : fallback;
  if (use) {
    p.reported = *use->value;
    p.witness = use->witness;
    p.reported_radius = use->radius;
    p.populated = chosen != nullptr;
  }
}

}  // namespace detail

/// Profile of u at x over the schedule. With `reported_only` the walk stops
/// at the first populated radius, so per_radius holds only the radii up to
/// the reported one; the reported value is unchanged.
inline SlopeProfile slope_profile(const NeighborIndex& index, const ScalarField& u, PointId x,
                                  const RadiusSchedule& schedule, UndefinedPolicy policy = UndefinedPolicy::error,
                                  bool reported_only = false) {
  if (!schedule.radii.empty() && schedule.radii.front() > index.radius()) {
    throw Error(Errc::bad_params, "schedule exceeds neighbor index radius");
  }
  detail::require_defined(u, x);
  SlopeProfile p;
  p.point = x;
  const auto& nb = index.neighbors(x);
  // Walk radii from smallest to largest, extending a running argmax over the
  // sorted neighbor list; balls are nested, so profiles are monotone exactly.
  // Past a truncated list's limit the ball is scanned directly.
  std::vector<ScaleValue> rev;
  std::size_t k = 0, count = 0;
  double best = -1.0;
  PointId witness = kNoPoint;
  for (auto it = schedule.radii.rbegin(); it != schedule.radii.rend(); ++it) {
    const double r = *it;
    ScaleValue s;
    if (r < index.limit(x)) {
      for (; k < nb.size() && nb[k].d <= r; ++k) {
        PointId y = nb[k].id;
        if (!u.defined(y)) {
          if (policy == UndefinedPolicy::error) detail::require_defined(u, y);
          continue;
        }
        ++count;
        double q = detail::descent_quotient(u[x], u[y], nb[k].d);
        if (detail::better(q, y, best, witness)) {
          best = q;
          witness = y;
        }
      }
      s.radius = r;
      s.candidates = count;
      if (count > 0) {
        s.value = best;
        s.witness = witness;
      }
    } else {
      s = slope_at_scale_detail(index.space(), u, x, r, policy);
    }
    rev.push_back(s);
    if (reported_only && s.candidates >= static_cast<std::size_t>(schedule.min_neighbors)) break;
  }
  p.per_radius.assign(rev.rbegin(), rev.rend());
  detail::finish_profile(p, schedule.min_neighbors);
  return p;
}

inline SlopeProfile slope_profile(const MetricSpace& space, const ScalarField& u, PointId x,
                                  const RadiusSchedule& schedule, UndefinedPolicy policy = UndefinedPolicy::error) {
  schedule.validate();
  SlopeProfile p;
  p.point = x;
  for (double r : schedule.radii) p.per_radius.push_back(slope_at_scale_detail(space, u, x, r, policy));
  detail::finish_profile(p, schedule.min_neighbors);
  return p;
}

/// Profiles at every listed point (all points when `points` is empty).
/// Points where u is undefined are skipped under UndefinedPolicy::skip.
inline std::vector<SlopeProfile> slope_profiles(const NeighborIndex& index, const ScalarField& u,
                                                const RadiusSchedule& schedule, std::vector<PointId> points = {},
                                                UndefinedPolicy policy = UndefinedPolicy::error,
                                                bool reported_only = false) {
  schedule.validate();
  if (points.empty()) {
    for (PointId x = 0; x < index.space().size(); ++x) points.push_back(x);
  }
  if (policy == UndefinedPolicy::skip) {
    std::erase_if(points, [&](PointId x) { return !u.defined(x); });
  }
  std::vector<SlopeProfile> out(points.size());
  parallel_for(points.size(),
               [&](std::size_t i) { out[i] = slope_profile(index, u, points[i], schedule, policy, reported_only); });
  return out;
}

struct FlatPerturbationReport {
  bool passed = true;
  double tolerance = 0.0;
  double max_difference = 0.0;
  PointId worst = kNoPoint;
  std::vector<double> base_slopes;
  std::vector<double> perturbed_slopes;
};

/// Compares reported slopes of u and u + psi point by point; passes iff
/// they agree within 2 * (smallest radius) everywhere.
inline FlatPerturbationReport flat_perturbation_check(const MetricSpace& space, const ScalarField& u,
                                                      const ScalarField& psi, const RadiusSchedule& schedule) {
  schedule.validate();
  if (u.size() != space.size() || psi.size() != space.size()) {
    throw Error(Errc::bad_params, "fields must cover the space");
  }
  ScalarField v = u + psi;
  NeighborIndex index(space, schedule.radii.front());
  auto a = slope_profiles(index, u, schedule);
  auto b = slope_profiles(index, v, schedule);
  FlatPerturbationReport rep;
  rep.tolerance = 2.0 * schedule.radii.back();
  for (std::size_t i = 0; i < a.size(); ++i) {
    rep.base_slopes.push_back(a[i].reported);
    rep.perturbed_slopes.push_back(b[i].reported);
    double diff = std::abs(a[i].reported - b[i].reported);
    if (rep.worst == kNoPoint || diff > rep.max_difference) {
      rep.max_difference = diff;
      rep.worst = a[i].point;
    }
  }
  // 1e-12 absorbs rounding in quotients that sit exactly on the bound.
  rep.passed = rep.max_difference <= rep.tolerance + 1e-12;
  return rep;
}

}  // namespace slopekit
