#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "slopekit/error.hpp"
#include "slopekit/extended.hpp"
#include "slopekit/metric_space.hpp"
#include "slopekit/parallel.hpp"

namespace slopekit {

/// Rectifiable segment between two sample points. `length` is the intrinsic
/// length of the segment, taken from a closed form, never from d(a, b).
struct Edge {
  PointId a = 0;
  PointId b = 0;
  double length = 0.0;

  PointId other(PointId x) const { return x == a ? b : a; }
};

/// Graph of curve segments over a metric space; carrier of d_I.
class CurveComplex {
 public:
  static constexpr double kChordTolerance = 1e-12;

  CurveComplex(std::shared_ptr<const MetricSpace> space, std::vector<Edge> edges)
      : space_(std::move(space)), edges_(std::move(edges)) {
    if (!space_) throw Error(Errc::bad_params, "complex needs a space");
    const std::size_t n = space_->size();
    std::vector<std::uint32_t> degree(n, 0);
    for (const Edge& e : edges_) {
      if (e.a >= n || e.b >= n) throw Error(Errc::bad_params, "edge endpoint out of range");
      if (e.a == e.b) throw Error(Errc::bad_params, "loop edge at point " + std::to_string(e.a));
      if (!(e.length > 0.0) || !std::isfinite(e.length)) {
        throw Error(Errc::bad_params, "edge length must be a positive real");
      }
      if (e.length < space_->dist(e.a, e.b) - kChordTolerance) {
        throw Error(Errc::bad_params, "edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                                          ") is shorter than the chord distance");
      }
      ++degree[e.a];
      ++degree[e.b];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    incidence_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t k = 0; k < edges_.size(); ++k) {
      incidence_[fill[edges_[k].a]++] = k;
      incidence_[fill[edges_[k].b]++] = k;
    }
  }

  const MetricSpace& space() const { return *space_; }
  const std::shared_ptr<const MetricSpace>& space_ptr() const { return space_; }
  std::size_t size() const { return space_->size(); }
  std::span<const Edge> edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  /// Indices into edges() of the edges touching x.
  std::span<const std::uint32_t> incident(PointId x) const {
    return {incidence_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

  /// Shortest edge joining a and b, if any.
  std::optional<double> edge_length(PointId a, PointId b) const {
    std::optional<double> best;
    for (std::uint32_t k : incident(a)) {
      const Edge& e = edges_[k];
      if (e.other(a) == b && (!best || e.length < *best)) best = e.length;
    }
    return best;
  }

 private:
  std::shared_ptr<const MetricSpace> space_;
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> incidence_;
};

/// Discrete curve: consecutive vertices share an edge of the complex.
struct Polyline {
  std::vector<PointId> vertices;
};

inline double curve_length(const CurveComplex& complex, const Polyline& p) {
  if (p.vertices.empty()) throw Error(Errc::bad_params, "polyline needs at least one vertex");
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    auto len = complex.edge_length(p.vertices[i], p.vertices[i + 1]);
    if (!len) {
      throw Error(Errc::disconnected_step, "no edge between " + std::to_string(p.vertices[i]) + " and " +
                                               std::to_string(p.vertices[i + 1]));
    }
    total += *len;
  }
  return total;
}

/// Result of a best-first search: distance (+inf when unreached) and the
/// predecessor toward the source set (kNoPoint at sources and unreached).
struct SearchTree {
  std::vector<double> dist;
  std::vector<PointId> pred;

  bool reached(PointId x) const { return std::isfinite(dist[x]); }
};

/// Multi-source best-first search over the complex.
///
/// `cost(edge)` gives the nonnegative weight of an edge. A vertex v is
/// entered only if `can_enter(v)`; the search continues out of v only if
/// `can_expand(v)` (sources always expand). Among equal keys the smaller
/// PointId is settled first, and among equal candidate distances the
/// smaller predecessor wins, so trees are reproducible.
template <class Cost, class Enter, class Expand>
SearchTree best_first(const CurveComplex& complex, std::span<const PointId> sources,
                      std::span<const double> source_values, Cost&& cost, Enter&& can_enter,
                      Expand&& can_expand, PointId stop_at = kNoPoint) {
  const std::size_t n = complex.size();
  SearchTree tree;
  tree.dist.assign(n, std::numeric_limits<double>::infinity());
  tree.pred.assign(n, kNoPoint);
  std::vector<bool> settled(n, false);
  std::vector<bool> is_source(n, false);

  using Item = std::pair<double, PointId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    PointId s = sources[i];
    double v = source_values.empty() ? 0.0 : source_values[i];
    is_source[s] = true;
    if (v < tree.dist[s]) {
      tree.dist[s] = v;
      heap.emplace(v, s);
    }
  }
  while (!heap.empty()) {
    auto [du, u] = heap.top();
    heap.pop();
    if (settled[u] || du > tree.dist[u]) continue;
    settled[u] = true;
    if (u == stop_at) break;
    if (!is_source[u] && !can_expand(u)) continue;
    for (std::uint32_t k : complex.incident(u)) {
      const Edge& e = complex.edges()[k];
      PointId v = e.other(u);
      if (settled[v] || is_source[v] || !can_enter(v)) continue;
      double nd = du + cost(e);
      if (nd < tree.dist[v] || (nd == tree.dist[v] && u < tree.pred[v])) {
        tree.dist[v] = nd;
        tree.pred[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  return tree;
}

namespace detail {
inline SearchTree length_search(const CurveComplex& complex, std::span<const PointId> sources,
                                PointId stop_at = kNoPoint) {
  auto always = [](PointId) { return true; };
  return best_first(complex, sources, {}, [](const Edge& e) { return e.length; }, always, always, stop_at);
}
}  // namespace detail

/// Exact shortest-path length in the complex; infinite across components.
inline Extended intrinsic_distance(const CurveComplex& complex, PointId x, PointId y) {
  if (x >= complex.size() || y >= complex.size()) throw Error(Errc::bad_params, "point out of range");
  if (x == y) return Extended(0.0);
  PointId src[] = {x};
  SearchTree t = detail::length_search(complex, src, y);
  return t.reached(y) ? Extended(t.dist[y]) : Extended::infinite();
}

/// Search tree of d_I(., K); exposes predecessors for curve extraction.
inline SearchTree intrinsic_distance_tree(const CurveComplex& complex, std::span<const PointId> targets) {
  if (targets.empty()) throw Error(Errc::empty_target, "target set is empty");
  for (PointId k : targets) {
    if (k >= complex.size()) throw Error(Errc::bad_params, "target out of range");
  }
  return detail::length_search(complex, targets);
}

/// d_I(., K). Points outside K's component are left undefined (value +inf).
inline ScalarField intrinsic_distance_field(const CurveComplex& complex, std::span<const PointId> targets) {
  SearchTree t = intrinsic_distance_tree(complex, targets);
  std::vector<bool> mask(t.dist.size());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = std::isfinite(t.dist[i]);
  return ScalarField(std::move(t.dist), std::move(mask));
}

/// Backtracks predecessors from x to the source set of `tree`.
inline Polyline backtrack(const SearchTree& tree, PointId x) {
  if (!tree.reached(x)) throw Error(Errc::unreachable, "point " + std::to_string(x) + " is not reachable");
  Polyline p;
  for (PointId v = x; v != kNoPoint; v = tree.pred[v]) p.vertices.push_back(v);
  return p;
}

/// Minimizing polyline from x to the nearest point of K.
inline Polyline extract_shortest_polyline(const CurveComplex& complex, PointId x, std::span<const PointId> targets) {
  SearchTree t = intrinsic_distance_tree(complex, targets);
  return backtrack(t, x);
}

/// Which pairs quasiconvexity_constant inspects.
struct PairSampling {
  enum class Mode { exhaustive, sources, explicit_pairs };
  Mode mode = Mode::exhaustive;
  std::vector<PointId> sources;                        // Mode::sources: each source against all points
  std::vector<std::pair<PointId, PointId>> pairs;      // Mode::explicit_pairs

  static PairSampling exhaustive() { return {}; }
  static PairSampling from_sources(std::vector<PointId> s) { return {Mode::sources, std::move(s), {}}; }
  static PairSampling from_pairs(std::vector<std::pair<PointId, PointId>> p) {
    return {Mode::explicit_pairs, {}, std::move(p)};
  }
};

struct QuasiconvexityResult {
  Extended constant{1.0};
  PointId x = kNoPoint;
  PointId y = kNoPoint;
  std::size_t pairs_checked = 0;
};

/// sup of d_I(x, y) / d(x, y) over the sampled pairs with an argmax witness.
/// Infinite as soon as a sampled pair is disconnected; the witness is then
/// the first such pair in (x, y) order.
inline QuasiconvexityResult quasiconvexity_constant(const MetricSpace& space, const CurveComplex& complex,
                                                    const PairSampling& sampling = PairSampling::exhaustive()) {
  const std::size_t n = space.size();
  // Group pairs by their first point so each group costs one search.
  std::vector<std::pair<PointId, std::vector<PointId>>> groups;
  switch (sampling.mode) {
    case PairSampling::Mode::exhaustive:
      for (PointId x = 0; x + 1 < n; ++x) {
        std::vector<PointId> ys;
        for (PointId y = x + 1; y < n; ++y) ys.push_back(y);
        groups.emplace_back(x, std::move(ys));
      }
      break;
    case PairSampling::Mode::sources:
      for (PointId x : sampling.sources) {
        std::vector<PointId> ys;
        for (PointId y = 0; y < n; ++y) {
          if (y != x) ys.push_back(y);
        }
        groups.emplace_back(x, std::move(ys));
      }
      break;
    case PairSampling::Mode::explicit_pairs: {
      std::vector<std::pair<PointId, PointId>> sorted = sampling.pairs;
      std::sort(sorted.begin(), sorted.end());
      for (auto [x, y] : sorted) {
        if (x == y) continue;
        if (groups.empty() || groups.back().first != x) groups.emplace_back(x, std::vector<PointId>{});
        groups.back().second.push_back(y);
      }
      break;
    }
  }

  struct Partial {
    double ratio = 0.0;
    bool infinite = false;
    PointId y = kNoPoint;
    std::size_t count = 0;
  };
  std::vector<Partial> partial(groups.size());
  parallel_for(groups.size(), [&](std::size_t g) {
    const auto& [x, ys] = groups[g];
    PointId src[] = {x};
    SearchTree t = detail::length_search(complex, src);
    Partial p;
    for (PointId y : ys) {
      ++p.count;
      if (!t.reached(y)) {
        if (!p.infinite) {
          p.infinite = true;
          p.y = y;
        }
        continue;
      }
      if (p.infinite) continue;
      double r = t.dist[y] / space.dist(x, y);
      if (r > p.ratio) {
        p.ratio = r;
        p.y = y;
      }
    }
    partial[g] = p;
  });

  QuasiconvexityResult res;
  res.constant = Extended(0.0);
  bool any = false;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Partial& p = partial[g];
    res.pairs_checked += p.count;
    if (p.y == kNoPoint) continue;
    if (p.infinite) {
      if (!res.constant.is_infinite()) {
        res.constant = Extended::infinite();
        res.x = groups[g].first;
        res.y = p.y;
      }
      any = true;
      continue;
    }
    if (res.constant.is_finite() && (!any || p.ratio > res.constant.raw())) {
      res.constant = Extended(p.ratio);
      res.x = groups[g].first;
      res.y = p.y;
      any = true;
    }
  }
  if (!any) res.constant = Extended(1.0);
  return res;
}

}  // namespace slopekit
