#pragma once

// Slope eikonal problem s[u] = ell on omega, u = g on the boundary, solved
// through the optimal-control value function on the curve complex.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slopekit/curve_complex.hpp"
#include "slopekit/error.hpp"
#include "slopekit/metric_space.hpp"
#include "slopekit/parallel.hpp"
#include "slopekit/slope.hpp"

namespace slopekit {

struct EikonalProblem {
  std::shared_ptr<const CurveComplex> complex;
  std::vector<PointId> omega;
  std::vector<PointId> boundary;
  ScalarField ell;  // defined on omega and boundary
  ScalarField g;    // defined on boundary

  const MetricSpace& space() const { return complex->space(); }

  /// Membership masks (omega, boundary) over the whole space.
  std::pair<std::vector<bool>, std::vector<bool>> masks() const {
    std::vector<bool> in_omega(complex->size(), false), in_boundary(complex->size(), false);
    for (PointId x : omega) in_omega[x] = true;
    for (PointId x : boundary) in_boundary[x] = true;
    return {std::move(in_omega), std::move(in_boundary)};
  }

  void validate() const {
    if (!complex) throw Error(Errc::invalid_problem, "problem has no complex");
    const std::size_t n = complex->size();
    if (omega.empty()) throw Error(Errc::invalid_problem, "omega is empty");
    if (ell.size() != n || g.size() != n) throw Error(Errc::invalid_problem, "ell and g must span the space");
    std::vector<bool> seen(n, false);
    for (PointId x : omega) {
      if (x >= n) throw Error(Errc::invalid_problem, "omega point out of range");
      if (seen[x]) throw Error(Errc::invalid_problem, "omega lists point " + std::to_string(x) + " twice");
      seen[x] = true;
    }
    std::vector<bool> bseen(n, false);
    for (PointId x : boundary) {
      if (x >= n) throw Error(Errc::invalid_problem, "boundary point out of range");
      if (seen[x]) throw Error(Errc::invalid_problem, "point " + std::to_string(x) + " is in omega and boundary");
      if (bseen[x]) throw Error(Errc::invalid_problem, "boundary lists point " + std::to_string(x) + " twice");
      bseen[x] = true;
      if (!g.defined(x)) throw Error(Errc::invalid_problem, "g undefined at boundary point " + std::to_string(x));
    }
    auto check_ell = [&](PointId x) {
      if (!ell.defined(x)) throw Error(Errc::invalid_problem, "ell undefined at point " + std::to_string(x));
      if (!(ell[x] > 0.0)) throw Error(Errc::nonpositive_ell, "ell must be positive at point " + std::to_string(x));
    };
    for (PointId x : omega) check_ell(x);
    for (PointId x : boundary) check_ell(x);
  }
};

/// Problem on the complement of `boundary` with constant ell and g given
/// per boundary point (all zero when `g_values` is empty).
inline EikonalProblem complement_problem(std::shared_ptr<const CurveComplex> complex, std::vector<PointId> boundary,
                                         double ell = 1.0, std::vector<double> g_values = {}) {
  const std::size_t n = complex->size();
  if (!g_values.empty() && g_values.size() != boundary.size()) {
    throw Error(Errc::invalid_problem, "g needs one value per boundary point");
  }
  std::vector<bool> is_boundary(n, false);
  for (PointId b : boundary) {
    if (b >= n) throw Error(Errc::invalid_problem, "boundary point out of range");
    is_boundary[b] = true;
  }
  EikonalProblem p;
  p.complex = std::move(complex);
  for (PointId x = 0; x < n; ++x) {
    if (!is_boundary[x]) p.omega.push_back(x);
  }
  std::vector<double> gv(n, 0.0);
  std::vector<bool> gm(n, false);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    gv[boundary[i]] = g_values.empty() ? 0.0 : g_values[i];
    gm[boundary[i]] = true;
  }
  p.boundary = std::move(boundary);
  p.ell = ScalarField::constant(n, ell);
  p.g = ScalarField(std::move(gv), std::move(gm));
  return p;
}

/// Trapezoidal cost of traversing an edge: length * (ell_a + ell_b) / 2.
inline double edge_cost(double length, double ell_a, double ell_b) {
  if (!(ell_a > 0.0) || !(ell_b > 0.0)) throw Error(Errc::nonpositive_ell, "ell must be positive on edge endpoints");
  return length * (ell_a + ell_b) / 2.0;
}

inline double edge_cost(const EikonalProblem& problem, const Edge& e) {
  return edge_cost(e.length, problem.ell[e.a], problem.ell[e.b]);
}

/// Composite trapezoid for an edge split into `pieces` equal parts, with
/// ell given as a function of the fraction along the edge.
template <class F>
double subdivided_edge_cost(double length, F&& ell_at, int pieces) {
  if (pieces < 1) throw Error(Errc::bad_params, "pieces must be positive");
  double sum = 0.0;
  for (int k = 0; k < pieces; ++k) {
    double a = static_cast<double>(k) / pieces, b = static_cast<double>(k + 1) / pieces;
    sum += edge_cost(length / pieces, ell_at(a), ell_at(b));
  }
  return sum;
}

enum class PointStatus { solved, unreachable, outside };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::solved: return "SOLVED";
    case PointStatus::unreachable: return "UNREACHABLE";
    case PointStatus::outside: return "OUTSIDE";
  }
  return "?";
}

/// V is defined exactly on SOLVED points; pred points one step toward the
/// boundary (kNoPoint on the boundary).
struct ValueFunction {
  ScalarField V;
  std::vector<PointId> pred;
  std::vector<PointStatus> status;

  bool solved(PointId x) const { return status[x] == PointStatus::solved; }
  Extended value(PointId x) const { return solved(x) ? Extended(V[x]) : Extended::infinite(); }
};

inline ValueFunction solve(const EikonalProblem& problem) {
  problem.validate();
  auto [in_omega, in_boundary] = problem.masks();
  std::vector<double> gvals;
  for (PointId b : problem.boundary) gvals.push_back(problem.g[b]);
  auto cost = [&](const Edge& e) { return edge_cost(problem, e); };
  auto enter = [&](PointId v) { return static_cast<bool>(in_omega[v]); };
  SearchTree t = best_first(*problem.complex, problem.boundary, gvals, cost, enter, enter);

  const std::size_t n = problem.complex->size();
  ValueFunction vf;
  vf.pred = std::move(t.pred);
  vf.status.assign(n, PointStatus::outside);
  std::vector<bool> mask(n, false);
  for (PointId x = 0; x < n; ++x) {
    if (!in_omega[x] && !in_boundary[x]) continue;
    if (in_boundary[x]) t.dist[x] = problem.g[x];
    if (std::isfinite(t.dist[x])) {
      vf.status[x] = PointStatus::solved;
      mask[x] = true;
    } else {
      vf.status[x] = PointStatus::unreachable;
    }
  }
  vf.V = ScalarField(std::move(t.dist), std::move(mask));
  return vf;
}

struct CCReport {
  bool passed = true;
  double tolerance = 1e-9;
  std::size_t pairs_checked = 0;
  std::size_t finite_pairs = 0;
  // Pair (x, y) maximizing g(x) - g(y) - inf cost(y -> x); kNoPoint when no
  // boundary pair is joined by an admissible path.
  PointId worst_x = kNoPoint;
  PointId worst_y = kNoPoint;
  double worst_gap = 0.0;       // g(x) - g(y)
  double worst_infimum = 0.0;   // admissible path cost
  double worst_excess = -std::numeric_limits<double>::infinity();
};

/// The compatibility condition g(x) - g(y) <= inf of path cost from y to x
/// through omega, for every ordered pair of boundary points.
inline CCReport check_compatibility(const EikonalProblem& problem) {
  problem.validate();
  auto [in_omega, in_boundary] = problem.masks();
  const auto& bd = problem.boundary;
  std::vector<std::vector<double>> rows(bd.size());
  parallel_for(bd.size(), [&](std::size_t i) {
    PointId src[] = {bd[i]};
    auto cost = [&](const Edge& e) { return edge_cost(problem, e); };
    auto enter = [&](PointId v) { return in_omega[v] || in_boundary[v]; };
    auto expand = [&](PointId v) { return static_cast<bool>(in_omega[v]); };
    SearchTree t = best_first(*problem.complex, src, {}, cost, enter, expand);
    rows[i].reserve(bd.size());
    for (PointId x : bd) rows[i].push_back(t.dist[x]);
  });

  CCReport rep;
  for (std::size_t i = 0; i < bd.size(); ++i) {
    for (std::size_t j = 0; j < bd.size(); ++j) {
      if (i == j) continue;
      ++rep.pairs_checked;
      const double inf = rows[i][j];  // y = bd[i], x = bd[j]
      if (!std::isfinite(inf)) continue;
      ++rep.finite_pairs;
      const double gap = problem.g[bd[j]] - problem.g[bd[i]];
      const double excess = gap - inf;
      if (excess > rep.worst_excess) {
        rep.worst_excess = excess;
        rep.worst_x = bd[j];
        rep.worst_y = bd[i];
        rep.worst_gap = gap;
        rep.worst_infimum = inf;
      }
      if (excess > rep.tolerance) rep.passed = false;
    }
  }
  return rep;
}

struct DppReport {
  double max_residual = 0.0;
  PointId worst = kNoPoint;
  std::size_t points_checked = 0;
  std::vector<double> residual;  // per point; NaN where not checked
};

/// |V(x) - min over admissible edges (cost + V(other end))| at solved
/// interior points.
inline DppReport verify_dpp(const ValueFunction& vf, const EikonalProblem& problem) {
  auto [in_omega, in_boundary] = problem.masks();
  const CurveComplex& c = *problem.complex;
  DppReport rep;
  rep.residual.assign(c.size(), std::numeric_limits<double>::quiet_NaN());
  for (PointId x : problem.omega) {
    if (!vf.solved(x)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t k : c.incident(x)) {
      const Edge& e = c.edges()[k];
      PointId v = e.other(x);
      if (!(in_omega[v] || in_boundary[v]) || !vf.solved(v)) continue;
      best = std::min(best, edge_cost(problem, e) + vf.V[v]);
    }
    double r = std::abs(vf.V[x] - best);
    rep.residual[x] = r;
    ++rep.points_checked;
    if (rep.worst == kNoPoint || r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst = x;
    }
  }
  return rep;
}

struct OptimalCurve {
  Polyline path;                 // from x to a boundary point
  std::vector<double> edge_costs;
  double terminal_value = 0.0;   // g at the terminal point
  double total = 0.0;            // sum of edge costs + terminal value
};

inline OptimalCurve extract_optimal_curve(const ValueFunction& vf, const EikonalProblem& problem, PointId x) {
  if (x >= vf.status.size() || !vf.solved(x)) {
    throw Error(Errc::unreachable_point, "point " + std::to_string(x) + " has no optimal curve");
  }
  OptimalCurve out;
  PointId v = x;
  out.path.vertices.push_back(v);
  while (vf.pred[v] != kNoPoint) {
    PointId u = vf.pred[v];
    auto len = problem.complex->edge_length(u, v);
    double c = edge_cost(*len, problem.ell[u], problem.ell[v]);
    out.edge_costs.push_back(c);
    v = u;
    out.path.vertices.push_back(v);
  }
  out.terminal_value = problem.g[v];
  // Sum from the boundary end, the order the solver accumulated in.
  double total = out.terminal_value;
  for (auto it = out.edge_costs.rbegin(); it != out.edge_costs.rend(); ++it) total += *it;
  out.total = total;
  return out;
}

enum class ResidualClass { solution, super, defect, unreachable };

inline const char* to_string(ResidualClass c) {
  switch (c) {
    case ResidualClass::solution: return "SOLUTION";
    case ResidualClass::super: return "SUPER";
    case ResidualClass::defect: return "DEFECT";
    case ResidualClass::unreachable: return "UNREACHABLE";
  }
  return "?";
}

struct ResidualRow {
  PointId point = kNoPoint;
  double slope = 0.0;
  double ell = 0.0;
  double residual = 0.0;
  double radius = 0.0;  // radius the slope was read at, 0 if isolated
  ResidualClass cls = ResidualClass::solution;
};

struct ResidualReport {
  double tolerance = 0.0;
  std::vector<ResidualRow> rows;  // one per omega point, ascending id
  std::size_t count(ResidualClass c) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [c](const auto& r) { return r.cls == c; }));
  }
};

/// Reported slope of V (restricted to omega and boundary) minus ell at each
/// interior point. Default tolerance is 3x the sampling resolution.
inline ResidualReport residual_report(const ValueFunction& vf, const EikonalProblem& problem,
                                      const RadiusSchedule& schedule, std::optional<double> tol = std::nullopt) {
  schedule.validate();
  const MetricSpace& space = problem.space();
  ResidualReport rep;
  rep.tolerance = tol ? *tol : 3.0 * sampling_resolution(space);
  NeighborIndex index(space, schedule.radii.front(), 64);
  std::vector<PointId> interior = problem.omega;
  std::sort(interior.begin(), interior.end());
  rep.rows.resize(interior.size());
  parallel_for(interior.size(), [&](std::size_t i) {
    ResidualRow& row = rep.rows[i];
    row.point = interior[i];
    row.ell = problem.ell[row.point];
    if (!vf.solved(row.point)) {
      row.cls = ResidualClass::unreachable;
      row.slope = row.residual = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    SlopeProfile p = slope_profile(index, vf.V, row.point, schedule, UndefinedPolicy::skip, true);
    row.slope = p.reported;
    row.radius = p.reported_radius;
    row.residual = row.slope - row.ell;
    if (row.residual > rep.tolerance) {
      row.cls = ResidualClass::super;
    } else if (row.residual < -rep.tolerance) {
      row.cls = ResidualClass::defect;
    } else {
      row.cls = ResidualClass::solution;
    }
  });
  return rep;
}

}  // namespace slopekit
