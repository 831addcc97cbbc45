#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slopekit/error.hpp"

namespace slopekit {

/// Dense index of a sample point, 0..n-1 within one space.
using PointId = std::uint32_t;

inline constexpr PointId kNoPoint = std::numeric_limits<PointId>::max();

enum class NormTag { l1, linf, euclidean, snowflake, matrix, product_sum };

constexpr std::string_view to_string(NormTag tag) noexcept {
  switch (tag) {
    case NormTag::l1: return "l1";
    case NormTag::linf: return "linf";
    case NormTag::euclidean: return "euclidean";
    case NormTag::snowflake: return "snowflake";
    case NormTag::matrix: return "matrix";
    case NormTag::product_sum: return "product_sum";
  }
  return "unknown";
}

using Labels = std::map<PointId, std::string>;

/// Finite metric space: a point sample together with an exact distance.
///
/// Distances come from a closed form on stored coordinates (l1, linf,
/// euclidean, snowflake), from an explicit matrix, or from the sum metric
/// d(x, y) + |s - t| over a base space. For n <= kCacheLimit the full matrix
/// is tabulated at construction; queries never mutate the object.
class MetricSpace {
 public:
  static constexpr std::size_t kCacheLimit = 4096;

  /// Coordinates are finitely supported vectors; rows shorter than the
  /// longest one are zero padded. For the snowflake tag the base distance
  /// is euclidean and the result is raised to `alpha`.
  static MetricSpace from_coordinates(NormTag norm, const std::vector<std::vector<double>>& coords,
                                      double alpha = 0.5, Labels labels = {}) {
    if (norm == NormTag::matrix || norm == NormTag::product_sum) {
      throw Error(Errc::bad_params, "from_coordinates needs a coordinate norm");
    }
    if (norm == NormTag::snowflake && !(alpha > 0.0 && alpha < 1.0)) {
      throw Error(Errc::bad_alpha, "snowflake exponent must lie in (0,1)");
    }
    MetricSpace s;
    s.norm_ = norm;
    s.alpha_ = norm == NormTag::snowflake ? alpha : 1.0;
    s.n_ = coords.size();
    for (const auto& row : coords) s.dim_ = std::max(s.dim_, row.size());
    s.coords_.assign(s.n_ * s.dim_, 0.0);
    for (std::size_t i = 0; i < s.n_; ++i) {
      std::copy(coords[i].begin(), coords[i].end(), s.coords_.begin() + i * s.dim_);
    }
    s.labels_ = std::move(labels);
    s.build_cache();
    return s;
  }

  /// Row-major n x n matrix. Symmetry and the triangle inequality are not
  /// enforced here; validate_metric reports violations.
  static MetricSpace from_matrix(std::vector<double> matrix, std::size_t n, Labels labels = {}) {
    if (matrix.size() != n * n) throw Error(Errc::bad_params, "matrix size does not match point count");
    MetricSpace s;
    s.norm_ = NormTag::matrix;
    s.n_ = n;
    s.matrix_ = std::move(matrix);
    s.labels_ = std::move(labels);
    return s;
  }

  /// Points (base point, height); distance d_base(x, y) + |s - t|.
  static MetricSpace product_sum(std::shared_ptr<const MetricSpace> base,
                                 std::vector<std::pair<PointId, double>> points, Labels labels = {}) {
    if (!base) throw Error(Errc::bad_params, "product needs a base space");
    for (const auto& [b, h] : points) {
      if (b >= base->size()) throw Error(Errc::bad_params, "product point refers to a missing base point");
      if (!std::isfinite(h)) throw Error(Errc::bad_params, "product height must be finite");
    }
    MetricSpace s;
    s.norm_ = NormTag::product_sum;
    s.n_ = points.size();
    s.base_ = std::move(base);
    s.product_points_ = std::move(points);
    s.labels_ = std::move(labels);
    s.build_cache();
    return s;
  }

  std::size_t size() const { return n_; }
  NormTag norm() const { return norm_; }
  double alpha() const { return alpha_; }
  const Labels& labels() const { return labels_; }

  bool has_coordinates() const { return dim_ > 0; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> coordinates(PointId i) const {
    return {coords_.data() + static_cast<std::size_t>(i) * dim_, dim_};
  }

  const std::vector<double>& matrix() const { return matrix_; }
  const std::shared_ptr<const MetricSpace>& base() const { return base_; }
  const std::vector<std::pair<PointId, double>>& product_points() const { return product_points_; }

  double dist(PointId x, PointId y) const {
    if (!cache_.empty()) return cache_[static_cast<std::size_t>(x) * n_ + y];
    return evaluate(x, y);
  }

  /// Distance from the closed form, bypassing the cache.
  double evaluate(PointId x, PointId y) const {
    switch (norm_) {
      case NormTag::matrix:
        return matrix_[static_cast<std::size_t>(x) * n_ + y];
      case NormTag::product_sum: {
        const auto& [bx, hx] = product_points_[x];
        const auto& [by, hy] = product_points_[y];
        return base_->dist(bx, by) + std::abs(hx - hy);
      }
      default:
        break;
    }
    if (x == y) return 0.0;
    const double* a = coords_.data() + static_cast<std::size_t>(x) * dim_;
    const double* b = coords_.data() + static_cast<std::size_t>(y) * dim_;
    double acc = 0.0;
    switch (norm_) {
      case NormTag::l1:
        for (std::size_t k = 0; k < dim_; ++k) acc += std::abs(a[k] - b[k]);
        return acc;
      case NormTag::linf:
        for (std::size_t k = 0; k < dim_; ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
        return acc;
      case NormTag::euclidean:
      case NormTag::snowflake: {
        if (dim_ == 1) {
          acc = std::abs(a[0] - b[0]);
        } else {
          for (std::size_t k = 0; k < dim_; ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
          acc = std::sqrt(acc);
        }
        return norm_ == NormTag::snowflake ? std::pow(acc, alpha_) : acc;
      }
      default:
        return acc;
    }
  }

 private:
  MetricSpace() = default;

  void build_cache() {
    if (n_ == 0 || n_ > kCacheLimit) return;
    std::vector<double> cache(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        double d = evaluate(static_cast<PointId>(i), static_cast<PointId>(j));
        cache[i * n_ + j] = d;
        cache[j * n_ + i] = d;
      }
    }
    cache_ = std::move(cache);
  }

  NormTag norm_ = NormTag::euclidean;
  double alpha_ = 1.0;
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> matrix_;
  std::shared_ptr<const MetricSpace> base_;
  std::vector<std::pair<PointId, double>> product_points_;
  Labels labels_;
  std::vector<double> cache_;
};

/// Real value per point with an optional domain. Values are finite wherever
/// the field is defined; undefined entries hold +inf.
class ScalarField {
 public:
  ScalarField() = default;

  explicit ScalarField(std::vector<double> values)
      : values_(std::move(values)), defined_(values_.size(), true) {
    check();
  }

  ScalarField(std::vector<double> values, std::vector<bool> defined)
      : values_(std::move(values)), defined_(std::move(defined)) {
    if (defined_.size() != values_.size()) throw Error(Errc::bad_params, "field mask size mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!defined_[i]) values_[i] = std::numeric_limits<double>::infinity();
    }
    check();
  }

  static ScalarField constant(std::size_t n, double v) { return ScalarField(std::vector<double>(n, v)); }

  std::size_t size() const { return values_.size(); }
  bool defined(PointId i) const { return i < defined_.size() && defined_[i]; }
  bool fully_defined() const { return std::all_of(defined_.begin(), defined_.end(), [](bool b) { return b; }); }

  /// Raw value; +inf when undefined.
  double operator[](PointId i) const { return values_[i]; }

  double at(PointId i) const {
    if (!defined(i)) throw Error(Errc::undefined_field, "no value at point " + std::to_string(i));
    return values_[i];
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<bool>& mask() const { return defined_; }

  /// Pointwise sum, defined where both operands are.
  ScalarField operator+(const ScalarField& other) const {
    if (other.size() != size()) throw Error(Errc::bad_params, "field size mismatch");
    std::vector<double> v(size());
    std::vector<bool> m(size());
    for (std::size_t i = 0; i < size(); ++i) {
      m[i] = defined_[i] && other.defined_[i];
      v[i] = m[i] ? values_[i] + other.values_[i] : 0.0;
    }
    return ScalarField(std::move(v), std::move(m));
  }

 private:
  void check() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (defined_[i] && !std::isfinite(values_[i])) {
        throw Error(Errc::bad_params, "field value at point " + std::to_string(i) + " is not finite");
      }
    }
  }

  std::vector<double> values_;
  std::vector<bool> defined_;
};

struct ValidationReport {
  std::size_t points = 0;
  double symmetry_defect = 0.0;
  double triangle_defect = 0.0;
  PointId triangle_x = kNoPoint, triangle_y = kNoPoint, triangle_z = kNoPoint;
  bool identity_ok = true;
  bool exhaustive = false;
  std::size_t triples_checked = 0;
  double tolerance = 1e-12;
  bool passed = false;
};

/// Checks identity, exact symmetry and the triangle inequality. All triples
/// are enumerated for n <= 512; larger spaces use `triple_samples`
/// pseudo-random triples drawn from `seed`.
inline ValidationReport validate_metric(const MetricSpace& space, std::size_t triple_samples = 200000,
                                        std::uint64_t seed = 0) {
  const std::size_t n = space.size();
  if (n == 0) throw Error(Errc::bad_params, "validate_metric needs at least one point");
  ValidationReport rep;
  rep.points = n;

  auto d = [&](PointId a, PointId b) {
    double v = space.dist(a, b);
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(Errc::nonfinite_distance,
                  "d(" + std::to_string(a) + "," + std::to_string(b) + ") is not a finite nonnegative real");
    }
    return v;
  };

  std::mt19937_64 rng(seed);
  auto pick = [&] { return static_cast<PointId>(rng() % n); };

  auto check_pair = [&](PointId a, PointId b) {
    double ab = d(a, b);
    double ba = d(b, a);
    rep.symmetry_defect = std::max(rep.symmetry_defect, std::abs(ab - ba));
    if (a == b ? ab != 0.0 : !(ab > 0.0)) rep.identity_ok = false;
  };
  if (n <= MetricSpace::kCacheLimit) {
    for (PointId a = 0; a < n; ++a) {
      for (PointId b = a; b < n; ++b) check_pair(a, b);
    }
  } else {
    for (std::size_t s = 0; s < triple_samples; ++s) check_pair(pick(), pick());
  }

  auto check_triple = [&](PointId x, PointId y, PointId z) {
    double defect = d(x, z) - d(x, y) - d(y, z);
    if (defect > rep.triangle_defect) {
      rep.triangle_defect = defect;
      rep.triangle_x = x;
      rep.triangle_y = y;
      rep.triangle_z = z;
    }
    ++rep.triples_checked;
  };
  if (n <= 512) {
    rep.exhaustive = true;
    for (PointId x = 0; x < n; ++x) {
      for (PointId z = x + 1; z < n; ++z) {
        for (PointId y = 0; y < n; ++y) check_triple(x, y, z);
      }
    }
  } else {
    for (std::size_t s = 0; s < triple_samples; ++s) {
      PointId x = pick(), y = pick(), z = pick();
      check_triple(x, y, z);
    }
  }
  rep.passed = rep.identity_ok && rep.symmetry_defect <= rep.tolerance && rep.triangle_defect <= rep.tolerance;
  return rep;
}

/// { y != x : d(x, y) <= r }, ascending by id.
inline std::vector<PointId> ball(const MetricSpace& space, PointId x, double r) {
  if (!(r > 0.0)) throw Error(Errc::bad_params, "ball radius must be positive");
  std::vector<PointId> out;
  for (PointId y = 0; y < space.size(); ++y) {
    if (y != x && space.dist(x, y) <= r) out.push_back(y);
  }
  return out;
}

/// Distance from each point to its nearest other point (+inf for n == 1).
inline std::vector<double> nearest_neighbor_distances(const MetricSpace& space) {
  const std::size_t n = space.size();
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  for (PointId x = 0; x < n; ++x) {
    for (PointId y = x + 1; y < n; ++y) {
      double v = space.dist(x, y);
      nn[x] = std::min(nn[x], v);
      nn[y] = std::min(nn[y], v);
    }
  }
  return nn;
}

/// Coarsest local spacing: the largest nearest-neighbor distance.
inline double sampling_resolution(const MetricSpace& space) {
  double h = 0.0;
  for (double v : nearest_neighbor_distances(space)) {
    if (std::isfinite(v)) h = std::max(h, v);
  }
  return h;
}

/// Finest local spacing: the smallest positive pairwise distance.
inline double finest_spacing(const MetricSpace& space) {
  double h = std::numeric_limits<double>::infinity();
  for (double v : nearest_neighbor_distances(space)) h = std::min(h, v);
  return h;
}

inline double diameter(const MetricSpace& space) {
  double best = 0.0;
  for (PointId x = 0; x < space.size(); ++x) {
    for (PointId y = x + 1; y < space.size(); ++y) best = std::max(best, space.dist(x, y));
  }
  return best;
}

}  // namespace slopekit
