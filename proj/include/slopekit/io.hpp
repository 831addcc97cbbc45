#pragma once

// Artifact files: JSON for spaces and reports, CSV for fields, atomic
// writes, and content digests for run manifests.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slopekit/curve_complex.hpp"
#include "slopekit/error.hpp"
#include "slopekit/extended.hpp"
#include "slopekit/gallery.hpp"
#include "slopekit/metric_space.hpp"

namespace slopekit {

inline constexpr const char* kToolkitVersion = "0.1.0";

namespace fs = std::filesystem;

/// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::invalid_input, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(Errc::invalid_input, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_artifacts, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::invalid_input, path.string() + ": " + e.what());
  }
}

inline void write_json(const fs::path& path, const nlohmann::json& j) { write_atomic(path, j.dump(2) + "\n"); }

/// FNV-1a 64-bit, rendered as 16 hex digits.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

inline std::string file_digest(const fs::path& path) { return digest(read_file(path)); }

/// CSV cell for a real: 17 significant digits, "inf" for +infinity, empty
/// for NaN (no value).
inline std::string csv_real(double v) {
  if (std::isnan(v)) return "";
  return Extended(v).to_string();
}

// ---- spaces ---------------------------------------------------------------

inline nlohmann::json space_to_json(const MetricSpace& s) {
  nlohmann::json j{{"norm", to_string(s.norm())}, {"points", s.size()}};
  if (s.norm() == NormTag::snowflake) j["alpha"] = s.alpha();
  if (s.has_coordinates()) {
    nlohmann::json rows = nlohmann::json::array();
    for (PointId i = 0; i < s.size(); ++i) {
      auto c = s.coordinates(i);
      rows.push_back(std::vector<double>(c.begin(), c.end()));
    }
    j["coordinates"] = std::move(rows);
  } else if (s.norm() == NormTag::matrix) {
    j["matrix"] = s.matrix();
  } else if (s.norm() == NormTag::product_sum) {
    j["base"] = space_to_json(*s.base());
    nlohmann::json pts = nlohmann::json::array();
    for (auto [b, h] : s.product_points()) pts.push_back({b, h});
    j["product_points"] = std::move(pts);
  }
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [id, name] : s.labels()) labels[std::to_string(id)] = name;
  j["labels"] = std::move(labels);
  return j;
}

inline NormTag norm_from_string(const std::string& s) {
  for (NormTag t : {NormTag::l1, NormTag::linf, NormTag::euclidean, NormTag::snowflake, NormTag::matrix,
                    NormTag::product_sum}) {
    if (s == to_string(t)) return t;
  }
  throw Error(Errc::invalid_input, "unknown norm '" + s + "'");
}

inline std::shared_ptr<const MetricSpace> space_from_json(const nlohmann::json& j) {
  try {
    Labels labels;
    if (j.contains("labels")) {
      for (const auto& [k, v] : j.at("labels").items()) labels[static_cast<PointId>(std::stoul(k))] = v.get<std::string>();
    }
    NormTag norm = norm_from_string(j.at("norm").get<std::string>());
    if (norm == NormTag::matrix) {
      return std::make_shared<const MetricSpace>(MetricSpace::from_matrix(
          j.at("matrix").get<std::vector<double>>(), j.at("points").get<std::size_t>(), std::move(labels)));
    }
    if (norm == NormTag::product_sum) {
      auto base = space_from_json(j.at("base"));
      std::vector<std::pair<PointId, double>> pts;
      for (const auto& p : j.at("product_points")) pts.emplace_back(p.at(0).get<PointId>(), p.at(1).get<double>());
      return std::make_shared<const MetricSpace>(MetricSpace::product_sum(base, std::move(pts), std::move(labels)));
    }
    auto coords = j.at("coordinates").get<std::vector<std::vector<double>>>();
    return std::make_shared<const MetricSpace>(
        MetricSpace::from_coordinates(norm, coords, j.value("alpha", 0.5), std::move(labels)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed space JSON: ") + e.what());
  }
}

inline nlohmann::json complex_to_json(const CurveComplex& c) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : c.edges()) edges.push_back({e.a, e.b, e.length});
  return {{"points", c.size()}, {"edges", std::move(edges)}};
}

inline std::shared_ptr<const CurveComplex> complex_from_json(const nlohmann::json& j,
                                                             std::shared_ptr<const MetricSpace> space) {
  try {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<PointId>(), e.at(1).get<PointId>(), e.at(2).get<double>()});
    return std::make_shared<const CurveComplex>(std::move(space), std::move(edges));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed complex JSON: ") + e.what());
  }
}

/// Writes space.json, complex.json and marks.json (marks plus meta) and
/// returns the written paths.
inline std::vector<fs::path> save_gallery(const GallerySpace& g, const fs::path& dir) {
  std::vector<fs::path> out{dir / "space.json", dir / "complex.json", dir / "marks.json"};
  write_json(out[0], space_to_json(*g.space));
  write_json(out[1], complex_to_json(*g.complex));
  nlohmann::json marks = nlohmann::json::object();
  for (const auto& [name, id] : g.marks) marks[name] = id;
  write_json(out[2], {{"marks", marks}, {"meta", g.meta}});
  return out;
}

inline GallerySpace load_gallery(const fs::path& dir) {
  for (const char* f : {"space.json", "complex.json", "marks.json"}) {
    if (!fs::exists(dir / f)) throw Error(Errc::missing_artifacts, (dir / f).string() + " not found");
  }
  GallerySpace g;
  g.space = space_from_json(read_json(dir / "space.json"));
  g.complex = complex_from_json(read_json(dir / "complex.json"), g.space);
  nlohmann::json m = read_json(dir / "marks.json");
  try {
    for (const auto& [name, id] : m.at("marks").items()) g.marks[name] = id.get<PointId>();
    g.meta = m.value("meta", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_input, std::string("malformed marks JSON: ") + e.what());
  }
  return g;
}

// ---- CSV ------------------------------------------------------------------

/// `point_id,value` with "inf" where the field is undefined.
inline std::string field_csv(const ScalarField& u, const std::string& header = "point_id,value") {
  std::string s = header + "\n";
  for (PointId i = 0; i < u.size(); ++i) {
    s += std::to_string(i) + "," + (u.defined(i) ? csv_real(u[i]) : std::string("inf")) + "\n";
  }
  return s;
}

/// Reads `point_id,value` rows (header optional) into a field over n points;
/// missing rows and "inf" stay undefined.
inline ScalarField read_field_csv(const fs::path& path, std::size_t n) {
  std::istringstream in(read_file(path));
  std::vector<double> v(n, 0.0);
  std::vector<bool> m(n, false);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(Errc::invalid_input, path.string() + ": bad row '" + line + "'");
    std::string a = line.substr(0, comma), b = line.substr(comma + 1);
    if (!b.empty() && b.back() == '\r') b.pop_back();
    if (a == "point_id") continue;
    std::size_t id = 0;
    try {
      id = std::stoul(a);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_input, path.string() + ": bad point id '" + a + "'");
    }
    if (id >= n) throw Error(Errc::invalid_input, path.string() + ": point id out of range");
    if (b == "inf" || b.empty()) continue;
    try {
      v[id] = std::stod(b);
    } catch (const std::exception&) {
      throw Error(Errc::invalid_input, path.string() + ": bad value '" + b + "'");
    }
    m[id] = true;
  }
  return ScalarField(std::move(v), std::move(m));
}

}  // namespace slopekit
