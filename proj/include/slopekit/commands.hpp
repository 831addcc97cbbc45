#pragma once

// The six subcommands as plain functions. The CLI only parses arguments and
// forwards here, so tests can drive the same code paths in-process.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slopekit/eikonal.hpp"
#include "slopekit/error.hpp"
#include "slopekit/gallery.hpp"
#include "slopekit/io.hpp"
#include "slopekit/slope.hpp"
#include "slopekit/verifier.hpp"

namespace slopekit {

using nlohmann::json;

/// Process exit statuses. 0-2 carry results, everything from 10 up is an
/// error, one code per error family.
inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::unknown_space: return 10;
    case Errc::bad_params: return 11;
    case Errc::bad_alpha: return 11;
    case Errc::depth_exceeded: return 12;
    case Errc::missing_artifacts: return 13;
    case Errc::invalid_input: return 14;
    case Errc::invalid_problem: return 15;
    case Errc::nonpositive_ell: return 15;
    default: return 16;
  }
}

inline constexpr int kInternalErrorExit = 19;

inline json error_json(const Error& e, const std::string& usage = {}) {
  json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"exit_code", exit_code_for(e.code())}};
  if (!usage.empty()) j["usage"] = usage;
  return j;
}

struct CommandResult {
  int exit_code = 0;
  json summary;  // printed by the CLI
};

// ---- manifest -------------------------------------------------------------

/// Records one command run. Written last, so it can list the digests of
/// every artifact it covers; wall time is the only field that varies
/// between identical runs.
class Manifest {
 public:
  Manifest(std::string subcommand, std::string command_line, json parameters, std::uint64_t seed)
      : start_(std::chrono::steady_clock::now()) {
    body_ = {{"subcommand", std::move(subcommand)},
             {"command_line", std::move(command_line)},
             {"parameters", std::move(parameters)},
             {"seed", seed},
             {"toolkit_version", kToolkitVersion},
             {"inputs", json::object()},
             {"outputs", json::object()}};
  }

  /// Inputs are keyed by file name unless a key is given.
  void input(const fs::path& p, std::string key = {}) {
    body_["inputs"][key.empty() ? p.filename().string() : key] = file_digest(p);
  }
  void output(const fs::path& p) { body_["outputs"][p.filename().string()] = file_digest(p); }

  /// Writes a JSON artifact and records it.
  void emit_json(const fs::path& p, const json& j) {
    write_json(p, j);
    output(p);
  }
  void emit_text(const fs::path& p, const std::string& s) {
    write_atomic(p, s);
    output(p);
  }

  void write(const fs::path& dir) {
    json j = body_;
    j["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_json(dir / "manifest.json", j);
  }

 private:
  json body_;
  std::chrono::steady_clock::time_point start_;
};

/// Digest of a manifest with its wall time removed, so reruns of the same
/// command compare equal.
inline std::string manifest_digest(json manifest) {
  manifest.erase("wall_time_seconds");
  return digest(manifest.dump());
}

// ---- build ----------------------------------------------------------------

inline const std::vector<std::string>& space_names() {
  static const std::vector<std::string> names{"snowflake", "circle", "interval", "spider",
                                              "pato",      "hyperpato", "c0star", "product"};
  return names;
}

/// Default parameters per space, overridden key by key by the caller.
inline json default_space_params(const std::string& name) {
  if (name == "snowflake") return {{"n", 401}, {"alpha", 0.5}};
  if (name == "circle") return {{"n", 2048}};
  if (name == "interval") return {{"n", 201}};
  if (name == "spider") return {{"branches", 10}, {"samples", 9}, {"graded", true}};
  if (name == "pato") return {{"tents", 20}, {"samples", 9}, {"graded", true}};
  if (name == "hyperpato") return {{"depth", 3}, {"per_level", 4}, {"samples", 5}, {"tents", 4}, {"graded", true}};
  if (name == "c0star") return {{"branches", 50}, {"samples", 9}, {"graded", true}};
  if (name == "product") return {{"levels", 9}, {"base", {{"builder", "circle"}, {"n", 64}}}};
  throw Error(Errc::unknown_space, "unknown space '" + name + "'");
}

inline GallerySpace build_space(const std::string& name, const json& overrides) {
  json meta = default_space_params(name);
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw Error(Errc::bad_params, "parameters must be a JSON object");
    for (const auto& [k, v] : overrides.items()) {
      if (!meta.contains(k)) throw Error(Errc::bad_params, "space '" + name + "' has no parameter '" + k + "'");
      meta[k] = v;
    }
  }
  if (name == "product" && !meta.at("base").contains("builder")) {
    throw Error(Errc::bad_params, "product base needs a builder");
  }
  meta["builder"] = name;
  return rebuild(meta);
}

inline CommandResult cmd_build(const std::string& name, const json& params, const fs::path& out,
                               const std::string& command_line) {
  GallerySpace g = build_space(name, params);
  Manifest m("build", command_line, {{"space", name}, {"meta", g.meta}}, 0);
  for (const fs::path& p : save_gallery(g, out)) m.output(p);
  m.write(out);
  return {0,
          {{"space", g.name()},
           {"points", g.space->size()},
           {"edges", g.complex->edges().size()},
           {"marks", g.marks.size()},
           {"out", out.string()}}};
}

// ---- shared helpers -------------------------------------------------------

inline GallerySpace load_space_dir(const fs::path& dir, Manifest* m = nullptr) {
  GallerySpace g = load_gallery(dir);
  if (m) {
    for (const char* f : {"space.json", "complex.json", "marks.json"}) m->input(dir / f);
  }
  return g;
}

/// A point given by id or by mark name.
inline PointId resolve_point(const GallerySpace& g, const json& ref) {
  if (ref.is_number_unsigned() || ref.is_number_integer()) {
    auto v = ref.get<long long>();
    if (v < 0 || static_cast<std::size_t>(v) >= g.space->size()) {
      throw Error(Errc::invalid_problem, "point id " + std::to_string(v) + " out of range");
    }
    return static_cast<PointId>(v);
  }
  if (ref.is_string()) {
    auto it = g.marks.find(ref.get<std::string>());
    if (it == g.marks.end()) throw Error(Errc::invalid_problem, "no mark named '" + ref.get<std::string>() + "'");
    return it->second;
  }
  throw Error(Errc::invalid_problem, "point references must be ids or mark names");
}

/// Comma separated ids or mark names.
inline std::vector<PointId> resolve_point_list(const GallerySpace& g, const std::string& list) {
  std::vector<PointId> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    bool numeric = item.find_first_not_of("0123456789") == std::string::npos;
    out.push_back(resolve_point(g, numeric ? json(std::stoll(item)) : json(item)));
  }
  if (out.empty()) throw Error(Errc::bad_params, "empty point list");
  return out;
}

inline RadiusSchedule schedule_or_default(const MetricSpace& space, const std::vector<double>& radii) {
  if (radii.empty()) return default_schedule(space);
  RadiusSchedule s;
  s.radii = radii;
  s.validate();
  return s;
}

// ---- solve ----------------------------------------------------------------

/// Reads a per-point scalar: a constant, a CSV path (relative to the
/// problem file), or for g an array aligned with the boundary list.
inline ScalarField problem_field(const json& spec, const fs::path& base, std::size_t n, const char* what) {
  if (spec.is_number()) return ScalarField::constant(n, spec.get<double>());
  if (spec.is_string()) {
    fs::path p = spec.get<std::string>();
    if (p.is_relative()) p = base / p;
    return read_field_csv(p, n);
  }
  throw Error(Errc::invalid_problem, std::string(what) + " must be a number or a CSV path");
}

/// Problem JSON: {"omega": [...] | "complement", "boundary": [...],
/// "ell": c | "file.csv", "g": c | "file.csv" | [per boundary point]}.
/// Points may be ids or mark names; omega defaults to the complement of
/// the boundary.
inline EikonalProblem load_problem(const GallerySpace& g, const fs::path& path) {
  json j = read_json(path);
  const std::size_t n = g.space->size();
  EikonalProblem p;
  p.complex = g.complex;
  try {
    for (const auto& ref : j.at("boundary")) p.boundary.push_back(resolve_point(g, ref));
    std::vector<bool> is_boundary(n, false);
    for (PointId b : p.boundary) is_boundary[b] = true;
    const json omega = j.value("omega", json("complement"));
    if (omega.is_string() && omega.get<std::string>() == "complement") {
      for (PointId x = 0; x < n; ++x) {
        if (!is_boundary[x]) p.omega.push_back(x);
      }
    } else if (omega.is_array()) {
      for (const auto& ref : omega) p.omega.push_back(resolve_point(g, ref));
    } else {
      throw Error(Errc::invalid_problem, "omega must be a list or \"complement\"");
    }
    const fs::path base = path.parent_path();
    p.ell = problem_field(j.value("ell", json(1.0)), base, n, "ell");
    const json gspec = j.value("g", json(0.0));
    if (gspec.is_array()) {
      if (gspec.size() != p.boundary.size()) throw Error(Errc::invalid_problem, "g array must match the boundary");
      std::vector<double> v(n, 0.0);
      std::vector<bool> m(n, false);
      for (std::size_t i = 0; i < p.boundary.size(); ++i) {
        v[p.boundary[i]] = gspec[i].get<double>();
        m[p.boundary[i]] = true;
      }
      p.g = ScalarField(std::move(v), std::move(m));
    } else {
      p.g = problem_field(gspec, base, n, "g");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_problem, std::string("malformed problem JSON: ") + e.what());
  }
  p.validate();
  return p;
}

inline std::string value_csv(const ValueFunction& vf) {
  std::string s = "point_id,value,status\n";
  for (PointId i = 0; i < vf.status.size(); ++i) {
    s += std::to_string(i) + "," + vf.value(i).to_string() + "," + to_string(vf.status[i]) + "\n";
  }
  return s;
}

inline std::string residual_csv(const ResidualReport& r) {
  std::string s = "point_id,slope,ell,residual,class\n";
  for (const auto& row : r.rows) {
    s += std::to_string(row.point) + "," + csv_real(row.slope) + "," + csv_real(row.ell) + "," +
         csv_real(row.residual) + "," + to_string(row.cls) + "\n";
  }
  return s;
}

inline std::optional<std::string> label_of(const GallerySpace& g, PointId x) {
  auto it = g.space->labels().find(x);
  if (it == g.space->labels().end()) return std::nullopt;
  return it->second;
}

inline json point_json(const GallerySpace& g, PointId x) {
  if (x == kNoPoint) return nullptr;
  json j{{"id", x}};
  if (auto label = label_of(g, x)) j["label"] = *label;
  return j;
}

inline json cc_json(const GallerySpace& g, const CCReport& cc) {
  json j{{"passed", cc.passed},
         {"tolerance", cc.tolerance},
         {"pairs_checked", cc.pairs_checked},
         {"finite_pairs", cc.finite_pairs}};
  if (cc.worst_x != kNoPoint) {
    j["worst_pair"] = {{"x", point_json(g, cc.worst_x)},
                       {"y", point_json(g, cc.worst_y)},
                       {"g_gap", cc.worst_gap},
                       {"path_infimum", cc.worst_infimum},
                       {"excess", cc.worst_excess}};
  } else {
    j["worst_pair"] = nullptr;
    j["note"] = "no boundary pair is joined by an admissible path; the condition holds vacuously";
  }
  return j;
}

inline CommandResult cmd_solve(const fs::path& space_dir, const fs::path& problem_path, const fs::path& out,
                               std::optional<double> tol, const std::vector<double>& radii,
                               const std::string& command_line) {
  json params{{"space_dir", space_dir.string()}, {"problem", problem_path.string()}, {"radii", radii}};
  if (tol) params["tol"] = *tol;
  Manifest m("solve", command_line, params, 0);
  GallerySpace g = load_space_dir(space_dir, &m);
  EikonalProblem problem = load_problem(g, problem_path);
  m.input(problem_path);

  ValueFunction vf = solve(problem);
  CCReport cc = check_compatibility(problem);
  DppReport dpp = verify_dpp(vf, problem);
  RadiusSchedule schedule = schedule_or_default(*g.space, radii);
  ResidualReport res = residual_report(vf, problem, schedule, tol);

  m.emit_text(out / "V.csv", value_csv(vf));
  m.emit_text(out / "residual.csv", residual_csv(res));
  m.emit_json(out / "cc.json", cc_json(g, cc));
  constexpr double kDppTol = 1e-9;
  json dj{{"max_residual", dpp.max_residual},
          {"worst", point_json(g, dpp.worst)},
          {"points_checked", dpp.points_checked},
          {"tolerance", kDppTol},
          {"passed", dpp.max_residual <= kDppTol}};
  m.emit_json(out / "dpp.json", dj);
  std::size_t unreachable = 0;
  for (PointStatus s : vf.status) unreachable += s == PointStatus::unreachable;
  json counts{{"SOLUTION", res.count(ResidualClass::solution)},
              {"SUPER", res.count(ResidualClass::super)},
              {"DEFECT", res.count(ResidualClass::defect)},
              {"UNREACHABLE", res.count(ResidualClass::unreachable)}};
  m.write(out);

  const bool ok = cc.passed && dpp.max_residual <= kDppTol;
  return {ok ? 0 : 1,
          {{"cc_passed", cc.passed},
           {"dpp_max_residual", dpp.max_residual},
           {"residual_tolerance", res.tolerance},
           {"residual_classes", counts},
           {"unreachable_points", unreachable}}};
}

// ---- verify ---------------------------------------------------------------

inline json witness_json(const Witness& w) {
  json j{{"K", w.set},
         {"point", w.point},
         {"slope", w.slope},
         {"deviation", w.deviation},
         {"persistence", to_string(w.persistence)}};
  j["refined_deviation"] = w.refined_deviation ? json(*w.refined_deviation) : json(nullptr);
  return j;
}

inline json verdict_json(const GallerySpace& g, const EikonalVerdict& v) {
  json witnesses = json::array();
  for (const Witness& w : v.witnesses) {
    json j = witness_json(w);
    if (auto label = label_of(g, w.point)) j["label"] = *label;
    witnesses.push_back(std::move(j));
  }
  json sets = json::array();
  for (const ProbeResult& p : v.probes) {
    sets.push_back({{"K", p.set.description},
                    {"worst_point", p.worst == kNoPoint ? json(nullptr) : json(p.worst)},
                    {"worst_slope", p.worst_slope},
                    {"worst_deviation", p.worst_deviation},
                    {"points_tested", p.points_tested},
                    {"unreachable", p.unreachable},
                    {"outliers", p.outliers.size()}});
  }
  return {{"space", v.meta},
          {"points", g.space->size()},
          {"verdict", to_string(v.verdict)},
          {"tolerance", v.tolerance},
          {"applicable", v.applicable},
          {"witnesses", witnesses},
          {"tested_sets", sets},
          {"notes", v.notes}};
}

inline const char* kind_name(ProbeSet::Kind k) {
  switch (k) {
    case ProbeSet::Kind::singleton: return "singleton";
    case ProbeSet::Kind::random: return "random";
    case ProbeSet::Kind::ball: return "ball";
  }
  return "?";
}

inline std::string probes_csv(const EikonalVerdict& v) {
  std::string s = "K,kind,size,worst_point,worst_slope,worst_deviation,points_tested,unreachable,outliers,stable\n";
  for (const ProbeResult& p : v.probes) {
    std::size_t stable = 0;
    for (const Witness& w : p.outliers) stable += w.stable();
    s += "\"" + p.set.description + "\"," + kind_name(p.set.kind) + "," + std::to_string(p.set.points.size()) + "," +
         (p.worst == kNoPoint ? std::string() : std::to_string(p.worst)) + "," + csv_real(p.worst_slope) + "," +
         csv_real(p.worst_deviation) + "," + std::to_string(p.points_tested) + "," + std::to_string(p.unreachable) +
         "," + std::to_string(p.outliers.size()) + "," + std::to_string(stable) + "\n";
  }
  return s;
}

/// `params` may set random_subsets, subset_sizes, ball_count and refine.
inline CommandResult cmd_verify(const fs::path& space_dir, std::uint64_t seed, std::optional<double> tol,
                                const std::vector<double>& radii, const json& params, const fs::path& out,
                                const std::string& command_line) {
  json recorded{{"space_dir", space_dir.string()}, {"radii", radii}, {"family", params.is_null() ? json::object() : params}};
  if (tol) recorded["tol"] = *tol;
  Manifest m("verify", command_line, recorded, seed);
  GallerySpace g = load_space_dir(space_dir, &m);
  VerifyOptions opt;
  opt.seed = seed;
  opt.tolerance = tol;
  if (!radii.empty()) opt.schedule = schedule_or_default(*g.space, radii);
  try {
    if (params.is_object()) {
      for (const auto& [k, val] : params.items()) {
        if (k == "random_subsets") opt.random_subsets = val.get<int>();
        else if (k == "subset_sizes") opt.subset_sizes = val.get<std::vector<int>>();
        else if (k == "ball_count") opt.ball_count = val.get<int>();
        else if (k == "refine") opt.refine = val.get<bool>();
        else throw Error(Errc::bad_params, "unknown verify parameter '" + k + "'");
      }
    } else if (!params.is_null()) {
      throw Error(Errc::bad_params, "verify parameters must be a JSON object");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::bad_params, std::string("bad verify parameters: ") + e.what());
  }
  EikonalVerdict v = check_eikonal_property(g, opt);
  m.emit_json(out / "verdict.json", verdict_json(g, v));
  m.emit_text(out / "probes.csv", probes_csv(v));
  m.write(out);
  json summary{{"verdict", to_string(v.verdict)}, {"tolerance", v.tolerance}, {"probes", v.probes.size()}};
  if (!v.witnesses.empty()) summary["top_witness"] = witness_json(v.witnesses.front());
  return {exit_code(v.verdict), summary};
}

// ---- slope ----------------------------------------------------------------

/// Slopes of a field given as a CSV (`field`) or as d_I to a point list
/// (`targets`, ids or marks). Writes per-point slopes and full profiles.
inline CommandResult cmd_slope(const fs::path& space_dir, const std::string& field, const std::string& targets,
                               const std::vector<double>& radii, const fs::path& out,
                               const std::string& command_line) {
  if (field.empty() == targets.empty()) throw Error(Errc::bad_params, "give exactly one of --field or --targets");
  Manifest m("slope", command_line, {{"space_dir", space_dir.string()}, {"field", field}, {"targets", targets}, {"radii", radii}}, 0);
  GallerySpace g = load_space_dir(space_dir, &m);
  ScalarField u;
  if (!field.empty()) {
    u = read_field_csv(field, g.space->size());
    m.input(field);
  } else {
    std::vector<PointId> k = resolve_point_list(g, targets);
    u = intrinsic_distance_field(*g.complex, k);
  }
  RadiusSchedule schedule = schedule_or_default(*g.space, radii);
  NeighborIndex index(*g.space, schedule.radii.front(), 256);
  auto profiles = slope_profiles(index, u, schedule, {}, UndefinedPolicy::skip);
  std::string slopes = "point_id,slope,radius,witness,populated\n";
  std::string prof = "point_id,radius,value,candidates,witness\n";
  double max_slope = 0.0;
  for (const SlopeProfile& p : profiles) {
    max_slope = std::max(max_slope, p.reported);
    slopes += std::to_string(p.point) + "," + csv_real(p.reported) + "," + csv_real(p.reported_radius) + "," +
              (p.witness == kNoPoint ? std::string() : std::to_string(p.witness)) + "," +
              (p.populated ? "1" : "0") + "\n";
    for (const ScaleValue& s : p.per_radius) {
      prof += std::to_string(p.point) + "," + csv_real(s.radius) + "," +
              (s.value ? csv_real(*s.value) : std::string()) + "," + std::to_string(s.candidates) + "," +
              (s.witness == kNoPoint ? std::string() : std::to_string(s.witness)) + "\n";
    }
  }
  m.emit_text(out / "slopes.csv", slopes);
  m.emit_text(out / "profiles.csv", prof);
  m.write(out);
  return {0, {{"points", profiles.size()}, {"radii", schedule.radii.size()}, {"max_slope", max_slope}}};
}

// ---- quasiconvexity -------------------------------------------------------

/// `params` may list "sources" (ids or marks) to sample pairs from instead
/// of the exhaustive pair set.
inline CommandResult cmd_quasiconvexity(const fs::path& space_dir, const json& params, const fs::path& out,
                                        const std::string& command_line) {
  Manifest m("quasiconvexity", command_line,
             {{"space_dir", space_dir.string()}, {"sampling", params.is_null() ? json::object() : params}}, 0);
  GallerySpace g = load_space_dir(space_dir, &m);
  PairSampling sampling = PairSampling::exhaustive();
  if (params.is_object() && params.contains("sources")) {
    std::vector<PointId> src;
    for (const auto& ref : params.at("sources")) src.push_back(resolve_point(g, ref));
    sampling = PairSampling::from_sources(std::move(src));
  } else if (!params.is_null() && !(params.is_object() && params.empty())) {
    throw Error(Errc::bad_params, "quasiconvexity parameters accept only \"sources\"");
  }
  QuasiconvexityResult q = quasiconvexity_constant(*g.space, *g.complex, sampling);
  json j{{"space", g.meta},
         {"points", g.space->size()},
         {"constant", q.constant.is_infinite() ? json("inf") : json(q.constant.raw())},
         {"x", point_json(g, q.x)},
         {"y", point_json(g, q.y)},
         {"pairs_checked", q.pairs_checked},
         {"sampling", params.is_object() && params.contains("sources") ? "sources" : "exhaustive"}};
  m.emit_json(out / "quasiconvexity.json", j);
  m.write(out);
  return {0, {{"constant", j["constant"]}, {"pairs_checked", q.pairs_checked}}};
}

// ---- report ---------------------------------------------------------------

struct ReportRow {
  std::string space;
  std::size_t points = 0;
  std::string quasiconvexity = "-";
  std::string verdict = "-";
  std::optional<double> worst_deviation;       // over all tested points
  std::optional<double> persisting_deviation;  // over stable or unresolved outliers
};

/// One row per space (keyed by the space files' digests), merging the
/// quasiconvexity and verify runs found among `run_dirs`. Runs whose
/// manifests coincide up to wall time count once.
inline CommandResult cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out,
                                const std::string& command_line) {
  if (run_dirs.empty()) throw Error(Errc::missing_artifacts, "report needs at least one run directory");
  std::set<std::string> seen;
  std::map<std::string, ReportRow> rows;
  std::vector<std::string> order;
  std::size_t runs = 0;
  for (const fs::path& dir : run_dirs) {
    const fs::path mpath = dir / "manifest.json";
    if (!fs::exists(mpath)) throw Error(Errc::missing_artifacts, mpath.string() + " not found");
    json manifest = read_json(mpath);
    if (!seen.insert(manifest_digest(manifest)).second) continue;
    ++runs;
    const std::string sub = manifest.value("subcommand", std::string());
    if (sub != "verify" && sub != "quasiconvexity") continue;
    const json& inputs = manifest.at("inputs");
    const std::string key = inputs.value("space.json", std::string()) + inputs.value("complex.json", std::string());
    if (!rows.count(key)) order.push_back(key);
    ReportRow& row = rows[key];
    if (sub == "verify") {
      json v = read_json(dir / "verdict.json");
      row.space = v.at("space").value("builder", std::string("?"));
      row.points = v.value("points", std::size_t{0});
      double worst = 0.0;
      for (const auto& s : v.at("tested_sets")) worst = std::max(worst, s.at("worst_deviation").get<double>());
      double persisting = 0.0;
      for (const auto& w : v.at("witnesses")) {
        if (w.at("persistence") != "resolved") persisting = std::max(persisting, w.at("deviation").get<double>());
      }
      if (!v.at("applicable").get<bool>()) {
        row.verdict = "N/A (no curves)";
      } else {
        row.verdict = v.at("verdict").get<std::string>();
        row.worst_deviation = worst;
        row.persisting_deviation = persisting;
      }
    } else {
      json q = read_json(dir / "quasiconvexity.json");
      row.space = q.at("space").value("builder", std::string("?"));
      row.points = q.value("points", std::size_t{0});
      row.quasiconvexity = q.at("constant").is_string() ? q.at("constant").get<std::string>()
                                                        : format_real(q.at("constant").get<double>());
    }
  }
  if (runs == 0) throw Error(Errc::missing_artifacts, "no runs found");

  std::string csv = "space,points,quasiconvexity_constant,eikonal_verdict,worst_deviation,persisting_deviation\n";
  json table = json::array();
  for (const std::string& key : order) {
    const ReportRow& r = rows[key];
    auto opt = [](const std::optional<double>& d) { return d ? format_real(*d) : std::string("-"); };
    csv += r.space + "," + std::to_string(r.points) + "," + r.quasiconvexity + ",\"" + r.verdict + "\"," +
           opt(r.worst_deviation) + "," + opt(r.persisting_deviation) + "\n";
    table.push_back({{"space", r.space},
                     {"points", r.points},
                     {"quasiconvexity_constant", r.quasiconvexity},
                     {"eikonal_verdict", r.verdict},
                     {"worst_deviation", r.worst_deviation ? json(*r.worst_deviation) : json(nullptr)},
                     {"persisting_deviation", r.persisting_deviation ? json(*r.persisting_deviation) : json(nullptr)}});
  }
  Manifest m("report", command_line, {{"runs", runs}}, 0);
  for (const fs::path& dir : run_dirs) m.input(dir / "manifest.json", (dir / "manifest.json").string());
  m.emit_text(out / "summary.csv", csv);
  m.emit_json(out / "summary.json", table);
  m.write(out);
  return {0, {{"rows", table}, {"runs", runs}}};
}

}  // namespace slopekit
