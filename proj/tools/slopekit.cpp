// slopekit command-line front end. Argument parsing only; the work lives
// in slopekit/commands.hpp.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slopekit/commands.hpp"

namespace {

using nlohmann::json;
using namespace slopekit;

/// --params accepts inline JSON or @path to a JSON file.
json parse_params(const std::string& text) {
  if (text.empty()) return nullptr;
  if (text.front() == '@') return read_json(text.substr(1));
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::bad_params, std::string("--params is not valid JSON: ") + e.what());
  }
}

std::string joined(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slopekit: local slopes, intrinsic distances and slope eikonal problems on sampled metric spaces"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::vector<double> radii;
  std::string out = ".";
  std::string params_text;
  auto common = [&](CLI::App* sub, bool with_seed) {
    if (with_seed) sub->add_option("--seed", seed, "Seed for every random choice (default 0)");
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_option("--params", params_text, "JSON object, or @file.json");
  };

  std::string space_name, space_dir, problem, field, targets;
  std::vector<std::string> run_dirs;
  std::optional<int> n, samples, tents, branches, depth, per_level, levels;
  std::optional<double> alpha;
  bool ungraded = false;

  auto* build = app.add_subcommand("build", "Build a gallery space");
  build->add_option("space", space_name, "snowflake|circle|interval|spider|pato|hyperpato|c0star|product")->required();
  build->add_option("--n", n, "Points (snowflake, circle, interval)");
  build->add_option("--samples", samples, "Samples per segment (spider, pato, hyperpato, c0star)");
  build->add_option("--tents", tents, "Tents (pato, hyperpato)");
  build->add_option("--branches", branches, "Branches (spider, c0star)");
  build->add_option("--depth", depth, "Depth (hyperpato, at most 4)");
  build->add_option("--per-level", per_level, "Children per level (hyperpato)");
  build->add_option("--levels", levels, "Heights (product)");
  build->add_option("--alpha", alpha, "Snowflake exponent in (0, 1)");
  build->add_flag("--ungraded", ungraded, "Uniform sampling without apex grading");
  common(build, false);

  auto* solve_cmd = app.add_subcommand("solve", "Solve a slope eikonal problem by the value formula");
  solve_cmd->add_option("space_dir", space_dir, "Directory written by build")->required();
  solve_cmd->add_option("problem", problem, "Problem JSON")->required();
  solve_cmd->add_option("--tol", tol, "Residual tolerance (default 3x sampling resolution)");
  solve_cmd->add_option("--radii", radii, "Radius schedule, decreasing, comma separated")->delimiter(',');
  common(solve_cmd, false);

  auto* verify = app.add_subcommand("verify", "Test the eikonal property over families of closed sets");
  verify->add_option("space_dir", space_dir, "Directory written by build")->required();
  verify->add_option("--tol", tol, "Slope tolerance (default max(0.02, 3x sampling resolution))");
  verify->add_option("--radii", radii, "Radius schedule, decreasing, comma separated")->delimiter(',');
  common(verify, true);

  auto* slope = app.add_subcommand("slope", "Local slope profiles of a field");
  slope->add_option("space_dir", space_dir, "Directory written by build")->required();
  slope->add_option("--field", field, "CSV point_id,value");
  slope->add_option("--targets", targets, "Use d_I to these ids or marks (comma separated)");
  slope->add_option("--radii", radii, "Radius schedule, decreasing, comma separated")->delimiter(',');
  common(slope, false);

  auto* qc = app.add_subcommand("quasiconvexity", "sup of d_I / d over point pairs");
  qc->add_option("space_dir", space_dir, "Directory written by build")->required();
  common(qc, false);

  auto* report = app.add_subcommand("report", "Summary table over completed runs");
  report->add_option("run_dirs", run_dirs, "Run directories");
  common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    Error err(Errc::bad_params, e.what());
    std::cerr << error_json(err, app.help()).dump(2) << "\n";
    return exit_code_for(Errc::bad_params);
  }

  const std::string cmdline = joined(argc, argv);
  CLI::App* active = app.get_subcommands().front();
  try {
    json params = parse_params(params_text);
    CommandResult r;
    if (active == build) {
      if (!params.is_null() && !params.is_object()) throw Error(Errc::bad_params, "--params must be a JSON object");
      if (params.is_null()) params = json::object();
      auto set = [&](const char* key, const auto& v) {
        if (v) params[key] = *v;
      };
      set("n", n);
      set("samples", samples);
      set("tents", tents);
      set("branches", branches);
      set("depth", depth);
      set("per_level", per_level);
      set("levels", levels);
      set("alpha", alpha);
      if (ungraded) params["graded"] = false;
      r = cmd_build(space_name, params, out, cmdline);
    } else if (active == solve_cmd) {
      r = cmd_solve(space_dir, problem, out, tol, radii, cmdline);
    } else if (active == verify) {
      r = cmd_verify(space_dir, seed, tol, radii, params, out, cmdline);
    } else if (active == slope) {
      r = cmd_slope(space_dir, field, targets, radii, out, cmdline);
    } else if (active == qc) {
      r = cmd_quasiconvexity(space_dir, params, out, cmdline);
    } else {
      r = cmd_report(std::vector<fs::path>(run_dirs.begin(), run_dirs.end()), out, cmdline);
    }
    std::cout << r.summary.dump(2) << "\n";
    return r.exit_code;
  } catch (const Error& e) {
    std::string usage = e.code() == Errc::bad_params || e.code() == Errc::unknown_space ? active->help() : "";
    std::cerr << error_json(e, usage).dump(2) << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "INTERNAL"}, {"message", e.what()}, {"exit_code", kInternalErrorExit}}.dump(2) << "\n";
    return kInternalErrorExit;
  }
}
