// Solve |grad u| = 1 on a sampled circle with u = 0 at one point, then
// check the answer three ways.
#include <cstdio>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

int main() {
  GallerySpace g = build_circle(1024);
  EikonalProblem p = complement_problem(g.complex, {g.mark("p0")});

  ValueFunction vf = solve(p);
  for (const char* m : {"quarter", "antipode"}) {
    std::printf("V(%s) = %.12f\n", m, vf.V[g.mark(m)]);
  }

  std::printf("compatibility: %s\n", check_compatibility(p).passed ? "holds" : "violated");
  std::printf("dynamic programming residual: %.3g\n", verify_dpp(vf, p).max_residual);

  ResidualReport r = residual_report(vf, p, default_schedule(*g.space));
  std::printf("slope residual classes: %zu SOLUTION, %zu SUPER, %zu DEFECT\n", r.count(ResidualClass::solution),
              r.count(ResidualClass::super), r.count(ResidualClass::defect));

  OptimalCurve c = extract_optimal_curve(vf, p, g.mark("quarter"));
  std::printf("optimal curve from quarter: %zu vertices, cost %.12f\n", c.path.vertices.size(), c.total);
  return 0;
}
