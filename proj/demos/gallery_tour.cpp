// One line per gallery space: size, quasiconvexity seen from a base point,
// and the eikonal verdict with its strongest witness.
#include <cstdio>

#include "slopekit/slopekit.hpp"

using namespace slopekit;

int main() {
  struct Entry {
    const char* base;
    GallerySpace g;
  };
  std::vector<Entry> tour;
  tour.push_back({"left", build_interval(201)});
  tour.push_back({"p0", build_circle(1024)});
  tour.push_back({"left", build_snowflake_interval(201)});
  tour.push_back({"origin", build_spider(6, 9)});
  tour.push_back({"origin", build_pato(12, 5)});
  tour.push_back({"root", build_hyperpato(2, 3, 5)});
  tour.push_back({"origin", build_c0_star(8, 5)});

  std::printf("%-10s %7s %10s  %-12s %s\n", "space", "points", "qc", "verdict", "witness");
  for (const Entry& e : tour) {
    const GallerySpace& g = e.g;
    auto qc = quasiconvexity_constant(*g.space, *g.complex, PairSampling::from_sources({g.mark(e.base)}));
    EikonalVerdict v = check_eikonal_property(g);
    std::string witness = "-";
    if (!v.witnesses.empty()) {
      const Witness& w = v.witnesses.front();
      witness = "point " + std::to_string(w.point) + " slope " + format_real(w.slope) + " (" +
                to_string(w.persistence) + ")";
    }
    char qtext[32] = "inf";
    if (!qc.constant.is_infinite()) std::snprintf(qtext, sizeof qtext, "%.6g", qc.constant.raw());
    std::printf("%-10s %7zu %10s  %-12s %s\n", g.name().c_str(), g.space->size(), qtext,
                v.applicable ? to_string(v.verdict) : "N/A", witness.c_str());
  }
  return 0;
}
