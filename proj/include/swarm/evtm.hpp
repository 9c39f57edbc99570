#pragma once

// Equivalent visiting time map (EVTM): per-cell timestamps where a partial
// detection is credited as a back-dated "equivalent" visit.

#include "swarm/grid.hpp"

#include <array>
#include <vector>

namespace swarm {

struct CurveParams {
  double alpha = 1.1;
  double beta = 0.8;
  double T_c = 120.0;  // revisit time threshold, s
};

using Map3 = std::array<std::array<double, 3>, 3>;

class Evtm {
 public:
  Evtm() = default;
  Evtm(GridGeometry geometry, double t0)
      : geometry_(geometry), t_(geometry.size(), t0) {}

  const GridGeometry& geometry() const { return geometry_; }
  double at(int m, int n) const { return t_[geometry_.index(m, n)]; }
  double& at(int m, int n) { return t_[geometry_.index(m, n)]; }
  double at(const Cell& c) const { return at(c.m, c.n); }
  double& at(const Cell& c) { return at(c.m, c.n); }

  const std::vector<double>& data() const { return t_; }

  friend bool operator==(const Evtm& a, const Evtm& b) { return a.t_ == b.t_; }

 private:
  GridGeometry geometry_;
  std::vector<double> t_;
};

/// 3x3 block averages around an anchor. Entry [1 + dm][1 + dn] summarizes the
/// region in direction (dm, dn): rows above/below the anchor row for dm = +1/-1
/// (all rows for dm = 0) and likewise for columns. [1][1] is the anchor cell.
struct CompressedMap {
  Map3 t{};
  Cell anchor;
};

/// L x L window centered on the anchor; out-of-grid cells hold t_now.
struct LocalMap {
  int L = 1;
  Cell anchor;
  std::vector<double> t;  // row-major, (L x L)

  int half() const { return (L - 1) / 2; }
  double at(int dm, int dn) const {
    return t[static_cast<std::size_t>((dm + half()) * L + (dn + half()))];
  }
  double& at(int dm, int dn) {
    return t[static_cast<std::size_t>((dm + half()) * L + (dn + half()))];
  }
};

/// lambda = 1 - exp(-alpha * ((t_now - t_visit) / T_c)^beta), in [0, 1).
double visiting_requirement(double t_now, double t_visit, const CurveParams& p);

/// Elapsed time whose requirement equals (1 - gamma) times that of `elapsed`.
double equivalent_elapsed(double elapsed, double gamma, const CurveParams& p);

/// New equivalent visit time after a detection with probability `gamma`:
/// the requirement at t_now is scaled by (1 - gamma). Throws on gamma <= 0.
double visit_update(double entry, double gamma, double t_now, const CurveParams& p);

CompressedMap compress(const Evtm& map, Cell anchor, double t_now);

LocalMap extract(const Evtm& map, Cell anchor, int L, double t_now);

/// Cellwise max of `map` and the in-grid part of `incoming`.
void merge_max(Evtm& map, const LocalMap& incoming);

}  // namespace swarm
