#include "swarm/evtm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarm {

double visiting_requirement(double t_now, double t_visit, const CurveParams& p) {
  const double elapsed = std::max(0.0, t_now - t_visit);
  return -std::expm1(-p.alpha * std::pow(elapsed / p.T_c, p.beta));
}

double equivalent_elapsed(double elapsed, double gamma, const CurveParams& p) {
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument(fmt::format("detection probability {} outside (0, 1]", gamma));
  }
  if (!(elapsed > 0.0) || gamma == 1.0) return 0.0;
  const double x = p.alpha * std::pow(elapsed / p.T_c, p.beta);
  const double lambda = -std::expm1(-x);
  // -ln(1 - (1 - gamma) lambda), written to stay accurate at both ends of x.
  const double y = x < 1.0 ? -std::log1p(-(1.0 - gamma) * lambda)
                           : -std::log(std::exp(-x) + gamma * lambda);
  if (!(y > 0.0)) return 0.0;
  return std::min(elapsed, p.T_c * std::pow(y / p.alpha, 1.0 / p.beta));
}

double visit_update(double entry, double gamma, double t_now, const CurveParams& p) {
  const double elapsed = equivalent_elapsed(std::max(0.0, t_now - entry), gamma, p);
  return std::max(entry, t_now - elapsed);
}

CompressedMap compress(const Evtm& map, Cell anchor, double t_now) {
  const GridGeometry& g = map.geometry();
  // Per-band row sums: band 0 = rows below the anchor, 1 = anchor row, 2 = above;
  // likewise for column bands.
  std::array<std::array<double, 3>, 3> sum{};
  std::array<std::array<long, 3>, 3> count{};
  for (int m = 0; m < g.rows; ++m) {
    const int rb = m < anchor.m ? 0 : (m == anchor.m ? 1 : 2);
    const double* row = map.data().data() + g.index(m, 0);
    double left = 0.0;
    double right = 0.0;
    for (int n = 0; n < anchor.n; ++n) left += row[n];
    for (int n = anchor.n + 1; n < g.cols; ++n) right += row[n];
    sum[rb][0] += left;
    sum[rb][1] += row[anchor.n];
    sum[rb][2] += right;
    count[rb][0] += anchor.n;
    count[rb][1] += 1;
    count[rb][2] += g.cols - anchor.n - 1;
  }

  CompressedMap out;
  out.anchor = anchor;
  auto average = [&](std::initializer_list<int> rbands, std::initializer_list<int> cbands) {
    double s = 0.0;
    long c = 0;
    for (int rb : rbands) {
      for (int cb : cbands) {
        s += sum[rb][cb];
        c += count[rb][cb];
      }
    }
    return c > 0 ? s / static_cast<double>(c) : t_now;
  };
  // Quadrant corners exclude the anchor row and column; edge-middle entries are
  // full strips across the other axis.
  for (int dm = -1; dm <= 1; ++dm) {
    for (int dn = -1; dn <= 1; ++dn) {
      double value;
      if (dm == 0 && dn == 0) {
        value = map.at(anchor);
      } else if (dm == 0) {
        value = average({0, 1, 2}, {dn + 1});
      } else if (dn == 0) {
        value = average({dm + 1}, {0, 1, 2});
      } else {
        value = average({dm + 1}, {dn + 1});
      }
      out.t[static_cast<std::size_t>(dm + 1)][static_cast<std::size_t>(dn + 1)] = value;
    }
  }
  return out;
}

LocalMap extract(const Evtm& map, Cell anchor, int L, double t_now) {
  if (L < 1 || L % 2 == 0) throw std::invalid_argument(fmt::format("window size {} is not a positive odd number", L));
  LocalMap out;
  out.L = L;
  out.anchor = anchor;
  out.t.assign(static_cast<std::size_t>(L) * static_cast<std::size_t>(L), t_now);
  const int h = out.half();
  const GridGeometry& g = map.geometry();
  for (int dm = -h; dm <= h; ++dm) {
    const int m = anchor.m + dm;
    if (m < 0 || m >= g.rows) continue;
    for (int dn = -h; dn <= h; ++dn) {
      const int n = anchor.n + dn;
      if (n < 0 || n >= g.cols) continue;
      out.at(dm, dn) = map.at(m, n);
    }
  }
  return out;
}

void merge_max(Evtm& map, const LocalMap& incoming) {
  const GridGeometry& g = map.geometry();
  const int h = incoming.half();
  for (int dm = -h; dm <= h; ++dm) {
    const int m = incoming.anchor.m + dm;
    if (m < 0 || m >= g.rows) continue;
    for (int dn = -h; dn <= h; ++dn) {
      const int n = incoming.anchor.n + dn;
      if (n < 0 || n >= g.cols) continue;
      double& own = map.at(m, n);
      own = std::max(own, incoming.at(dm, dn));
    }
  }
}

}  // namespace swarm
