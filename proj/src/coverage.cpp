#include "swarm/coverage.hpp"

#include <limits>
#include <vector>

namespace swarm {

namespace {
constexpr double kVanishing = 1e-9;
}

double repulsive_potential(double d, double d0) { return std::max(0.0, (d0 - d) / d0); }

std::optional<Vec2> separation_heading(const UavState& self, std::span<const UavState> neighbors,
                                       std::span<const Vec2> obstacles, const CoverageParams& p) {
  const Vec2 pos = self.position();
  Vec2 sum = Vec2::Zero();
  auto repel = [&](const Vec2& from, double gain, double d0) {
    const Vec2 away = pos - from;
    const double d = away.norm();
    if (d < kVanishing) return;
    sum += gain * repulsive_potential(d, d0) * away / d;
  };

  for (const UavState& nb : neighbors) repel(nb.position(), p.k_o, p.d_o);
  for (const Vec2& ob : obstacles) repel(ob, p.k_o, p.d_o);
  if (!neighbors.empty()) {
    Vec2 centroid = Vec2::Zero();
    for (const UavState& nb : neighbors) centroid += nb.position();
    centroid /= static_cast<double>(neighbors.size());
    repel(centroid, p.k_c, p.d_c);
  }

  const double norm = sum.norm();
  if (norm < kVanishing) return std::nullopt;
  return sum / norm;
}

Map3 heading_match_map(const UavState& self, const std::optional<Vec2>& desired, const CoverageParams& p,
                       double omega_max, double dt, const GridGeometry& geometry) {
  const Cell anchor = geometry.cell_of(self.x, self.y);
  const double desired_angle = desired ? std::atan2(desired->y(), desired->x()) : 0.0;
  Map3 A{};
  for (int dm = -1; dm <= 1; ++dm) {
    for (int dn = -1; dn <= 1; ++dn) {
      double& a = A[static_cast<std::size_t>(dm + 1)][static_cast<std::size_t>(dn + 1)];
      const Cell c{anchor.m + dm, anchor.n + dn};
      if (!geometry.contains(c)) {
        a = 0.0;
        continue;
      }
      const Vec2 to = geometry.center(c) - self.position();
      const double angle = to.norm() < kVanishing ? self.eta : std::atan2(to.y(), to.x());
      if (std::abs(wrap_angle(angle - self.eta)) >= omega_max * dt) {
        a = 0.0;
        continue;
      }
      if (!desired) {
        a = 1.0;
        continue;
      }
      const double err = wrap_angle(angle - desired_angle);
      a = std::exp(-p.k_a * err * err);
    }
  }
  return A;
}

RewardMaps reward_maps(const Evtm& evtm, const CompressedMap& compressed, const UavState& self, const CurveParams& p,
                       double t_now, double r_o) {
  const GridGeometry& g = evtm.geometry();
  const Cell anchor = g.cell_of(self.x, self.y);
  RewardMaps out;

  // Visiting requirements over the bounding box of the nine candidate disks.
  const int reach = static_cast<int>(std::ceil(r_o / g.cell)) + 1;
  const int m_lo = std::max(0, anchor.m - reach);
  const int m_hi = std::min(g.rows - 1, anchor.m + reach);
  const int n_lo = std::max(0, anchor.n - reach);
  const int n_hi = std::min(g.cols - 1, anchor.n + reach);
  const int width = n_hi - n_lo + 1;
  std::vector<double> lambda(static_cast<std::size_t>((m_hi - m_lo + 1) * width));
  for (int m = m_lo; m <= m_hi; ++m) {
    for (int n = n_lo; n <= n_hi; ++n) {
      lambda[static_cast<std::size_t>((m - m_lo) * width + (n - n_lo))] = visiting_requirement(t_now, evtm.at(m, n), p);
    }
  }

  // Disk membership depends only on the cell offset, since candidate disks are
  // centered on cell centers.
  const double r2 = (r_o / g.cell) * (r_o / g.cell);
  const int disk = static_cast<int>(std::floor(r_o / g.cell));
  for (int dm = -1; dm <= 1; ++dm) {
    for (int dn = -1; dn <= 1; ++dn) {
      const int cm = anchor.m + dm;
      const int cn = anchor.n + dn;
      double sum = 0.0;
      for (int om = -disk; om <= disk; ++om) {
        const int m = cm + om;
        if (m < m_lo || m > m_hi) continue;
        for (int on = -disk; on <= disk; ++on) {
          if (static_cast<double>(om * om + on * on) > r2) continue;
          const int n = cn + on;
          if (n < n_lo || n > n_hi) continue;
          sum += lambda[static_cast<std::size_t>((m - m_lo) * width + (n - n_lo))];
        }
      }
      out.F[static_cast<std::size_t>(dm + 1)][static_cast<std::size_t>(dn + 1)] = sum;
    }
  }

  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) out.Q[a][b] = (t_now - compressed.t[a][b]) / p.T_c;
  }
  return out;
}

Ocrm ocrm(const Map3& F, const Map3& Q, const Map3& A, const CoverageParams& p, Cell anchor) {
  Ocrm out;
  out.anchor = anchor;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) out.j[a][b] = p.w_f * F[a][b] + p.w_q * Q[a][b] + p.w_a * A[a][b];
  }
  return out;
}

CoverageDecision coverage_command(const UavState& self, const Ocrm& j, double dt, const UavLimits& limits,
                                  const GridGeometry& geometry) {
  const Cell anchor = geometry.cell_of(self.x, self.y);
  Cell target = anchor;
  double best = -std::numeric_limits<double>::infinity();
  for (int dm = -1; dm <= 1; ++dm) {
    for (int dn = -1; dn <= 1; ++dn) {
      const Cell c{anchor.m + dm, anchor.n + dn};
      if (!geometry.contains(c)) continue;
      const double value = j.j[static_cast<std::size_t>(dm + 1)][static_cast<std::size_t>(dn + 1)];
      if (value > best) {
        best = value;
        target = c;
      }
    }
  }

  const Vec2 to = geometry.center(target) - self.position();
  const double dist = to.norm();
  const double desired = dist < kVanishing ? self.eta : std::atan2(to.y(), to.x());
  CoverageDecision out;
  out.target = target;
  out.command.dv = clamp_abs(dist / dt - self.v, limits.dv_max);
  out.command.omega = clamp_abs(wrap_angle(desired - self.eta) / dt, limits.omega_max);
  return out;
}

}  // namespace swarm
