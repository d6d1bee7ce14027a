#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "impwave/geometry.hpp"
#include "impwave/integrate.hpp"

namespace impwave {

/// 17 significant digits: bit-faithful double round-trips in text output.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline SegmentKind segment_kind_at(const Trajectory& traj, double t) {
  if (traj.segments.empty()) return SegmentKind::BackgroundClosedForm;
  const double tc = std::clamp(t, traj.segments.front().t_begin, traj.segments.back().t_end);
  for (const auto& seg : traj.segments)
    if (tc >= seg.t_begin && tc <= seg.t_end) return seg.kind;
  return traj.segments.back().kind;
}

inline constexpr const char* kTrajectoryCsvHeader =
    "t,U,V,Z2,Z3,Z4,dU,dV,dZ2,dZ3,dZ4,F_residual,norm_residual,segment_tag";

/// Writes traj.samples (resample first) in the fixed trajectory schema.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                                 const WaveProfile& profile, const Mollifier& moll) {
  os << kTrajectoryCsvHeader << "\n";
  for (const State5& s : traj.samples) {
    os << fmt17(s.t);
    for (int i = 0; i < 5; ++i) os << ',' << fmt17(s.pos[i]);
    for (int i = 0; i < 5; ++i) os << ',' << fmt17(s.vel[i]);
    os << ',' << fmt17(constraint_F(s, traj.bg));
    os << ',' << fmt17(metric_norm(s, traj.eps, profile, moll, traj.bg) - traj.e);
    os << ',' << segment_tag(segment_kind_at(traj, s.t)) << "\n";
  }
}

inline constexpr const char* kPlotdataCsvHeader = "t,series,value";

/// Long-format (t, series, value) rows for external plotting.
inline void write_plotdata_csv(std::ostream& os, const Trajectory& traj,
                               const WaveProfile& profile, const Mollifier& moll) {
  static constexpr const char* names[10] = {"U", "V", "Z2", "Z3", "Z4",
                                            "dU", "dV", "dZ2", "dZ3", "dZ4"};
  os << kPlotdataCsvHeader << "\n";
  for (const State5& s : traj.samples) {
    const std::string t = fmt17(s.t);
    for (int i = 0; i < 5; ++i) os << t << ',' << names[i] << ',' << fmt17(s.pos[i]) << "\n";
    for (int i = 0; i < 5; ++i) os << t << ',' << names[5 + i] << ',' << fmt17(s.vel[i]) << "\n";
    os << t << ",F_residual," << fmt17(constraint_F(s, traj.bg)) << "\n";
    os << t << ",norm_residual,"
       << fmt17(metric_norm(s, traj.eps, profile, moll, traj.bg) - traj.e) << "\n";
  }
}

}  // namespace impwave
