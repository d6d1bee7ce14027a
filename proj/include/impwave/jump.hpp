#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "impwave/certificate.hpp"
#include "impwave/fit.hpp"
#include "impwave/integrate.hpp"

namespace impwave {

/// Geometric regularization ladder eps_k = eps0 * ratio^k, k = 0..count-1.
struct LadderSpec {
  double eps0 = 1e-2;
  double ratio = 0.5;
  int count = 5;

  std::vector<double> rungs() const {
    if (!(eps0 > 0.0) || !(ratio > 0.0) || !(ratio < 1.0))
      throw ConfigError("ladder: need eps0 > 0 and ratio in (0, 1)");
    if (count < 1) throw ConfigError("ladder: need at least one rung");
    std::vector<double> out(count);
    double e = eps0;
    for (int k = 0; k < count; ++k, e *= ratio) out[k] = e;
    return out;
  }
};

inline int worker_cap_from_env(const char* var = "IMPWAVE_WORKERS") {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* s = std::getenv(var)) {
    const int n = std::atoi(s);
    if (n >= 1) return std::min<int>(n, 64);
  }
  return static_cast<int>(std::min(hw, 16u));
}

/// Runs fn(k) for k = 0..n-1 on up to `workers` threads. Results must be
/// written into preallocated slots, so parallel and serial runs are
/// byte-identical.
template <class Fn>
void parallel_for(int n, int workers, const Fn& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) fn(k);
    });
  for (auto& th : pool) th.join();
}

/// Exit observables of one wave-zone crossing at a single eps.
struct RungObservables {
  double eps = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  State5 entry;
  State5 exit;
  double exit_flat_norm = 0.0;
  double max_abs_F = 0.0;
  double max_abs_dF_vel = 0.0;
  double sup_abs_dV = 0.0;  // sup |V'| across the zone
};

/// First-crossing observables over the whole ladder. Per-rung runs are
/// independent and may execute in parallel.
inline std::vector<RungObservables> run_crossing_ladder(const SeedData& seed,
                                                        const WaveProfile& profile,
                                                        const Mollifier& moll,
                                                        const BackgroundParams& bg,
                                                        const IntegrationConfig& cfg,
                                                        const LadderSpec& ladder,
                                                        int workers = 1) {
  const std::vector<double> rungs = ladder.rungs();
  std::vector<RungObservables> out(rungs.size());
  const BackgroundGeodesic geo = BackgroundGeodesic::from_seed(seed, bg);

  std::vector<std::string> errors(rungs.size());
  parallel_for(static_cast<int>(rungs.size()), workers, [&](int k) {
    try {
      const double eps = rungs[k];
      const State5 entry = seed_family_data(geo, eps * cfg.zone_margin);
      const ZoneResult zr = integrate_through_wave(entry, eps, profile, moll, bg, seed.e, cfg);
      RungObservables& r = out[k];
      r.eps = eps;
      r.alpha = zr.entry_state.t;
      r.beta = zr.exit_state.t;
      r.entry = zr.entry_state;
      r.exit = zr.exit_state;
      r.exit_flat_norm = flat_norm(zr.exit_state, bg);
      GeodesicSystem sys{eps, &profile, &moll, bg, seed.e};
      const DriftStats ds = zone_drift_stats(zr.path, sys);
      r.max_abs_F = ds.max_abs_F;
      r.max_abs_dF_vel = ds.max_abs_dF_vel;
      for (const auto& step : zr.path.steps)
        for (int j = 0; j <= 8; ++j) {
          const double t = step.t0 + step.h * j / 8.0;
          r.sup_abs_dV = std::max(r.sup_abs_dV, std::abs(step.eval(t)[5 + kV]));
        }
    } catch (const std::exception& ex) {
      errors[k] = ex.what();
    }
  });
  for (size_t k = 0; k < errors.size(); ++k)
    if (!errors[k].empty())
      throw NumericError("ladder rung eps = " + std::to_string(rungs[k]) + ": " + errors[k]);
  return out;
}

/// eps -> 0 limits of the exit data (Z' limits A_p, V limit B, V' limit C),
/// extrapolated with the model v(eps) = v* + c eps^r fitted on the last four
/// rungs, repeated for a second mollifier to measure the spread.
struct JumpData {
  Vec3 A_p{};
  double B = 0.0;
  double C = 0.0;
  std::array<PowerLawFit, 5> fits{};           // A2, A3, A4, B, C
  std::array<double, 5> uncertainties{};       // per-channel extrapolation residual
  double max_residual = 0.0;
  double mollifier_spread = 0.0;
  bool low_confidence = false;
  std::string primary_mollifier;
  std::string secondary_mollifier;
  std::vector<RungObservables> rungs;
};

namespace detail {

/// Fits the five exit channels on `tail` rungs ending `skip_last` rungs
/// before the fine end of the ladder.
inline std::array<PowerLawFit, 5> fit_exit_channels(const std::vector<RungObservables>& rungs,
                                                    int tail = 4, int skip_last = 0) {
  const int n = static_cast<int>(rungs.size()) - skip_last;
  const int use = std::min(tail, n);
  std::vector<double> eps;
  std::array<std::vector<double>, 5> chan;
  for (int k = n - use; k < n; ++k) {
    eps.push_back(rungs[k].eps);
    chan[0].push_back(rungs[k].exit.vel[kZ2]);
    chan[1].push_back(rungs[k].exit.vel[kZ3]);
    chan[2].push_back(rungs[k].exit.vel[kZ4]);
    chan[3].push_back(rungs[k].exit.pos[kV]);
    chan[4].push_back(rungs[k].exit.vel[kV]);
  }
  std::array<PowerLawFit, 5> fits;
  for (int c = 0; c < 5; ++c) fits[c] = fit_power_law(eps, chan[c]);
  return fits;
}

}  // namespace detail

inline JumpData jump_extrapolate(const SeedData& seed, const WaveProfile& profile,
                                 const Mollifier& moll, const BackgroundParams& bg,
                                 const IntegrationConfig& cfg, const LadderSpec& ladder,
                                 int workers = 1) {
  JumpData jd;
  jd.primary_mollifier = moll.name;
  jd.rungs = run_crossing_ladder(seed, profile, moll, bg, cfg, ladder, workers);
  if (static_cast<int>(jd.rungs.size()) < 5) jd.low_confidence = true;
  jd.fits = detail::fit_exit_channels(jd.rungs);
  // reported residual = fit-window sensitivity: the shift against the fit on
  // the window one rung coarser over-approximates the next refinement shift
  const auto alt = jd.rungs.size() >= 5 ? detail::fit_exit_channels(jd.rungs, 4, 1)
                                        : detail::fit_exit_channels(jd.rungs, 3);
  for (int c = 0; c < 5; ++c) {
    jd.uncertainties[c] =
        std::max(jd.fits[c].rms, std::abs(jd.fits[c].v_star - alt[c].v_star));
    jd.max_residual = std::max(jd.max_residual, jd.uncertainties[c]);
    if (!jd.fits[c].monotone) jd.low_confidence = true;
  }
  jd.A_p = {jd.fits[0].v_star, jd.fits[1].v_star, jd.fits[2].v_star};
  jd.B = jd.fits[3].v_star;
  jd.C = jd.fits[4].v_star;

  const Mollifier second = moll.name == "bump" ? make_poly_mollifier() : make_bump_mollifier();
  jd.secondary_mollifier = second.name;
  const auto rungs2 = run_crossing_ladder(seed, profile, second, bg, cfg, ladder, workers);
  const auto fits2 = detail::fit_exit_channels(rungs2);
  for (int c = 0; c < 5; ++c)
    jd.mollifier_spread =
        std::max(jd.mollifier_spread, std::abs(jd.fits[c].v_star - fits2[c].v_star));
  return jd;
}

}  // namespace impwave
