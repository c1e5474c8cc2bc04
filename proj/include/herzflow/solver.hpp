#pragma once

// Existence machinery for mild solutions u = e^{nu t Laplace} u0 + B(u, u):
// Picard iteration over whole trajectories, the small-data contraction certificate, the
// frequency split with its local existence time, continuation in time, and the monitors for the
// blow-up integral, the chi^{-1} decay bound and the per-mode modulus inequality.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "herzflow/initial_data.hpp"
#include "herzflow/lattice.hpp"
#include "herzflow/norms.hpp"
#include "herzflow/operators.hpp"

namespace herzflow {

// ---------------------------------------------------------------------------------------------
// Sampling of the bilinear constant

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Random band-limited trajectory u(t) = e^{nu t Laplace} f1 + sin(pi t / T) f2, with f1, f2
/// divergence-free Gaussian fields of unit chi^{-1} norm.
inline Trajectory random_trajectory(const FrequencyLattice& L, std::uint64_t seed, double band, const TimeGrid& grid,
                                    const HeatParams& p, bool divergence_free = true) {
  const auto f1 = random_bandlimited_field(L, mix_seed(seed, 0), band, 1.0, divergence_free);
  const auto f2 = random_bandlimited_field(L, mix_seed(seed, 1), band, 1.0, divergence_free);
  std::vector<SpectralField> states;
  states.reserve(grid.nodes());
  for (int k = 0; k <= grid.M; ++k) {
    const double t = grid.time(k);
    states.push_back(field_axpy(std::sin(std::numbers::pi * t / grid.T), f2, heat_propagate(f1, t, p)));
  }
  return Trajectory(grid, std::move(states));
}

struct BilinearSampling {
  int samples = 20;
  std::uint64_t seed = 1;
  double T = 1.0;
  int M = 16;
  double band = 2.0;
};

struct BilinearConstant {
  double C_hat = 0.0;  ///< max of nu^{1/2} |B(u,v)| / (|u| |v|) over the samples, norms in L^2(chi^0)
  int used = 0;        ///< non-degenerate samples
};

inline BilinearConstant empirical_bilinear_constant(const BilinearForm& form, const HeatParams& p,
                                                    const BilinearSampling& s) {
  const TimeGrid grid(s.T, s.M);
  BilinearConstant out;
  for (int i = 0; i < s.samples; ++i) {
    const auto u = random_trajectory(form.lattice(), mix_seed(s.seed, 2 * i), s.band, grid, p);
    const auto v = random_trajectory(form.lattice(), mix_seed(s.seed, 2 * i + 1), s.band, grid, p);
    const double nu_ = l2_chi0_norm(u), nv = l2_chi0_norm(v);
    if (!(nu_ > 0.0) || !(nv > 0.0)) continue;
    const double nb = l2_chi0_norm(duhamel_B(u, v, form, p));
    out.C_hat = std::max(out.C_hat, std::sqrt(p.nu) * nb / (nu_ * nv));
    ++out.used;
  }
  return out;
}

/// Safety factor applied to the sampled constant.
inline constexpr double kC0SafetyFactor = 2.0;

/// C0 = 2 * C_hat.
inline double estimate_C0(const BilinearForm& form, const HeatParams& p, const BilinearSampling& s) {
  require(s.samples >= 10, "estimate_C0 needs at least 10 samples");
  const auto c = empirical_bilinear_constant(form, p, s);
  if (c.used == 0 || !(c.C_hat > 0.0)) throw ParameterError("all bilinear samples were degenerate");
  return kC0SafetyFactor * c.C_hat;
}

// ---------------------------------------------------------------------------------------------
// Contraction certificate

struct ContractionCertificate {
  double alpha = 0.0;         ///< |e^{nu t Laplace} u0| in L^2([0,T]; chi^0)
  double B_norm_bound = 0.0;  ///< C0 / nu^{1/2}
  double threshold = 0.0;     ///< 1 / (4 B_norm_bound)
  bool satisfied = false;
  double margin = 0.0;        ///< threshold - alpha
};

inline ContractionCertificate certificate_from_alpha(double alpha, double nu, double C0) {
  require(C0 > 0.0, "C0 must be positive");
  ContractionCertificate c;
  c.alpha = alpha;
  c.B_norm_bound = C0 / std::sqrt(nu);
  c.threshold = 1.0 / (4.0 * c.B_norm_bound);
  c.margin = c.threshold - alpha;
  c.satisfied = c.margin > 0.0;
  return c;
}

inline ContractionCertificate contraction_certificate(const SpectralField& u0, const TimeGrid& grid,
                                                      const HeatParams& p, double C0) {
  return certificate_from_alpha(l2_chi0_norm(free_evolution(u0, grid, p)), p.nu, C0);
}

/// Data size below which the certificate holds on every horizon: nu / (2^{3/2} C0).
inline double small_data_threshold(double nu, double C0) { return nu / (std::pow(2.0, 1.5) * C0); }

// ---------------------------------------------------------------------------------------------
// Monitors

/// Running trapezoid on a possibly nonuniform time axis.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t, const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t k = 1; k < f.size(); ++k) out[k] = out[k - 1] + 0.5 * (t[k] - t[k - 1]) * (f[k - 1] + f[k]);
  return out;
}

inline constexpr double kDecayTolerance = 1e-3;

struct DecayRecord {
  double t = 0.0;
  double lhs = 0.0;    ///< chi^{-1}(t) + (nu - A) int_0^t chi^1
  double bound = 0.0;  ///< A = |u0|_{chi^{-1}}
  bool ok = true;
};

struct DecayReport {
  bool applicable = false;  ///< A < nu
  std::vector<DecayRecord> records;
  bool all_ok = true;
  double worst_ratio = 0.0;  ///< max lhs / bound
};

inline DecayReport decay_monitor(const std::vector<double>& t, const std::vector<double>& chi_m1,
                                 const std::vector<double>& chi_1, double nu) {
  DecayReport r;
  if (t.empty()) return r;
  const double A = chi_m1.front();
  r.applicable = A < nu;
  const auto integral = cumulative_trapezoid(t, chi_1);
  for (std::size_t k = 0; k < t.size(); ++k) {
    DecayRecord d;
    d.t = t[k];
    d.lhs = chi_m1[k] + (nu - A) * integral[k];
    d.bound = A;
    d.ok = !r.applicable || d.lhs <= A * (1.0 + kDecayTolerance);
    if (A > 0.0) r.worst_ratio = std::max(r.worst_ratio, d.lhs / A);
    r.all_ok = r.all_ok && d.ok;
    r.records.push_back(d);
  }
  return r;
}

inline DecayReport decay_monitor(const Trajectory& traj, double nu) {
  std::vector<double> t(traj.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = traj.grid().time(static_cast<int>(k));
  return decay_monitor(t, chi_series(traj, -1), chi_series(traj, 1), nu);
}

/// Trapezoidal int_0^T |u|_{chi^0}^2 dt.
inline double blowup_integral(const Trajectory& traj) {
  const auto c0 = chi_series(traj, 0);
  std::vector<double> sq(c0.size());
  for (std::size_t k = 0; k < c0.size(); ++k) sq[k] = c0[k] * c0[k];
  const auto w = TrapezoidRule{}.weights(traj.grid());
  double s = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) s += w[k] * sq[k];
  return s;
}

inline constexpr double kEnergyTolerance = 1e-3;

struct EnergyReport {
  double worst_violation = 0.0;  ///< max over modes and nodes of (lhs - rhs) / rhs
  std::size_t worst_mode = 0;
  int worst_node = 0;
  bool passed = true;
};

namespace detail {
// exact integral of a decaying exponential through (0, a) and (1, b); arithmetic mean otherwise
inline double logarithmic_mean(double a, double b) {
  if (a <= 0.0 || b <= 0.0) return 0.5 * (a + b);
  const double d = a - b;
  if (std::abs(d) <= 1e-6 * std::max(a, b)) return 0.5 * (a + b);
  return d / std::log(a / b);
}
}  // namespace detail

/// Checks per mode and node
///     |u|(t) + nu |xi|^2 int_0^t |u| ds  <=  |u0| + C_a int_0^t |xi| (|u| * |u|) ds.
/// The dissipation integral uses the logarithmic mean per step, which is exact for pure heat
/// decay; the source integral is trapezoidal.
inline EnergyReport fourier_energy_monitor(const Trajectory& traj, double nu, const BilinearForm& form) {
  const auto& L = traj.lattice();
  const double dt = traj.grid().dt();
  const double Ca = form.multiplier_bound();
  const std::size_t N = L.size();
  std::vector<double> prev_abs(N), prev_src(N), diss(N, 0.0), src(N, 0.0), initial(N);
  EnergyReport r;

  auto source_density = [&](const SpectralField& u) {
    auto conv = modulus_convolution(u, u);
    for (std::size_t n = 0; n < N; ++n) conv[n] *= L.norm(n);
    return conv;
  };
  for (std::size_t n = 0; n < N; ++n) initial[n] = prev_abs[n] = modulus(traj[0][n]);
  prev_src = source_density(traj[0]);

  for (std::size_t k = 1; k < traj.size(); ++k) {
    const auto cur_src = source_density(traj[k]);
    for (std::size_t n = 0; n < N; ++n) {
      if (!L.is_mode(n)) continue;
      const double a = modulus(traj[k][n]);
      diss[n] += dt * detail::logarithmic_mean(prev_abs[n], a);
      src[n] += 0.5 * dt * (prev_src[n] + cur_src[n]);
      prev_abs[n] = a;
      const double lhs = a + nu * L.norm_sq(n) * diss[n];
      const double rhs = initial[n] + Ca * src[n];
      if (lhs == 0.0) continue;
      const double v = rhs > 0.0 ? (lhs - rhs) / rhs : std::numeric_limits<double>::infinity();
      if (v > r.worst_violation) {
        r.worst_violation = v;
        r.worst_mode = n;
        r.worst_node = static_cast<int>(k);
      }
    }
    prev_src = cur_src;
  }
  r.passed = r.worst_violation <= kEnergyTolerance;
  return r;
}

// ---------------------------------------------------------------------------------------------
// Picard iteration

enum class InitialIterate { FreeEvolution, Zero };

struct PicardOptions {
  double tol = 1e-10;
  int max_iter = 50;
  InitialIterate initial = InitialIterate::FreeEvolution;
  /// Positive: the certificate is evaluated against this C0.
  double C0 = 0.0;
  /// Overrides `initial` when set; must share the solve's grid and lattice.
  std::optional<Trajectory> start;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> residual_history;  ///< L^2(chi^0) distance between successive iterates
  std::optional<ContractionCertificate> certificate;
  bool converged = false;
  bool diverged = false;
  std::string message;
  double fixed_point_residual = std::numeric_limits<double>::quiet_NaN();

  std::vector<double> times;
  std::vector<double> chi_m1, chi_0, chi_1;
  std::vector<double> blowup_cumulative;
  double blowup_integral = 0.0;
  std::vector<double> div_residual;  ///< max |xi . u| / max |u| per node
  DecayReport decay;
};

struct PicardResult {
  Trajectory trajectory;
  SolveReport report;
};

/// Fills the time series and monitors of a report from (times, states).
inline void record_series(SolveReport& r, const std::vector<double>& times, const std::vector<const SpectralField*>& states,
                          double nu) {
  r.times = times;
  r.chi_m1.clear();
  r.chi_0.clear();
  r.chi_1.clear();
  r.div_residual.clear();
  for (const auto* s : states) {
    r.chi_m1.push_back(chi_norm(*s, -1));
    r.chi_0.push_back(chi_norm(*s, 0));
    r.chi_1.push_back(chi_norm(*s, 1));
    const double m = s->max_modulus();
    r.div_residual.push_back(m > 0.0 ? divergence_residual(*s) / m : 0.0);
  }
  std::vector<double> sq(r.chi_0.size());
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = r.chi_0[k] * r.chi_0[k];
  r.blowup_cumulative = cumulative_trapezoid(times, sq);
  r.blowup_integral = r.blowup_cumulative.empty() ? 0.0 : r.blowup_cumulative.back();
  r.decay = decay_monitor(times, r.chi_m1, r.chi_1, nu);
}

inline void record_series(SolveReport& r, const Trajectory& traj, double nu) {
  std::vector<double> t(traj.size());
  std::vector<const SpectralField*> s(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    t[k] = traj.grid().time(static_cast<int>(k));
    s[k] = &traj[k];
  }
  record_series(r, t, s, nu);
}

/// Iterates u <- e^{nu t Laplace} u0 + B(u, u) on the whole trajectory until successive iterates
/// agree to tol * max(1, |u|). Failure to converge means the data lies outside the contraction
/// regime on this horizon; it says nothing about blow-up.
inline PicardResult picard_solve(const SpectralField& u0, const TimeGrid& grid, const HeatParams& p,
                                 const BilinearForm& form, const PicardOptions& opt) {
  require(opt.tol > 0.0, "Picard tolerance must be positive");
  require(opt.max_iter >= 1, "Picard max_iter must be at least 1");
  if (!(u0.lattice() == form.lattice())) throw MismatchError("initial data lattice differs from the operator lattice");

  const Trajectory free = free_evolution(u0, grid, p);
  SolveReport rep;
  const double alpha = l2_chi0_norm(free);
  if (opt.C0 > 0.0) rep.certificate = certificate_from_alpha(alpha, p.nu, opt.C0);

  Trajectory x = opt.start                                     ? *opt.start
                 : opt.initial == InitialIterate::FreeEvolution ? free
                                                                : Trajectory(grid, u0.lattice(), u0.real());
  if (opt.start) require_compatible(x, free);
  const double blowup_guard = 1e12 * (1.0 + alpha);
  for (int it = 1; it <= opt.max_iter; ++it) {
    Trajectory next = trajectory_axpy(1.0, free, duhamel_B(x, x, form, p));
    const double res = l2_chi0_norm(trajectory_axpy(-1.0, x, next));
    const double size = l2_chi0_norm(next);
    rep.residual_history.push_back(res);
    rep.iterations = it;
    x = std::move(next);
    if (!std::isfinite(res) || !std::isfinite(size) || res > blowup_guard) {
      rep.diverged = true;
      rep.message = "Picard iterates left every bounded set: data outside the contraction regime on this horizon";
      break;
    }
    if (res <= opt.tol * std::max(1.0, size)) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && !rep.diverged) {
    rep.diverged = true;
    rep.message = "Picard iteration did not converge within max_iter: data outside the contraction regime on this horizon";
  }
  if (rep.converged)
    rep.fixed_point_residual =
        l2_chi0_norm(trajectory_axpy(-1.0, trajectory_axpy(1.0, free, duhamel_B(x, x, form, p)), x));
  record_series(rep, x, p.nu);
  return {std::move(x), std::move(rep)};
}

// ---------------------------------------------------------------------------------------------
// Frequency split and local existence time

struct SplitPlan {
  double rho = 0.0;        ///< splitting radius
  double tail_norm = 0.0;  ///< h^3 sum_{|xi| >= rho} |xi|^{-1} |u0|
  double threshold = 0.0;  ///< nu / (2^{5/2} C0)
  double T_local = 0.0;
  double C0 = 0.0;
  double chi_m1 = 0.0;     ///< |u0|_{chi^{-1}}
};

/// (nu^{1/2} / (8 rho C0 |u0|_{chi^{-1}}))^2.
inline double local_existence_time(double nu, double rho, double C0, double chi_m1) {
  const double r = std::sqrt(nu) / (8.0 * rho * C0 * chi_m1);
  return r * r;
}

inline double split_threshold(double nu, double C0) { return nu / (std::pow(2.0, 2.5) * C0); }

/// Smallest lattice radius rho whose tail mass at |xi| >= rho is below nu / (2^{5/2} C0).
inline SplitPlan split_initial_data(const SpectralField& u0, double nu, double C0) {
  require(nu > 0.0, "nu must be positive");
  require(C0 > 0.0, "C0 must be positive");
  const double A = chi_norm(u0, -1);
  require(A > 0.0, "split_initial_data needs nonzero initial data");
  const auto& L = u0.lattice();
  // shells keyed by the integer i^2 + j^2 + l^2
  std::map<long, double> shell_mass;
  for (std::size_t n = 0; n < u0.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const auto& c = L.coords(n);
    const long s = long(c[0]) * c[0] + long(c[1]) * c[1] + long(c[2]) * c[2];
    shell_mass[s] += modulus(u0[n]) / L.norm(n);
  }
  SplitPlan plan;
  plan.C0 = C0;
  plan.chi_m1 = A;
  plan.threshold = split_threshold(nu, C0);
  std::vector<std::pair<long, double>> shells(shell_mass.begin(), shell_mass.end());
  std::vector<double> tail(shells.size() + 1, 0.0);
  for (std::size_t i = shells.size(); i-- > 0;) tail[i] = tail[i + 1] + L.cell_volume() * shells[i].second;
  for (std::size_t i = 0; i < shells.size(); ++i) {
    if (tail[i] <= plan.threshold) {
      plan.rho = L.h() * std::sqrt(double(shells[i].first));
      plan.tail_norm = tail[i];
      plan.T_local = local_existence_time(nu, plan.rho, C0, A);
      return plan;
    }
  }
  throw SplitUnreachableError("high-frequency tail exceeds nu/(2^{5/2} C0) even on the outermost shell; increase K");
}

// ---------------------------------------------------------------------------------------------
// Continuation

struct ContinuationOptions {
  PicardOptions picard;
  int steps_per_segment = 16;
  int max_segments = 100000;
  /// Re-project restarts whose divergence residual exceeds kDriftGuard (relative).
  bool enforce_divergence_free = true;
};

inline constexpr double kDriftGuard = 1e-9;

enum class ContinuationStatus { Completed, Diverged, SplitUnreachable, SegmentLimit };

struct Segment {
  double t0 = 0.0;
  Trajectory trajectory = Trajectory(TimeGrid(), FrequencyLattice(1.0, 1));
  std::optional<SplitPlan> plan;  ///< empty for zero data
  int iterations = 0;
  std::vector<double> residual_history;
  bool converged = false;
  bool reprojected = false;
};

struct ContinuationResult {
  std::vector<Segment> segments;
  SolveReport report;
  ContinuationStatus status = ContinuationStatus::Completed;
  double reached = 0.0;  ///< time covered by converged segments
  double junction_jump = 0.0;
};

/// Restarts Picard from the current state on [t, t + T_local], T_local from the split of the
/// current state, until the horizon is reached or a segment fails.
inline ContinuationResult continue_solution(const SpectralField& u0, double horizon, const HeatParams& p,
                                            const BilinearForm& form, const ContinuationOptions& opt) {
  require(horizon > 0.0 && std::isfinite(horizon), "continuation horizon must be positive");
  require(opt.picard.C0 > 0.0, "continuation needs a positive C0");
  require(opt.steps_per_segment >= 1, "steps_per_segment must be at least 1");
  ContinuationResult out;
  SpectralField state = u0;
  double t = 0.0;
  while (horizon - t > 1e-14 * horizon) {
    if (static_cast<int>(out.segments.size()) >= opt.max_segments) {
      out.status = ContinuationStatus::SegmentLimit;
      out.report.message = "segment limit reached before the horizon";
      break;
    }
    std::optional<SplitPlan> plan;
    double len = horizon - t;
    if (chi_norm(state, -1) > 0.0) {
      try {
        plan = split_initial_data(state, p.nu, opt.picard.C0);
      } catch (const SplitUnreachableError& e) {
        out.status = ContinuationStatus::SplitUnreachable;
        out.report.message = e.what();
        break;
      }
      len = std::min(len, plan->T_local);
    }
    auto res = picard_solve(state, TimeGrid(len, opt.steps_per_segment), p, form, opt.picard);
    out.report.iterations += res.report.iterations;
    if (!res.report.converged) {
      out.status = ContinuationStatus::Diverged;
      out.report.diverged = true;
      out.report.message = res.report.message;
      out.report.residual_history = res.report.residual_history;
      break;
    }
    state = res.trajectory.back();
    bool reprojected = false;
    const double m = state.max_modulus();
    if (opt.enforce_divergence_free && m > 0.0 && divergence_residual(state) > kDriftGuard * m) {
      const auto projected = leray_project(state);
      out.junction_jump = std::max(out.junction_jump, chi_norm(projected - state, -1));
      state = projected;
      reprojected = true;
    }
    out.segments.push_back(Segment{.t0 = t,
                                   .trajectory = std::move(res.trajectory),
                                   .plan = plan,
                                   .iterations = res.report.iterations,
                                   .residual_history = res.report.residual_history,
                                   .converged = true,
                                   .reprojected = reprojected});
    t = (horizon - (t + len) <= 1e-14 * horizon) ? horizon : t + len;
  }
  out.reached = t;
  out.report.converged = out.status == ContinuationStatus::Completed;

  std::vector<double> times;
  std::vector<const SpectralField*> states;
  for (std::size_t s = 0; s < out.segments.size(); ++s) {
    const auto& seg = out.segments[s];
    for (std::size_t k = (s == 0 ? 0 : 1); k < seg.trajectory.size(); ++k) {
      times.push_back(seg.t0 + seg.trajectory.grid().time(static_cast<int>(k)));
      states.push_back(&seg.trajectory[k]);
    }
  }
  if (states.empty()) {
    times.push_back(0.0);
    states.push_back(&u0);
  }
  record_series(out.report, times, states, p.nu);
  return out;
}

}  // namespace herzflow
