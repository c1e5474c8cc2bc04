#pragma once

// Executable inequality checks with measured constants. Each check returns an InequalityResult
// whose verdict is ratio <= 1 + tolerance; sharp cases are reported as a second result with the
// roles of lhs and rhs exchanged, so a vacuous bound fails just as a violated one does.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "herzflow/initial_data.hpp"
#include "herzflow/lattice.hpp"
#include "herzflow/norms.hpp"
#include "herzflow/operators.hpp"
#include "herzflow/solver.hpp"

namespace herzflow::verify {

using nlohmann::ordered_json;

// Per-check tolerances.
inline constexpr double kInterpolationTol = 1e-10;
inline constexpr double kSemigroupTol = 1e-3;
inline constexpr double kStabilityBand = 0.2;
inline constexpr double kSourceTol = 1e-9;
inline constexpr double kHeatLemmaTol = 1e-3;
inline constexpr double kModulusTol = 1e-9;
inline constexpr double kDivergenceFreeTol = 1e-12;
inline constexpr double kBlowupSlack = 1e-3;

struct InequalityResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool inconclusive = false;
  ordered_json context = ordered_json::object();
};

inline double safe_ratio(double lhs, double rhs) {
  if (rhs > 0.0) return lhs / rhs;
  return lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

inline InequalityResult make_result(std::string name, double lhs, double rhs, double tol,
                                    ordered_json context = ordered_json::object()) {
  InequalityResult r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = safe_ratio(lhs, rhs);
  r.tolerance = tol;
  r.passed = std::isfinite(r.ratio) && r.ratio <= 1.0 + tol;
  r.context = std::move(context);
  return r;
}

/// Reverse inequality rhs <= lhs (1 + tol): certifies that a bound is attained.
inline InequalityResult sharpness_of(const InequalityResult& r, std::string name) {
  return make_result(std::move(name), r.rhs, r.lhs, r.tolerance, r.context);
}

/// Keeps the sample with the largest ratio; an empty sweep yields a trivially passing result.
class WorstCase {
 public:
  WorstCase(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}
  void add(const InequalityResult& r) {
    ++count_;
    if (!failed_ && (!have_ || !r.passed || r.ratio > worst_.ratio)) {
      worst_ = r;
      have_ = true;
    }
    failed_ = failed_ || !r.passed;
  }
  InequalityResult result(ordered_json extra = ordered_json::object()) const {
    InequalityResult r = have_ ? worst_ : make_result(name_, 0.0, 0.0, tol_);
    r.name = name_;
    r.tolerance = tol_;
    r.context["samples"] = count_;
    for (auto it = extra.begin(); it != extra.end(); ++it) r.context[it.key()] = it.value();
    return r;
  }

 private:
  std::string name_;
  double tol_;
  InequalityResult worst_;
  bool have_ = false;
  bool failed_ = false;
  int count_ = 0;
};

// ---------------------------------------------------------------------------------------------

/// |u|^2_{L^2 chi^0} <= |u|_{L^inf chi^{-1}} |u|_{L^1 chi^1}.
inline InequalityResult check_interpolation(const Trajectory& traj, const TrapezoidRule& rule = {}) {
  const double l2 = l2_chi0_norm(traj, rule);
  return make_result("interpolation", l2 * l2, linf_chi_norm(traj, -1) * l1_chi_norm(traj, 1, rule),
                     kInterpolationTol);
}

/// |e^{nu t Laplace} u0|_{L^2([0,T]; chi^0)} <= (2 nu)^{-1/2} |u0|_{chi^{-1}}.
inline InequalityResult check_semigroup_estimate(const SpectralField& u0, double nu, double T, int M,
                                                 const TrapezoidRule& rule = {}) {
  const HeatParams p(nu);
  const double lhs = l2_chi0_norm(free_evolution(u0, TimeGrid(T, M), p), rule);
  const double rhs = chi_norm(u0, -1) / std::sqrt(2.0 * nu);
  return make_result("semigroup_estimate", lhs, rhs, kSemigroupTol, {{"nu", nu}, {"T", T}, {"M", M}});
}

struct BilinearEstimate {
  InequalityResult result;  ///< |C_coarse - C_fine| <= 0.2 C_coarse
  double C_hat_coarse = 0.0;
  double C_hat_fine = 0.0;
};

/// Empirical constant of |B(u,v)|_{L^2 chi^0} <= (C / nu^{1/2}) |u| |v| on the lattice and on its
/// refinement K -> 2K, with identical band-limited samples.
inline BilinearEstimate check_bilinear_estimate(int pairs, const FrequencyLattice& lattice, double nu, double T, int M,
                                                std::uint64_t seed, const GnsTensor& tensor = ns_tensor(),
                                                double band = 2.0) {
  require(pairs >= 10, "bilinear estimate needs at least 10 pairs");
  const HeatParams p(nu);
  const BilinearSampling s{pairs, seed, T, M, band};
  const auto fine_lattice = make_lattice(lattice.h(), std::min(2 * lattice.K(), FrequencyLattice::kMaxHalfWidth));
  const auto coarse = empirical_bilinear_constant(BilinearForm(lattice, tensor), p, s);
  const auto fine = empirical_bilinear_constant(BilinearForm(fine_lattice, tensor), p, s);
  BilinearEstimate out;
  out.C_hat_coarse = coarse.C_hat;
  out.C_hat_fine = fine.C_hat;
  out.result = make_result("bilinear_estimate_stability", std::abs(coarse.C_hat - fine.C_hat),
                           kStabilityBand * coarse.C_hat, 0.0,
                           {{"C_hat_coarse", coarse.C_hat},
                            {"C_hat_fine", fine.C_hat},
                            {"K_coarse", lattice.K()},
                            {"K_fine", fine_lattice.K()},
                            {"pairs", pairs},
                            {"seed", seed}});
  if (!(coarse.C_hat > 0.0) || !std::isfinite(coarse.C_hat) || !std::isfinite(fine.C_hat)) out.result.passed = false;
  return out;
}

/// |Q(u,v)|_{L^1 chi^{-1}} <= C_a |u|_{L^2 chi^0} |v|_{L^2 chi^0}.
inline InequalityResult check_source_estimate(const Trajectory& u, const Trajectory& v, const BilinearForm& form) {
  const double lhs = l1_chi_norm(q_trajectory(u, v, form), -1);
  const double rhs = form.multiplier_bound() * l2_chi0_norm(u) * l2_chi0_norm(v);
  return make_result("source_estimate", lhs, rhs, kSourceTol, {{"C_a", form.multiplier_bound()}});
}

/// For d_t v - nu Laplace v = f, v(0) = v0:
///   first:  h^3 sum_xi sup_t |v(t,xi)| / |xi|  <=  |v0|_{chi^{-1}} + |f|_{L^1 chi^{-1}}
///   second: |v|_{L^inf chi^{-1}} + nu |v|_{L^1 chi^1}  <=  2 (|v0|_{chi^{-1}} + |f|_{L^1 chi^{-1}})
inline std::pair<InequalityResult, InequalityResult> check_heat_lemma(const SpectralField& v0, const Trajectory& f,
                                                                      double nu) {
  const HeatParams p(nu);
  const auto v = heat_solve_forced(v0, f, p);
  const auto& L = v.lattice();
  double sup_sum = 0.0;
  for (std::size_t n = 0; n < L.size(); ++n) {
    if (!L.is_mode(n)) continue;
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, modulus(v[k][n]));
    sup_sum += m / L.norm(n);
  }
  sup_sum *= L.cell_volume();
  const double data = chi_norm(v0, -1) + l1_chi_norm(f, -1);
  return {make_result("heat_lemma_sup", sup_sum, data, kHeatLemmaTol),
          make_result("heat_lemma_energy", linf_chi_norm(v, -1) + nu * l1_chi_norm(v, 1), 2.0 * data, kHeatLemmaTol)};
}

/// Runs Picard from the zero iterate and from the free evolution and measures
/// |w|_{L^inf chi^{-1}} + nu |w|_{L^1 chi^1} for w = u1 - u2 against 10 tol.
inline InequalityResult check_uniqueness(const SpectralField& u0, double nu, double T, int M, double tol,
                                         const BilinearForm& form, double C0, int max_iter = 50) {
  const HeatParams p(nu);
  const TimeGrid grid(T, M);
  const auto cert = contraction_certificate(u0, grid, p, C0);
  ordered_json ctx{{"alpha", cert.alpha}, {"threshold", cert.threshold}, {"tol", tol}};
  PicardOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.initial = InitialIterate::Zero;
  const auto r1 = picard_solve(u0, grid, p, form, opt);
  opt.initial = InitialIterate::FreeEvolution;
  const auto r2 = picard_solve(u0, grid, p, form, opt);
  if (!cert.satisfied || !r1.report.converged || !r2.report.converged) {
    InequalityResult r = make_result("uniqueness", 0.0, 10.0 * tol, 0.0, ctx);
    r.passed = false;
    r.inconclusive = true;
    r.context["reason"] = cert.satisfied ? "a Picard run did not converge" : "certificate not satisfied";
    return r;
  }
  const auto w = trajectory_axpy(-1.0, r2.trajectory, r1.trajectory);
  ctx["iterations_zero_start"] = r1.report.iterations;
  ctx["iterations_free_start"] = r2.report.iterations;
  return make_result("uniqueness", linf_chi_norm(w, -1) + nu * l1_chi_norm(w, 1), 10.0 * tol, 0.0, ctx);
}

// ---------------------------------------------------------------------------------------------
// Radial sums of the chi^{-1} \ H^{1/2} counterexample: |xi| f(xi) = h(|xi|) with
// h = 2^{(j+1)/2} on the shell [1 - 2^{-j}, 1 - 2^{-(j+1)}). Angular constants are set to 1.

struct CounterexampleSums {
  double chi_partial = 0.0;      ///< sum_{j<=J} int_shell h(r) dr
  double sobolev_partial = 0.0;  ///< sum_{j<=J} int_shell r h(r)^2 dr
};

struct CounterexampleRow {
  int j = 0;
  double chi_partial = 0.0;
  double sobolev_partial = 0.0;
  double sobolev_increment = 0.0;
};

inline constexpr int kCounterexampleMaxJ = 60;

inline std::vector<CounterexampleRow> counterexample_table(int J) {
  require(J >= 0 && J <= kCounterexampleMaxJ, "counterexample J must lie in [0, 60]");
  std::vector<CounterexampleRow> rows;
  double chi = 0.0, sob = 0.0;
  for (int j = 0; j <= J; ++j) {
    const double a = 1.0 - std::ldexp(1.0, -j);
    const double b = 1.0 - std::ldexp(1.0, -(j + 1));
    const double width = std::ldexp(1.0, -(j + 1));
    const double h2 = std::ldexp(1.0, j + 1);
    const double h = std::sqrt(h2);
    // int_a^b r dr = (b - a)(b + a)/2
    const double inc = h2 * width * (a + b) / 2.0;
    chi += h * width;
    sob += inc;
    rows.push_back({j, chi, sob, inc});
  }
  return rows;
}

inline CounterexampleSums counterexample_sums(int J) {
  const auto rows = counterexample_table(J);
  return {rows.back().chi_partial, rows.back().sobolev_partial};
}

// ---------------------------------------------------------------------------------------------
// Suite

struct SuiteConfig {
  double h = 1.0;
  int K = 4;
  double nu = 1.0;
  std::uint64_t seed = 1;
  int trajectories = 100;   ///< interpolation sweep
  int pairs = 100;          ///< bilinear estimate
  int operator_pairs = 20;  ///< modulus bound, divergence-free output, source estimate
  int heat_pairs = 50;
  int solve_runs = 2;       ///< random Picard runs (contraction, uniqueness, decay)
  double T = 1.0;
  int M = 16;
  int semigroup_M = 1024;
  double band = 2.0;
  double tol = 1e-10;
  int max_iter = 50;
  int counterexample_J = 20;
  /// Fault-injection hook: scales the trapezoid weights of the sharp semigroup check.
  double quadrature_weight_scale = 1.0;

  static SuiteConfig from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.empty()) throw ParameterError("verification config is empty");
    SuiteConfig c;
    if (j.contains("lattice")) {
      c.h = j["lattice"].value("h", c.h);
      c.K = j["lattice"].value("K", c.K);
    }
    c.nu = j.value("nu", c.nu);
    c.seed = j.value("seed", c.seed);
    if (j.contains("verify")) {
      const auto& v = j["verify"];
      if (!v.is_object()) throw ParameterError("'verify' must be an object");
      static const char* known[] = {"trajectories", "pairs", "operator_pairs", "heat_pairs", "solve_runs", "T", "M",
                                    "semigroup_M", "band", "tol", "max_iter", "counterexample_J"};
      for (auto it = v.begin(); it != v.end(); ++it)
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
          throw ParameterError("unknown key '" + it.key() + "' in verify");
      c.trajectories = v.value("trajectories", c.trajectories);
      c.pairs = v.value("pairs", c.pairs);
      c.operator_pairs = v.value("operator_pairs", c.operator_pairs);
      c.heat_pairs = v.value("heat_pairs", c.heat_pairs);
      c.solve_runs = v.value("solve_runs", c.solve_runs);
      c.T = v.value("T", c.T);
      c.M = v.value("M", c.M);
      c.semigroup_M = v.value("semigroup_M", c.semigroup_M);
      c.band = v.value("band", c.band);
      c.tol = v.value("tol", c.tol);
      c.max_iter = v.value("max_iter", c.max_iter);
      c.counterexample_J = v.value("counterexample_J", c.counterexample_J);
    }
    if (j.contains("test_hooks")) c.quadrature_weight_scale = j["test_hooks"].value("quadrature_weight_scale", 1.0);
    c.validate();
    return c;
  }

  void validate() const {
    require(h > 0.0 && K >= 1 && K <= 32, "suite lattice needs h > 0 and 1 <= K <= 32 (the refinement doubles K)");
    require(nu > 0.0, "nu must be positive");
    require(trajectories >= 1 && pairs >= 10 && operator_pairs >= 1 && heat_pairs >= 1 && solve_runs >= 1,
            "sweep counts must be positive (pairs >= 10)");
    require(T > 0.0 && M >= 1 && semigroup_M >= 1, "time grid parameters must be positive");
    require(band >= h, "band must cover at least the first lattice shell");
    require(tol > 0.0 && max_iter >= 1, "solver tolerance and iteration cap must be positive");
    require(counterexample_J >= 0 && counterexample_J <= kCounterexampleMaxJ, "counterexample_J must lie in [0, 60]");
    require(quadrature_weight_scale > 0.0, "quadrature_weight_scale must be positive");
  }
};

struct SuiteReport {
  std::vector<InequalityResult> checks;
  int passed() const {
    int n = 0;
    for (const auto& c : checks) n += c.passed;
    return n;
  }
  int failed() const {
    int n = 0;
    for (const auto& c : checks) n += !c.passed && !c.inconclusive;
    return n;
  }
  int inconclusive() const {
    int n = 0;
    for (const auto& c : checks) n += c.inconclusive;
    return n;
  }
  bool all_passed() const { return failed() == 0; }
};

inline ordered_json to_json(const InequalityResult& r) {
  auto num = [](double x) -> ordered_json {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  };
  ordered_json j;
  j["name"] = r.name;
  j["lhs"] = num(r.lhs);
  j["rhs"] = num(r.rhs);
  j["ratio"] = num(r.ratio);
  j["passed"] = r.passed;
  j["tolerance"] = r.tolerance;
  j["context"] = r.context;
  if (r.inconclusive) j["inconclusive"] = true;
  return j;
}

inline ordered_json to_json(const SuiteReport& s) {
  ordered_json j;
  j["checks"] = ordered_json::array();
  for (const auto& c : s.checks) j["checks"].push_back(to_json(c));
  j["summary"] = {{"passed", s.passed()}, {"failed", s.failed()}};
  if (s.inconclusive() > 0) j["summary"]["inconclusive"] = s.inconclusive();
  return j;
}

/// Field concentrated on the mode h*(1,0,0) and its partner, with |u0|_{chi^{-1}} = 1.
inline SpectralField unit_shell_mode(const FrequencyLattice& L) {
  SpectralField u(L, true);
  u.set_mode({1, 0, 0}, {0.0, Complex(0.5, 0.0), 0.0});
  return scaled(u, 1.0 / chi_norm(u, -1));
}

/// Largest ratio |Q(xi)| / (C_a |xi| (|u| * |v|)(xi)) over the lattice.
inline double modulus_bound_ratio(const SpectralField& u, const SpectralField& v, const BilinearForm& form) {
  const auto q = form.apply(u, v);
  const auto conv = modulus_convolution(u, v);
  const auto& L = u.lattice();
  double worst = 0.0;
  for (std::size_t n = 0; n < L.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const double m = modulus(q[n]);
    if (m == 0.0) continue;
    const double bound = form.multiplier_bound() * L.norm(n) * conv[n];
    worst = std::max(worst, bound > 0.0 ? m / bound : std::numeric_limits<double>::infinity());
  }
  return worst;
}

inline SuiteReport run_full_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteReport rep;
  const auto L = make_lattice(cfg.h, cfg.K);
  const HeatParams p(cfg.nu);
  const BilinearForm form(L, ns_tensor());
  const TimeGrid grid(cfg.T, cfg.M);
  auto seed_of = [&](std::uint64_t stream, int i) { return mix_seed(mix_seed(cfg.seed, stream), i); };
  auto guarded = [&](const std::string& name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      InequalityResult r = make_result(name, 0.0, 0.0, 0.0, {{"error", e.what()}});
      r.passed = false;
      rep.checks.push_back(std::move(r));
    }
  };

  guarded("interpolation_random", [&] {
    WorstCase w("interpolation_random", kInterpolationTol);
    for (int i = 0; i < cfg.trajectories; ++i) {
      std::vector<SpectralField> states;
      for (int k = 0; k <= grid.M; ++k)
        states.push_back(random_bandlimited_field(L, seed_of(1, i * (grid.M + 1) + k), double(cfg.K) * cfg.h,
                                                  1.0 + 0.5 * std::sin(double(k + i))));
      w.add(check_interpolation(Trajectory(grid, std::move(states))));
    }
    rep.checks.push_back(w.result({{"seed", cfg.seed}}));
  });

  guarded("interpolation_sharp", [&] {
    auto r = check_interpolation(constant_trajectory(unit_shell_mode(L), grid));
    r.name = "interpolation_sharp";
    rep.checks.push_back(r);
    rep.checks.push_back(sharpness_of(r, "interpolation_sharp_attained"));
  });

  guarded("semigroup_sharp", [&] {
    const double T = 20.0 / (cfg.nu * cfg.h * cfg.h);
    auto r = check_semigroup_estimate(unit_shell_mode(L), cfg.nu, T, cfg.semigroup_M,
                                      TrapezoidRule{cfg.quadrature_weight_scale});
    r.name = "semigroup_sharp";
    rep.checks.push_back(r);
    rep.checks.push_back(sharpness_of(r, "semigroup_sharp_attained"));
  });

  guarded("semigroup_two_shells", [&] {
    SpectralField u(L, true);
    u.set_mode({1, 0, 0}, {0.0, 0.5, 0.0});
    u.set_mode({0, 0, std::min(cfg.K, 4)}, {0.5, 0.0, 0.0});
    auto r = check_semigroup_estimate(u, cfg.nu, cfg.T, cfg.semigroup_M);
    r.name = "semigroup_two_shells";
    rep.checks.push_back(r);
  });

  guarded("operator_sweep", [&] {
    WorstCase modulus_w("modulus_bound", kModulusTol);
    WorstCase div_w("ns_output_divergence_free", 0.0);
    WorstCase source_w("source_estimate", kSourceTol);
    for (int i = 0; i < cfg.operator_pairs; ++i) {
      const auto u = random_bandlimited_field(L, seed_of(2, 2 * i), cfg.band, 1.0);
      const auto v = random_bandlimited_field(L, seed_of(2, 2 * i + 1), cfg.band, 1.0);
      modulus_w.add(make_result("modulus_bound", modulus_bound_ratio(u, v, form), 1.0, kModulusTol));
      const auto q = form.apply(u, v);
      div_w.add(make_result("ns_output_divergence_free", divergence_residual(q), kDivergenceFreeTol * q.max_modulus(), 0.0));
      const auto tu = random_trajectory(L, seed_of(3, 2 * i), cfg.band, grid, p);
      const auto tv = random_trajectory(L, seed_of(3, 2 * i + 1), cfg.band, grid, p);
      source_w.add(check_source_estimate(tu, tv, form));
    }
    rep.checks.push_back(modulus_w.result({{"C_a", form.multiplier_bound()}}));
    rep.checks.push_back(div_w.result());
    rep.checks.push_back(source_w.result());
  });

  guarded("bilinear_estimate_stability", [&] {
    rep.checks.push_back(check_bilinear_estimate(cfg.pairs, L, cfg.nu, cfg.T, cfg.M, seed_of(4, 0), ns_tensor(), cfg.band).result);
  });

  guarded("heat_lemma", [&] {
    WorstCase sup_w("heat_lemma_sup", kHeatLemmaTol);
    WorstCase energy_w("heat_lemma_energy", kHeatLemmaTol);
    for (int i = 0; i < cfg.heat_pairs; ++i) {
      const auto v0 = random_bandlimited_field(L, seed_of(5, i), cfg.band, 1.0);
      const auto f = random_trajectory(L, seed_of(6, i), cfg.band, grid, p);
      const auto [a, b] = check_heat_lemma(v0, f, cfg.nu);
      sup_w.add(a);
      energy_w.add(b);
    }
    rep.checks.push_back(sup_w.result());
    rep.checks.push_back(energy_w.result());
    const auto v0 = random_bandlimited_field(L, seed_of(5, cfg.heat_pairs), cfg.band, 1.0);
    auto sharp = check_heat_lemma(v0, Trajectory(grid, L), cfg.nu).first;
    sharp.name = "heat_lemma_sup_free";
    rep.checks.push_back(sharp);
    rep.checks.push_back(sharpness_of(sharp, "heat_lemma_sup_free_attained"));
  });

  guarded("solver_runs", [&] {
    const double C0 = estimate_C0(form, p, BilinearSampling{20, seed_of(7, 0), cfg.T, cfg.M, cfg.band});
    WorstCase contraction_w("contraction_rate", 0.0);
    WorstCase fixed_w("fixed_point_residual", 0.0);
    WorstCase unique_w("uniqueness", 0.0);
    WorstCase decay_w("small_data_decay", kDecayTolerance);
    WorstCase monotone_w("small_data_monotone", kDecayTolerance);
    WorstCase blowup_w("small_data_blowup_integral", 0.0);
    WorstCase energy_w("fourier_energy_inequality", kEnergyTolerance);
    for (int i = 0; i < cfg.solve_runs; ++i) {
      // certified data: half the small-data threshold, capped at nu/2
      const double A = std::min(0.5 * small_data_threshold(cfg.nu, C0), 0.5 * cfg.nu);
      const auto u0 = random_bandlimited_field(L, seed_of(8, i), cfg.band, A);
      PicardOptions opt;
      opt.tol = cfg.tol;
      opt.max_iter = cfg.max_iter;
      opt.C0 = C0;
      const auto run = picard_solve(u0, grid, p, form, opt);
      const auto& r = run.report;
      const double bound = 4.0 * r.certificate->alpha * r.certificate->B_norm_bound;
      double measured = 0.0;
      for (std::size_t n = 1; n < r.residual_history.size(); ++n)
        if (r.residual_history[n - 1] > 0.0)
          measured = std::max(measured, r.residual_history[n] / r.residual_history[n - 1]);
      auto cr = make_result("contraction_rate", measured, bound, 0.0,
                            {{"iterations", r.iterations}, {"converged", r.converged}});
      cr.passed = cr.passed && r.converged && r.certificate->satisfied;
      contraction_w.add(cr);
      fixed_w.add(make_result("fixed_point_residual", r.fixed_point_residual, 3.0 * cfg.tol, 0.0));
      unique_w.add(check_uniqueness(u0, cfg.nu, cfg.T, cfg.M, cfg.tol, form, C0, cfg.max_iter));

      const auto big = random_bandlimited_field(L, seed_of(9, i), cfg.band, 0.5 * cfg.nu);
      opt.C0 = 0.0;
      const auto run2 = picard_solve(big, grid, p, form, opt);
      if (!run2.report.converged) {
        InequalityResult bad = make_result("small_data_decay", 1.0, 0.0, 0.0, {{"error", "Picard did not converge"}});
        decay_w.add(bad);
        continue;
      }
      const double A2 = chi_norm(big, -1);
      const auto& c = run2.report.chi_m1;
      double growth = 0.0;
      for (std::size_t k = 1; k < c.size(); ++k) growth = std::max(growth, c[k] / c[k - 1]);
      monotone_w.add(make_result("small_data_monotone", growth, 1.0, kDecayTolerance));
      decay_w.add(make_result("small_data_decay", run2.report.decay.worst_ratio * A2, A2, kDecayTolerance));
      blowup_w.add(make_result("small_data_blowup_integral", run2.report.blowup_integral,
                               A2 * A2 / (cfg.nu - A2) + kBlowupSlack, 0.0));
      energy_w.add(make_result("fourier_energy_inequality",
                               1.0 + fourier_energy_monitor(run2.trajectory, cfg.nu, form).worst_violation, 1.0,
                               kEnergyTolerance));
    }
    rep.checks.push_back(contraction_w.result({{"C0", C0}}));
    rep.checks.push_back(fixed_w.result());
    rep.checks.push_back(unique_w.result());
    rep.checks.push_back(decay_w.result());
    rep.checks.push_back(monotone_w.result());
    rep.checks.push_back(blowup_w.result());
    rep.checks.push_back(energy_w.result());
  });

  guarded("counterexample", [&] {
    const auto far = counterexample_sums(kCounterexampleMaxJ);
    rep.checks.push_back(make_result("counterexample_chi_bounded", far.chi_partial, std::numbers::sqrt2 + 1.0, 1e-12,
                                     {{"J", kCounterexampleMaxJ}, {"angular_constant", 1.0}}));
    const auto rows = counterexample_table(cfg.counterexample_J);
    rep.checks.push_back(make_result("counterexample_sobolev_increment",
                                     std::abs(rows.back().sobolev_increment - 1.0), 1e-6, 0.0,
                                     {{"J", cfg.counterexample_J}, {"angular_constant", 1.0}}));
  });
  return rep;
}

}  // namespace herzflow::verify
