#pragma once

// Command implementations behind the herzflow executable. Each command validates its whole
// configuration before computing and maps outcomes onto the exit-status contract.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

#include "herzflow/error.hpp"
#include "herzflow/initial_data.hpp"
#include "herzflow/io.hpp"
#include "herzflow/lattice.hpp"
#include "herzflow/operators.hpp"
#include "herzflow/solver.hpp"
#include "herzflow/verify.hpp"

namespace herzflow::cli {

using nlohmann::json;
using nlohmann::ordered_json;

inline constexpr const char* kToolName = "herzflow";
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 1, kDivergence = 2, kSplitUnreachable = 3, kVerificationFailure = 4 };

struct RunConfig {
  double h = 1.0;
  int K = 0;
  double nu = 0.0;
  std::optional<double> T;
  std::optional<double> horizon;
  int M = 0;
  InitialDataSpec initial;
  double tol = 1e-10;
  int max_iter = 50;
  std::optional<double> C0;  ///< empty: estimate from samples
  std::uint64_t seed = 1;
  int samples = 20;
  double sampling_band = 0.0;  ///< 0: twice the lattice spacing
  std::string tensor = "ns";
  std::string csv_path;
  std::string json_path;
};

enum class Command { Solve, Split };

namespace detail {

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ParameterError("unknown key '" + it.key() + "' in " + where);
}

inline const json& object_at(const json& j, const char* key) {
  if (!j.contains(key)) throw ParameterError(std::string("missing '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_object()) throw ParameterError(std::string("'") + key + "' must be an object");
  return v;
}

inline std::string resolve(const std::string& path, const std::filesystem::path& base) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (base / p).string();
}

}  // namespace detail

/// Parses and validates a run configuration. Relative input paths resolve against base_dir;
/// output paths are taken as given.
inline RunConfig parse_run_config(const json& j, Command cmd, const std::filesystem::path& base_dir = ".") {
  if (!j.is_object() || j.empty()) throw ParameterError("configuration must be a non-empty JSON object");
  detail::reject_unknown_keys(j, {"lattice", "nu", "time", "initial_data", "solver", "tensor", "outputs", "verify",
                                  "test_hooks", "seed", "metadata"},
                              "configuration");
  RunConfig c;
  try {
    const auto& lat = detail::object_at(j, "lattice");
    detail::reject_unknown_keys(lat, {"h", "K"}, "lattice");
    c.h = lat.at("h").get<double>();
    c.K = lat.at("K").get<int>();
    require(c.h > 0.0 && std::isfinite(c.h), "lattice.h must be positive");
    require(c.K >= 1 && c.K <= FrequencyLattice::kMaxHalfWidth, "lattice.K must lie in [1, 64]");
    c.nu = j.at("nu").get<double>();
    require(c.nu > 0.0 && std::isfinite(c.nu), "nu must be positive");

    if (cmd == Command::Solve) {
      const auto& t = detail::object_at(j, "time");
      detail::reject_unknown_keys(t, {"T", "horizon", "M"}, "time");
      if (t.contains("T") == t.contains("horizon")) throw ParameterError("time needs exactly one of T or horizon");
      if (t.contains("T")) c.T = t.at("T").get<double>();
      if (t.contains("horizon")) c.horizon = t.at("horizon").get<double>();
      const double span = c.T ? *c.T : *c.horizon;
      require(span > 0.0 && std::isfinite(span), "time span must be positive");
      c.M = t.at("M").get<int>();
      require(c.M >= 1, "time.M must be at least 1");
    }

    const auto& init = detail::object_at(j, "initial_data");
    detail::reject_unknown_keys(init, {"preset", "amplitude", "seed", "band", "divergence_free", "modes_file"},
                                "initial_data");
    c.initial.preset = parse_preset(init.at("preset").get<std::string>());
    c.initial.amplitude = init.value("amplitude", 1.0);
    c.initial.seed = init.value("seed", std::uint64_t{0});
    c.initial.band = init.value("band", 2.0 * c.h);
    c.initial.divergence_free = init.value("divergence_free", true);
    require(std::isfinite(c.initial.amplitude), "initial_data.amplitude must be finite");
    if (c.initial.preset == Preset::RandomBandlimited) {
      require(c.initial.amplitude >= 0.0, "random amplitude (target chi^{-1} norm) must be nonnegative");
      require(c.initial.band >= c.h, "initial_data.band must reach the first lattice shell");
    }
    if (c.initial.preset == Preset::ModeList) {
      if (!init.contains("modes_file")) throw ParameterError("mode_list preset needs initial_data.modes_file");
      const auto file = io::load_mode_list(detail::resolve(init.at("modes_file").get<std::string>(), base_dir));
      if (file.h != c.h || file.K != c.K) throw ParameterError("mode list lattice differs from the configured lattice");
      c.initial.modes = file.modes;
    }

    if (j.contains("solver")) {
      const auto& s = detail::object_at(j, "solver");
      detail::reject_unknown_keys(s, {"tol", "max_iter", "C0", "seed", "samples", "band"}, "solver");
      c.tol = s.value("tol", c.tol);
      c.max_iter = s.value("max_iter", c.max_iter);
      c.seed = s.value("seed", c.seed);
      c.samples = s.value("samples", c.samples);
      c.sampling_band = s.value("band", 0.0);
      if (s.contains("C0")) {
        const auto& v = s.at("C0");
        if (v.is_string()) {
          if (v.get<std::string>() != "auto") throw ParameterError("solver.C0 must be \"auto\" or a number");
        } else {
          c.C0 = v.get<double>();
          require(*c.C0 > 0.0 && std::isfinite(*c.C0), "solver.C0 must be positive");
        }
      }
    }
    require(c.tol > 0.0, "solver.tol must be positive");
    require(c.max_iter >= 1, "solver.max_iter must be at least 1");
    require(c.samples >= 10, "solver.samples must be at least 10");
    if (c.sampling_band == 0.0) c.sampling_band = 2.0 * c.h;
    require(c.sampling_band >= c.h, "solver.band must reach the first lattice shell");

    if (j.contains("tensor")) c.tensor = j.at("tensor").get<std::string>();
    if (c.tensor != "ns") c.tensor = detail::resolve(c.tensor, base_dir);
    if (j.contains("outputs")) {
      const auto& o = detail::object_at(j, "outputs");
      detail::reject_unknown_keys(o, {"csv", "json"}, "outputs");
      c.csv_path = o.value("csv", "");
      c.json_path = o.value("json", "");
    }
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

/// Everything a command needs once the configuration is accepted.
struct Setup {
  FrequencyLattice lattice;
  BilinearForm form;
  SpectralField u0;
};

inline Setup prepare(const RunConfig& c) {
  auto L = make_lattice(c.h, c.K);
  const GnsTensor tensor = c.tensor == "ns" ? ns_tensor() : io::load_tensor(c.tensor);
  BilinearForm form(L, tensor);
  auto u0 = generate_initial_data(c.initial, L);
  return {L, std::move(form), std::move(u0)};
}

inline double resolve_C0(const RunConfig& c, const BilinearForm& form) {
  if (c.C0) return *c.C0;
  const double T = c.T ? *c.T : 1.0;
  return estimate_C0(form, HeatParams(c.nu), BilinearSampling{c.samples, c.seed, T, 16, c.sampling_band});
}

inline ordered_json metadata() { return {{"tool", kToolName}, {"version", kVersion}}; }

inline void write_outputs(const RunConfig& c, const std::string* csv, const ordered_json& report) {
  if (csv && !c.csv_path.empty()) io::write_text_file(c.csv_path, *csv);
  if (!c.json_path.empty()) io::write_text_file(c.json_path, report.dump(2) + "\n");
}

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

/// Loads and parses a configuration file; failures surface as ParameterError.
inline json load_config(const std::string& path) { return io::read_json_file(path); }

inline int cmd_solve(const json& config, const std::filesystem::path& base_dir, Streams s) {
  RunConfig c;
  std::optional<Setup> setup;
  try {
    c = parse_run_config(config, Command::Solve, base_dir);
    setup.emplace(prepare(c));
  } catch (const std::invalid_argument& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const HeatParams p(c.nu);
  ordered_json report;
  report["metadata"] = metadata();
  report["mode"] = c.T ? "picard" : "continuation";
  ordered_json errors = ordered_json::array();
  int code = kOk;
  SolveReport solve;
  try {
    const double C0 = resolve_C0(c, setup->form);
    report["C0"] = C0;
    report["C0_source"] = c.C0 ? "config" : "auto";
    report["C_a"] = setup->form.multiplier_bound();
    const double A = chi_norm(setup->u0, -1);
    report["initial_chi_m1"] = A;
    report["small_data_threshold"] = small_data_threshold(c.nu, C0);
    report["blowup_bound"] = A < c.nu ? io::number(A * A / (c.nu - A)) : ordered_json(nullptr);
    PicardOptions opt;
    opt.tol = c.tol;
    opt.max_iter = c.max_iter;
    opt.C0 = C0;
    if (c.T) {
      auto res = picard_solve(setup->u0, TimeGrid(*c.T, c.M), p, setup->form, opt);
      solve = std::move(res.report);
      if (!solve.converged) code = kDivergence;
    } else {
      ContinuationOptions copt;
      copt.picard = opt;
      copt.steps_per_segment = c.M;
      auto res = continue_solution(setup->u0, *c.horizon, p, setup->form, copt);
      ordered_json segs = ordered_json::array();
      bool nondecreasing = true;
      for (std::size_t i = 1; i < res.segments.size(); ++i)
        if (res.segments[i].plan && res.segments[i - 1].plan)
          nondecreasing = nondecreasing && res.segments[i].plan->T_local >= res.segments[i - 1].plan->T_local;
      for (const auto& seg : res.segments) {
        ordered_json js{{"t0", seg.t0}, {"length", seg.trajectory.grid().T}, {"iterations", seg.iterations},
                        {"reprojected", seg.reprojected}};
        js["split"] = seg.plan ? io::to_json(*seg.plan) : ordered_json(nullptr);
        segs.push_back(js);
      }
      report["segments"] = segs;
      report["reached"] = res.reached;
      report["junction_jump"] = res.junction_jump;
      // empirical only: no uniform lower bound on the segment lengths is certified
      report["T_local_nondecreasing"] = nondecreasing;
      solve = std::move(res.report);
      if (res.status == ContinuationStatus::SplitUnreachable) code = kSplitUnreachable;
      else if (res.status != ContinuationStatus::Completed) code = kDivergence;
    }
    if (code != kOk) errors.push_back(solve.message);
  } catch (const std::exception& e) {
    errors.push_back(e.what());
    code = dynamic_cast<const std::invalid_argument*>(&e) ? kConfigError : kDivergence;
  }
  report["status"] = code == kOk ? "converged" : (code == kSplitUnreachable ? "split_unreachable" : "failed");
  report["report"] = io::to_json(solve);
  report["errors"] = errors;
  const std::string csv = io::series_csv(solve);
  try {
    write_outputs(c, solve.times.empty() ? nullptr : &csv, report);
  } catch (const std::exception& e) {
    s.err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  for (const auto& e : errors) s.err << "error: " << e.get<std::string>() << "\n";
  s.out << "status " << report["status"].get<std::string>() << ", iterations " << solve.iterations
        << ", blowup_integral " << solve.blowup_integral << "\n";
  return code;
}

inline int cmd_split(const json& config, const std::filesystem::path& base_dir, Streams s) {
  RunConfig c;
  std::optional<Setup> setup;
  try {
    c = parse_run_config(config, Command::Split, base_dir);
    setup.emplace(prepare(c));
  } catch (const std::invalid_argument& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  ordered_json report;
  report["metadata"] = metadata();
  int code = kOk;
  try {
    const double C0 = resolve_C0(c, setup->form);
    const auto plan = split_initial_data(setup->u0, c.nu, C0);
    report["split"] = io::to_json(plan);
    report["errors"] = ordered_json::array();
    char buf[256];
    std::snprintf(buf, sizeof buf, "rho %.17g\ntail_norm %.17g\nC0 %.17g\nT_local %.17g\n", plan.rho, plan.tail_norm,
                  plan.C0, plan.T_local);
    s.out << buf;
  } catch (const SplitUnreachableError& e) {
    report["split"] = nullptr;
    report["errors"] = ordered_json::array({e.what()});
    s.err << "split unreachable: " << e.what() << "\n";
    code = kSplitUnreachable;
  } catch (const std::invalid_argument& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  try {
    write_outputs(c, nullptr, report);
  } catch (const std::exception& e) {
    s.err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return code;
}

inline int cmd_verify(const json& config, Streams s) {
  verify::SuiteConfig sc;
  std::string json_path;
  try {
    sc = verify::SuiteConfig::from_json(config);
    if (config.contains("outputs")) json_path = config["outputs"].value("json", "");
  } catch (const std::invalid_argument& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto rep = verify::run_full_suite(sc);
  auto j = verify::to_json(rep);
  ordered_json doc;
  doc["metadata"] = metadata();
  doc["checks"] = j["checks"];
  doc["summary"] = j["summary"];
  for (const auto& c : rep.checks) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-14s %-40s ratio %.6g\n",
                  c.passed ? "PASS" : (c.inconclusive ? "INCONCLUSIVE" : "FAIL"), c.name.c_str(), c.ratio);
    s.out << buf;
  }
  s.out << "passed " << rep.passed() << ", failed " << rep.failed() << "\n";
  if (!json_path.empty()) {
    try {
      io::write_text_file(json_path, doc.dump(2) + "\n");
    } catch (const std::exception& e) {
      s.err << "error: " << e.what() << "\n";
      return kConfigError;
    }
  }
  return rep.all_passed() ? kOk : kVerificationFailure;
}

inline int cmd_counterexample(int J, Streams s) {
  std::vector<verify::CounterexampleRow> rows;
  try {
    rows = verify::counterexample_table(J);
  } catch (const std::invalid_argument& e) {
    s.err << "parameter error: " << e.what() << "\n";
    return kConfigError;
  }
  s.out << "j,chi_partial,sobolev_partial,sobolev_increment\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.j, r.chi_partial, r.sobolev_partial,
                  r.sobolev_increment);
    s.out << buf;
  }
  return kOk;
}

/// Loads a configuration file and dispatches; a missing or unreadable file is a config error.
template <class F>
int with_config_file(const std::string& path, Streams s, F&& body) {
  json config;
  try {
    config = load_config(path);
  } catch (const std::invalid_argument& e) {
    s.err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return body(config, std::filesystem::path(path).parent_path());
}

}  // namespace herzflow::cli
