#pragma once

// JSON file formats: mode lists, sparse coefficient tensors, and solve/split reports.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "herzflow/error.hpp"
#include "herzflow/initial_data.hpp"
#include "herzflow/operators.hpp"
#include "herzflow/solver.hpp"

namespace herzflow::io {

using nlohmann::json;
using nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("invalid JSON in '" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

/// Numbers that may be non-finite are written as strings, since JSON has no inf or nan.
inline ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline ordered_json numbers(const std::vector<double>& xs) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

// ---------------------------------------------------------------------------------------------
// Mode lists: { "h": number, "K": integer, "modes": [ { "k": [i,j,l], "re": [..3], "im": [..3] } ] }

struct ModeListFile {
  double h = 0.0;
  int K = 0;
  std::vector<ModeEntry> modes;
};

inline ModeListFile parse_mode_list(const json& j) {
  try {
    ModeListFile f;
    f.h = j.at("h").get<double>();
    f.K = j.at("K").get<int>();
    for (const auto& m : j.at("modes")) {
      const auto k = m.at("k").get<std::vector<int>>();
      const auto re = m.at("re").get<std::vector<double>>();
      const auto im = m.at("im").get<std::vector<double>>();
      if (k.size() != 3 || re.size() != 3 || im.size() != 3)
        throw ParameterError("mode list entries need three-component k, re and im");
      ModeEntry e;
      for (int c = 0; c < 3; ++c) {
        e.k[c] = k[c];
        if (!std::isfinite(re[c]) || !std::isfinite(im[c])) throw ParameterError("mode list values must be finite");
        e.value[c] = Complex(re[c], im[c]);
      }
      f.modes.push_back(e);
    }
    return f;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed mode list: ") + e.what());
  }
}

inline ModeListFile load_mode_list(const std::string& path) { return parse_mode_list(read_json_file(path)); }

// ---------------------------------------------------------------------------------------------
// Sparse tensors: { "entries": [ { "j", "m", "p", "n", "k", "l", "value" } ] } with indices 1..3.

inline GnsTensor parse_tensor(const json& j) {
  try {
    GnsTensor a;
    for (const auto& e : j.at("entries")) {
      const int idx[6] = {e.at("j").get<int>(), e.at("m").get<int>(), e.at("p").get<int>(),
                          e.at("n").get<int>(), e.at("k").get<int>(), e.at("l").get<int>()};
      for (int i : idx)
        if (i < 1 || i > 3) throw ParameterError("tensor indices run from 1 to 3");
      a.set(idx[0] - 1, idx[1] - 1, idx[2] - 1, idx[3] - 1, idx[4] - 1, idx[5] - 1, e.at("value").get<double>());
    }
    return a;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("malformed tensor file: ") + e.what());
  }
}

inline GnsTensor load_tensor(const std::string& path) { return parse_tensor(read_json_file(path)); }

inline ordered_json tensor_to_json(const GnsTensor& a) {
  ordered_json out;
  out["entries"] = ordered_json::array();
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 3; ++m)
      for (int p = 0; p < 3; ++p)
        for (int n = 0; n < 3; ++n)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double v = a(j, m, p, n, k, l);
              if (v == 0.0) continue;
              out["entries"].push_back(
                  {{"j", j + 1}, {"m", m + 1}, {"p", p + 1}, {"n", n + 1}, {"k", k + 1}, {"l", l + 1}, {"value", v}});
            }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Reports

inline ordered_json to_json(const ContractionCertificate& c) {
  return {{"alpha", number(c.alpha)},
          {"B_norm_bound", number(c.B_norm_bound)},
          {"threshold", number(c.threshold)},
          {"satisfied", c.satisfied},
          {"margin", number(c.margin)}};
}

inline ordered_json to_json(const SplitPlan& s) {
  return {{"rho", s.rho},   {"tail_norm", s.tail_norm}, {"threshold", s.threshold},
          {"C0", s.C0},     {"chi_m1", s.chi_m1},       {"T_local", s.T_local}};
}

inline ordered_json to_json(const DecayReport& d) {
  return {{"applicable", d.applicable}, {"all_ok", d.all_ok}, {"worst_ratio", number(d.worst_ratio)}};
}

inline ordered_json to_json(const SolveReport& r) {
  ordered_json j;
  j["converged"] = r.converged;
  j["diverged"] = r.diverged;
  j["iterations"] = r.iterations;
  j["residual_history"] = numbers(r.residual_history);
  j["certificate"] = r.certificate ? to_json(*r.certificate) : ordered_json(nullptr);
  j["fixed_point_residual"] = r.converged ? number(r.fixed_point_residual) : ordered_json(nullptr);
  j["blowup_integral"] = number(r.blowup_integral);
  j["decay"] = to_json(r.decay);
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

/// Columns: t, chi_m1, chi_0, chi_1, blowup_integral_cum, decay_lhs, decay_bound, div_residual.
inline std::string series_csv(const SolveReport& r) {
  std::string out = "t,chi_m1,chi_0,chi_1,blowup_integral_cum,decay_lhs,decay_bound,div_residual\n";
  char buf[512];
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    const auto& d = r.decay.records[k];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.times[k], r.chi_m1[k],
                  r.chi_0[k], r.chi_1[k], r.blowup_cumulative[k], d.lhs, d.bound, r.div_residual[k]);
    out += buf;
  }
  return out;
}

}  // namespace herzflow::io
