#pragma once

// Fourier-Herz norms chi^i (i = -1, 0, 1), homogeneous Sobolev seminorms, and the space-time
// norms built on them. Every lattice sum carries the weight h^3 and runs in lexicographic order;
// every time integral is the trapezoidal rule.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "herzflow/lattice.hpp"

namespace herzflow {

inline void require_chi_index(int i) {
  if (i < -1 || i > 1) throw ParameterError("chi norm index must be -1, 0 or 1, got " + std::to_string(i));
}

inline double radial_weight(double r, int i) { return i == 0 ? 1.0 : (i == 1 ? r : 1.0 / r); }

/// h^3 * sum_xi |xi|^i |u(xi)|.
inline double chi_norm(const SpectralField& u, int i) {
  require_chi_index(i);
  const auto& L = u.lattice();
  double sum = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!L.is_mode(n)) continue;
    sum += radial_weight(L.norm(n), i) * modulus(u[n]);
  }
  return L.cell_volume() * sum;
}

/// (h^3 * sum_xi |xi|^{2s} |u(xi)|^2)^{1/2}.
inline double sobolev_seminorm(const SpectralField& u, double s) {
  const auto& L = u.lattice();
  double sum = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const double m = modulus(u[n]);
    sum += std::pow(L.norm_sq(n), s) * m * m;
  }
  return std::sqrt(L.cell_volume() * sum);
}

/// Trapezoidal weights on a uniform grid. `scale` exists only as a fault-injection hook for the
/// verification suite; production callers leave it at 1.
struct TrapezoidRule {
  double scale = 1.0;

  std::vector<double> weights(const TimeGrid& g) const {
    std::vector<double> w(g.nodes(), g.dt() * scale);
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
  }
};

inline void require_nonempty(const Trajectory& traj) {
  if (traj.size() == 0) throw ParameterError("empty trajectory");
}

inline std::vector<double> chi_series(const Trajectory& traj, int i) {
  require_chi_index(i);
  std::vector<double> s(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) s[k] = chi_norm(traj[k], i);
  return s;
}

inline double linf_chi_norm(const Trajectory& traj, int i) {
  require_nonempty(traj);
  const auto s = chi_series(traj, i);
  return *std::max_element(s.begin(), s.end());
}

inline double l1_chi_norm(const Trajectory& traj, int i, const TrapezoidRule& rule = {}) {
  require_nonempty(traj);
  const auto s = chi_series(traj, i);
  const auto w = rule.weights(traj.grid());
  double sum = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) sum += w[k] * s[k];
  return sum;
}

inline double l2_chi0_norm(const Trajectory& traj, const TrapezoidRule& rule = {}) {
  require_nonempty(traj);
  const auto s = chi_series(traj, 0);
  const auto w = rule.weights(traj.grid());
  double sum = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) sum += w[k] * s[k] * s[k];
  return std::sqrt(sum);
}

/// Running trapezoidal integral of a nodal series: out[k] = int_0^{t_k}.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double dt) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t k = 1; k < values.size(); ++k) out[k] = out[k - 1] + 0.5 * dt * (values[k - 1] + values[k]);
  return out;
}

}  // namespace herzflow
