#pragma once

// Spectral operators of the generalized Navier-Stokes system
//
//     d_t u - nu * Laplace(u) = Q(u, u),
//     Q^j(u, v) = sum_{k,l,m} q^{j,m}_{k,l} d_m(u^k v^l),
//     q^{j,m}_{k,l} = sum_{n,p} a^{j,m,p,n}_{k,l} R_n R_p       (R = Riesz-type multiplier xi/|xi|)
//
// In Fourier variables Q^j(xi) = i * sum_{k,l} c^j_{kl}(xi) (u^k * v^l)(xi) with the per-mode
// coefficient c^j_{kl}(xi) = sum_{m,p,n} a^{j,m,p,n}_{k,l} xi_n xi_p xi_m / |xi|^2. The
// convolution is a direct sum over lattice pairs with outputs outside the lattice discarded.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "herzflow/lattice.hpp"
#include "herzflow/norms.hpp"
#include "herzflow/parallel.hpp"

namespace herzflow {

// ---------------------------------------------------------------------------------------------
// Leray projection

/// (P u)^j = u^j - xi_j (xi . u) / |xi|^2.
inline SpectralField leray_project(const SpectralField& u) {
  SpectralField out(u.lattice(), u.real());
  const auto& L = u.lattice();
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const auto& x = L.xi(n);
    const Complex dot = x[0] * u[n][0] + x[1] * u[n][1] + x[2] * u[n][2];
    const Complex s = dot / L.norm_sq(n);
    for (int c = 0; c < 3; ++c) out[n][c] = u[n][c] - x[c] * s;
  }
  return out;
}

/// max over xi of |xi . u(xi)|.
inline double divergence_residual(const SpectralField& u) {
  const auto& L = u.lattice();
  double worst = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const auto& x = L.xi(n);
    worst = std::max(worst, std::abs(x[0] * u[n][0] + x[1] * u[n][1] + x[2] * u[n][2]));
  }
  return worst;
}

// ---------------------------------------------------------------------------------------------
// Coefficient tensor

class GnsTensor {
 public:
  static constexpr double kMaxEntry = 1e3;

  GnsTensor() { a_.fill(0.0); }

  /// Indices are zero-based: j, m, p, n, k, l in {0, 1, 2}.
  double operator()(int j, int m, int p, int n, int k, int l) const { return a_[flat(j, m, p, n, k, l)]; }

  void set(int j, int m, int p, int n, int k, int l, double value) {
    for (int idx : {j, m, p, n, k, l})
      require(idx >= 0 && idx < 3, "tensor index out of range");
    require(std::isfinite(value), "tensor entries must be finite");
    require(std::abs(value) <= kMaxEntry, "tensor entry exceeds the bound 1e3 in magnitude");
    a_[flat(j, m, p, n, k, l)] = value;
  }

  const std::array<double, 729>& entries() const { return a_; }

  friend bool operator==(const GnsTensor& x, const GnsTensor& y) { return x.a_ == y.a_; }

 private:
  static std::size_t flat(int j, int m, int p, int n, int k, int l) {
    return ((((std::size_t(j) * 3 + m) * 3 + p) * 3 + n) * 3 + k) * 3 + l;
  }
  std::array<double, 729> a_;
};

/// Tensor for which Q(u, v) = P div(u (x) v), with (div(u (x) v))^j = d_m(u^m v^j):
/// a^{j,m,p,n}_{k,l} = delta_{km} (delta_{pn} delta_{lj} - delta_{nj} delta_{pl}).
/// The first term uses sum_n xi_n xi_n / |xi|^2 = 1; the second is the projector part.
inline GnsTensor ns_tensor() {
  GnsTensor a;
  for (int j = 0; j < 3; ++j)
    for (int m = 0; m < 3; ++m)
      for (int p = 0; p < 3; ++p)
        for (int n = 0; n < 3; ++n)
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
              const double v = (k == m) * ((p == n) * (l == j) - (n == j) * (p == l));
              if (v != 0.0) a.set(j, m, p, n, k, l, v);
            }
  return a;
}

namespace detail {

/// Largest eigenvalue of a symmetric 3x3 matrix (cyclic Jacobi).
inline double max_symmetric_eigenvalue(std::array<std::array<double, 3>, 3> A) {
  for (int sweep = 0; sweep < 50; ++sweep) {
    const double off = A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2];
    if (off < 1e-30 * (A[0][0] * A[0][0] + A[1][1] * A[1][1] + A[2][2] * A[2][2]) || off == 0.0) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (A[p][q] == 0.0) continue;
        const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int r = 0; r < 3; ++r) {
          const double arp = A[r][p], arq = A[r][q];
          A[r][p] = c * arp - s * arq;
          A[r][q] = s * arp + c * arq;
        }
        for (int r = 0; r < 3; ++r) {
          const double apr = A[p][r], aqr = A[q][r];
          A[p][r] = c * apr - s * aqr;
          A[q][r] = s * apr + c * aqr;
        }
      }
  }
  return std::max({A[0][0], A[1][1], A[2][2]});
}

}  // namespace detail

/// Q assembled for one (lattice, tensor) pair. The per-mode coefficients c^j_{kl}(xi) and the
/// modulus constant are computed once at construction and reused for every evaluation.
class BilinearForm {
 public:
  BilinearForm(FrequencyLattice lattice, GnsTensor tensor)
      : lattice_(std::move(lattice)), tensor_(std::move(tensor)), coeff_(lattice_.size()) {
    double bound = 0.0;
    for (std::size_t n = 0; n < lattice_.size(); ++n) {
      auto& c = coeff_[n];
      c.fill(0.0);
      if (!lattice_.is_mode(n)) continue;
      const auto& x = lattice_.xi(n);
      const double inv = 1.0 / lattice_.norm_sq(n);
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
          for (int l = 0; l < 3; ++l) {
            double s = 0.0;
            for (int m = 0; m < 3; ++m)
              for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) s += tensor_(j, m, p, q, k, l) * x[q] * x[p] * x[m];
            c[(j * 3 + k) * 3 + l] = s * inv;
          }
      // operator norm of the 3x9 map T -> c(xi) T / |xi|, from the 3x3 Gram matrix
      std::array<std::array<double, 3>, 3> G{};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int kl = 0; kl < 9; ++kl) G[a][b] += c[a * 9 + kl] * c[b * 9 + kl];
      const double lam = std::max(0.0, detail::max_symmetric_eigenvalue(G));
      bound = std::max(bound, std::sqrt(lam) / lattice_.norm(n));
    }
    multiplier_bound_ = bound;
  }

  const FrequencyLattice& lattice() const { return lattice_; }
  const GnsTensor& tensor() const { return tensor_; }

  /// C_a with |Q(u,v)(xi)| <= C_a |xi| (|u| * |v|)(xi) at every lattice mode.
  double multiplier_bound() const { return multiplier_bound_; }

  /// c^j_{kl}(xi) at linear index n, flattened as (j*3 + k)*3 + l.
  const std::array<double, 27>& coefficients(std::size_t n) const { return coeff_[n]; }

  SpectralField apply(const SpectralField& u, const SpectralField& v) const {
    require_same_lattice(u, v);
    if (!(u.lattice() == lattice_)) throw MismatchError("field lattice differs from the operator lattice");
    const bool real = u.real() && v.real();
    SpectralField out(lattice_, real);

    // Gather over the sparser factor's support.
    const bool swap = v.nonzero_count() < u.nonzero_count();
    const SpectralField& sparse = swap ? v : u;
    const SpectralField& dense = swap ? u : v;
    std::vector<std::size_t> support;
    for (std::size_t n = 0; n < sparse.size(); ++n)
      if (modulus(sparse[n]) != 0.0) support.push_back(n);
    if (support.empty()) return out;

    const int K = lattice_.K();
    const std::size_t center = lattice_.zero_index();
    const double w = lattice_.cell_volume();
    // Hermitian output: compute the upper half (n > center) and mirror.
    const std::size_t first = real ? center + 1 : 0;

    parallel_for(first, lattice_.size(), [&](std::size_t n) {
      if (!lattice_.is_mode(n)) return;
      const auto& xi = lattice_.coords(n);
      std::array<Complex, 9> T{};
      for (std::size_t e : support) {
        const auto& eta = lattice_.coords(e);
        const int a = xi[0] - eta[0], b = xi[1] - eta[1], c = xi[2] - eta[2];
        if (a < -K || a > K || b < -K || b > K || c < -K || c > K) continue;
        const std::size_t z = n + center - e;
        if (z == center) continue;
        const Vec3c& s = sparse[e];
        const Vec3c& d = dense[z];
        if (swap) {
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) T[k * 3 + l] += d[k] * s[l];
        } else {
          for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) T[k * 3 + l] += s[k] * d[l];
        }
      }
      const auto& cf = coeff_[n];
      Vec3c q{};
      for (int j = 0; j < 3; ++j) {
        Complex acc = 0.0;
        for (int kl = 0; kl < 9; ++kl) acc += cf[j * 9 + kl] * T[kl];
        q[j] = Complex(0.0, w) * acc;
      }
      out[n] = q;
      if (real) {
        const std::size_t m = lattice_.mirror(n);
        out[m] = {std::conj(q[0]), std::conj(q[1]), std::conj(q[2])};
      }
    });
    return out;
  }

 private:
  FrequencyLattice lattice_;
  GnsTensor tensor_;
  std::vector<std::array<double, 27>> coeff_;
  double multiplier_bound_ = 0.0;
};

inline SpectralField q_bilinear(const SpectralField& u, const SpectralField& v, const GnsTensor& a) {
  require_same_lattice(u, v);
  return BilinearForm(u.lattice(), a).apply(u, v);
}

/// (|u| * |v|)(xi) = h^3 sum_eta |u(eta)| |v(xi - eta)|, truncated to the lattice.
inline std::vector<double> modulus_convolution(const SpectralField& u, const SpectralField& v) {
  require_same_lattice(u, v);
  const auto& L = u.lattice();
  std::vector<double> mu(u.size()), mv(v.size());
  std::vector<std::size_t> support;
  for (std::size_t n = 0; n < u.size(); ++n) {
    mu[n] = modulus(u[n]);
    mv[n] = modulus(v[n]);
    if (mu[n] != 0.0) support.push_back(n);
  }
  std::vector<double> out(u.size(), 0.0);
  const int K = L.K();
  const std::size_t center = L.zero_index();
  parallel_for(0, L.size(), [&](std::size_t n) {
    if (!L.is_mode(n)) return;
    const auto& xi = L.coords(n);
    double acc = 0.0;
    for (std::size_t e : support) {
      const auto& eta = L.coords(e);
      const int a = xi[0] - eta[0], b = xi[1] - eta[1], c = xi[2] - eta[2];
      if (a < -K || a > K || b < -K || b > K || c < -K || c > K) continue;
      const std::size_t z = n + center - e;
      if (z == center) continue;
      acc += mu[e] * mv[z];
    }
    out[n] = L.cell_volume() * acc;
  });
  return out;
}

// ---------------------------------------------------------------------------------------------
// Heat semigroup and Duhamel integrals

struct HeatParams {
  double nu = 1.0;

  HeatParams() = default;
  explicit HeatParams(double nu_) : nu(nu_) {
    require(std::isfinite(nu) && nu > 0.0, "viscosity nu must be positive");
  }
};

/// Amplitudes below this magnitude are flushed to zero after a heat step.
inline constexpr double kUnderflowFloor = 1e-300;

/// u(xi) * exp(-nu t |xi|^2).
inline SpectralField heat_propagate(const SpectralField& u, double t, const HeatParams& p) {
  require(t >= 0.0, "heat propagation time must be nonnegative");
  SpectralField out(u.lattice(), u.real());
  const auto& L = u.lattice();
  for (std::size_t n = 0; n < u.size(); ++n) {
    if (!L.is_mode(n)) continue;
    const double f = std::exp(-p.nu * t * L.norm_sq(n));
    for (int c = 0; c < 3; ++c) {
      Complex z = f * u[n][c];
      if (std::abs(z.real()) < kUnderflowFloor) z.real(0.0);
      if (std::abs(z.imag()) < kUnderflowFloor) z.imag(0.0);
      out[n][c] = z;
    }
  }
  return out;
}

inline Trajectory free_evolution(const SpectralField& u0, const TimeGrid& grid, const HeatParams& p) {
  std::vector<SpectralField> states;
  states.reserve(grid.nodes());
  for (int k = 0; k <= grid.M; ++k) states.push_back(heat_propagate(u0, grid.time(k), p));
  return Trajectory(grid, std::move(states));
}

/// phi_1(z) = (e^z - 1)/z.
inline double phi1(double z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return std::expm1(z) / z;
}

namespace detail {
// sum_{n>=0} z^n (n + 1)^shift / (n + 2)!, which is phi_2 for shift = 0 and phi_1 - phi_2 for shift = 1
inline double phi_series(double z, int shift) {
  double term = 0.5, sum = 0.0;  // z^0 / 2!
  for (int n = 0; n < 24; ++n) {
    sum += term * (shift ? (n + 1) : 1);
    term *= z / (n + 3);
  }
  return sum;
}
}  // namespace detail

/// phi_2(z) = (e^z - 1 - z)/z^2.
inline double phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  if (std::abs(z) < 1.0) return detail::phi_series(z, 0);
  return (std::expm1(z) - z) / (z * z);
}

/// phi_1(z) - phi_2(z) = ((z - 1) e^z + 1)/z^2, evaluated without cancellation.
inline double phi1_minus_phi2(double z) {
  if (std::abs(z) < 1e-4) return 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
  if (std::abs(z) < 1.0) return detail::phi_series(z, 1);
  return ((z - 1.0) * std::exp(z) + 1.0) / (z * z);
}

/// int_0^t e^{-nu (t-s)|xi|^2} f(s, xi) ds at every node, for f piecewise linear in time. Per step
/// B_{k+1} = e^{z} B_k + dt*(phi1 - phi2)(z) f_k + dt*phi2(z) f_{k+1}, z = -nu dt |xi|^2.
inline Trajectory duhamel_integrate(const Trajectory& f, const HeatParams& p) {
  const auto& grid = f.grid();
  const auto& L = f.lattice();
  const double dt = grid.dt();
  const std::size_t N = L.size();
  std::vector<double> decay(N), w0(N), w1(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double z = -p.nu * dt * L.norm_sq(n);
    decay[n] = std::exp(z);
    w0[n] = dt * phi1_minus_phi2(z);
    w1[n] = dt * phi2(z);
  }
  bool real = true;
  for (const auto& s : f.states()) real = real && s.real();
  std::vector<SpectralField> states(grid.nodes(), SpectralField(L, real));
  for (int k = 0; k < grid.M; ++k) {
    const auto& prev = states[k];
    const auto& fk = f[k];
    const auto& fk1 = f[k + 1];
    auto& next = states[k + 1];
    for (std::size_t n = 0; n < N; ++n) {
      if (!L.is_mode(n)) continue;
      for (int c = 0; c < 3; ++c) next[n][c] = decay[n] * prev[n][c] + w0[n] * fk[n][c] + w1[n] * fk1[n][c];
    }
  }
  return Trajectory(grid, std::move(states));
}

/// Q(u(t_k), v(t_k)) at every node.
inline Trajectory q_trajectory(const Trajectory& u, const Trajectory& v, const BilinearForm& form) {
  require_compatible(u, v);
  std::vector<SpectralField> states;
  states.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) states.push_back(form.apply(u[k], v[k]));
  return Trajectory(u.grid(), std::move(states));
}

/// B(u, v): solution of d_t B - nu Laplace(B) = Q(u, v), B(0) = 0.
inline Trajectory duhamel_B(const Trajectory& u, const Trajectory& v, const BilinearForm& form, const HeatParams& p) {
  return duhamel_integrate(q_trajectory(u, v, form), p);
}

inline Trajectory duhamel_B(const Trajectory& u, const Trajectory& v, const GnsTensor& a, const HeatParams& p) {
  return duhamel_B(u, v, BilinearForm(u.lattice(), a), p);
}

/// Solution of d_t v - nu Laplace(v) = f with v(0) = v0.
inline Trajectory heat_solve_forced(const SpectralField& v0, const Trajectory& f, const HeatParams& p) {
  if (!(v0.lattice() == f.lattice())) throw MismatchError("initial state and forcing live on different lattices");
  return trajectory_axpy(1.0, free_evolution(v0, f.grid(), p), duhamel_integrate(f, p));
}

}  // namespace herzflow
