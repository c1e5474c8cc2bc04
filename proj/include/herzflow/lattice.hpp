#pragma once

// Discrete frequency domain: a truncated cubic lattice h*(i,j,l), |i|,|j|,|l| <= K, with the origin
// removed. Fields are stored over the full (2K+1)^3 cube in lexicographic (i,j,l) order; the
// center slot is the zero mode and is held at zero. Reflecting xi -> -xi maps linear index n to
// size()-1-n, which is what makes Hermitian symmetry cheap to test and enforce.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "herzflow/error.hpp"

namespace herzflow {

using Complex = std::complex<double>;
using Vec3c = std::array<Complex, 3>;
using Vec3 = std::array<double, 3>;
using IVec3 = std::array<int, 3>;

inline double modulus(const Vec3c& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

class FrequencyLattice {
 public:
  static constexpr int kMaxHalfWidth = 64;

  FrequencyLattice(double h, int K) {
    require(std::isfinite(h) && h > 0.0, "lattice spacing h must be positive, got " + std::to_string(h));
    require(K >= 1 && K <= kMaxHalfWidth,
            "lattice half-width K must lie in [1, 64], got " + std::to_string(K));
    auto d = std::make_shared<Data>();
    d->h = h;
    d->K = K;
    d->D = 2 * K + 1;
    d->size = static_cast<std::size_t>(d->D) * d->D * d->D;
    d->center = (d->size - 1) / 2;
    d->coords.resize(d->size);
    d->xi.resize(d->size);
    d->norm.resize(d->size);
    d->norm_sq.resize(d->size);
    std::size_t n = 0;
    for (int i = -K; i <= K; ++i)
      for (int j = -K; j <= K; ++j)
        for (int l = -K; l <= K; ++l, ++n) {
          d->coords[n] = {i, j, l};
          d->xi[n] = {h * i, h * j, h * l};
          d->norm_sq[n] = h * h * (double(i) * i + double(j) * j + double(l) * l);
          d->norm[n] = std::sqrt(d->norm_sq[n]);
        }
    data_ = std::move(d);
  }

  double h() const { return data_->h; }
  int K() const { return data_->K; }
  int width() const { return data_->D; }
  /// Slots in the cube, zero mode included.
  std::size_t size() const { return data_->size; }
  /// Number of modes in the lattice (the zero mode is not one of them).
  std::size_t mode_count() const { return data_->size - 1; }
  std::size_t zero_index() const { return data_->center; }
  bool is_mode(std::size_t n) const { return n != data_->center; }
  std::size_t mirror(std::size_t n) const { return data_->size - 1 - n; }
  /// Quadrature weight attached to every mode.
  double cell_volume() const { return data_->h * data_->h * data_->h; }

  const IVec3& coords(std::size_t n) const { return data_->coords[n]; }
  const Vec3& xi(std::size_t n) const { return data_->xi[n]; }
  double norm(std::size_t n) const { return data_->norm[n]; }
  double norm_sq(std::size_t n) const { return data_->norm_sq[n]; }

  bool contains(const IVec3& k) const {
    const int K = data_->K;
    return std::abs(k[0]) <= K && std::abs(k[1]) <= K && std::abs(k[2]) <= K &&
           !(k[0] == 0 && k[1] == 0 && k[2] == 0);
  }

  std::optional<std::size_t> index_of(const IVec3& k) const {
    if (!contains(k)) return std::nullopt;
    return unchecked_index(k[0], k[1], k[2]);
  }

  std::size_t unchecked_index(int i, int j, int l) const {
    const int K = data_->K, D = data_->D;
    return (static_cast<std::size_t>(i + K) * D + static_cast<std::size_t>(j + K)) * D +
           static_cast<std::size_t>(l + K);
  }

  friend bool operator==(const FrequencyLattice& a, const FrequencyLattice& b) {
    return a.data_ == b.data_ || (a.data_->h == b.data_->h && a.data_->K == b.data_->K);
  }

 private:
  struct Data {
    double h = 1.0;
    int K = 1;
    int D = 3;
    std::size_t size = 27;
    std::size_t center = 13;
    std::vector<IVec3> coords;
    std::vector<Vec3> xi;
    std::vector<double> norm;
    std::vector<double> norm_sq;
  };
  std::shared_ptr<const Data> data_;
};

inline FrequencyLattice make_lattice(double h, int K) { return FrequencyLattice(h, K); }

/// Complex 3-vector amplitudes on a lattice. `real()` marks fields that represent real
/// physical-space data and must satisfy u(-xi) = conj(u(xi)).
class SpectralField {
 public:
  explicit SpectralField(FrequencyLattice lattice, bool real = true)
      : lattice_(std::move(lattice)), amp_(lattice_.size(), Vec3c{}), real_(real) {}

  const FrequencyLattice& lattice() const { return lattice_; }
  bool real() const { return real_; }
  void set_real(bool r) { real_ = r; }

  std::size_t size() const { return amp_.size(); }
  const Vec3c& operator[](std::size_t n) const { return amp_[n]; }
  Vec3c& operator[](std::size_t n) { return amp_[n]; }
  const std::vector<Vec3c>& amplitudes() const { return amp_; }

  /// Sets the mode at lattice coordinates k and, for real fields, its conjugate partner.
  void set_mode(const IVec3& k, const Vec3c& value) {
    const auto n = lattice_.index_of(k);
    if (!n) throw ParameterError("mode outside lattice");
    amp_[*n] = value;
    if (real_) {
      const auto m = lattice_.mirror(*n);
      amp_[m] = {std::conj(value[0]), std::conj(value[1]), std::conj(value[2])};
    }
  }

  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (const auto& a : amp_)
      if (a[0] != 0.0 || a[1] != 0.0 || a[2] != 0.0) ++c;
    return c;
  }

  double max_modulus() const {
    double m = 0.0;
    for (const auto& a : amp_) m = std::max(m, modulus(a));
    return m;
  }

  /// max over xi of |u(-xi) - conj(u(xi))|.
  double hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t n = 0; n < amp_.size(); ++n) {
      const auto& a = amp_[n];
      const auto& b = amp_[lattice_.mirror(n)];
      const Vec3c d{b[0] - std::conj(a[0]), b[1] - std::conj(a[1]), b[2] - std::conj(a[2])};
      worst = std::max(worst, modulus(d));
    }
    return worst;
  }

 private:
  FrequencyLattice lattice_;
  std::vector<Vec3c> amp_;
  bool real_;
};

inline void require_same_lattice(const SpectralField& a, const SpectralField& b) {
  if (!(a.lattice() == b.lattice())) throw MismatchError("fields live on different lattices");
}

/// alpha*x + y, mode by mode.
inline SpectralField field_axpy(Complex alpha, const SpectralField& x, const SpectralField& y) {
  require_same_lattice(x, y);
  const bool real = x.real() && y.real() && alpha.imag() == 0.0;
  SpectralField out(x.lattice(), real);
  for (std::size_t n = 0; n < x.size(); ++n)
    for (int c = 0; c < 3; ++c) out[n][c] = alpha * x[n][c] + y[n][c];
  return out;
}

inline SpectralField scaled(const SpectralField& x, double factor) {
  SpectralField out = x;
  for (std::size_t n = 0; n < out.size(); ++n)
    for (auto& c : out[n]) c *= factor;
  return out;
}

inline SpectralField operator+(const SpectralField& a, const SpectralField& b) { return field_axpy(1.0, a, b); }
inline SpectralField operator-(const SpectralField& a, const SpectralField& b) { return field_axpy(-1.0, b, a); }

/// Uniform time grid t_k = k*T/M, k = 0..M.
struct TimeGrid {
  double T = 1.0;
  int M = 1;

  TimeGrid() = default;
  TimeGrid(double T_, int M_) : T(T_), M(M_) {
    require(std::isfinite(T) && T > 0.0, "time horizon T must be positive");
    require(M >= 1, "number of time steps M must be at least 1");
  }

  double dt() const { return T / M; }
  double time(int k) const { return k == M ? T : k * dt(); }
  std::size_t nodes() const { return static_cast<std::size_t>(M) + 1; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) { return a.T == b.T && a.M == b.M; }
};

/// One SpectralField per node of a uniform time grid.
class Trajectory {
 public:
  Trajectory(TimeGrid grid, std::vector<SpectralField> states) : grid_(grid), states_(std::move(states)) {
    require(states_.size() == grid_.nodes(), "trajectory needs exactly M+1 states");
    for (const auto& s : states_)
      if (!(s.lattice() == states_.front().lattice()))
        throw MismatchError("trajectory states must share one lattice");
  }

  /// Zero trajectory on the given grid.
  Trajectory(TimeGrid grid, const FrequencyLattice& lattice, bool real = true)
      : grid_(grid), states_(grid.nodes(), SpectralField(lattice, real)) {}

  const TimeGrid& grid() const { return grid_; }
  const FrequencyLattice& lattice() const { return states_.front().lattice(); }
  std::size_t size() const { return states_.size(); }
  const SpectralField& operator[](std::size_t k) const { return states_[k]; }
  SpectralField& operator[](std::size_t k) { return states_[k]; }
  const SpectralField& back() const { return states_.back(); }
  const std::vector<SpectralField>& states() const { return states_; }

 private:
  TimeGrid grid_;
  std::vector<SpectralField> states_;
};

inline void require_compatible(const Trajectory& a, const Trajectory& b) {
  if (!(a.grid() == b.grid())) throw MismatchError("trajectories live on different time grids");
  if (!(a.lattice() == b.lattice())) throw MismatchError("trajectories live on different lattices");
}

inline Trajectory trajectory_axpy(double alpha, const Trajectory& x, const Trajectory& y) {
  require_compatible(x, y);
  std::vector<SpectralField> states;
  states.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) states.push_back(field_axpy(alpha, x[k], y[k]));
  return Trajectory(x.grid(), std::move(states));
}

inline Trajectory constant_trajectory(const SpectralField& f, TimeGrid grid) {
  return Trajectory(grid, std::vector<SpectralField>(grid.nodes(), f));
}

}  // namespace herzflow
