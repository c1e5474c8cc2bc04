#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "herzflow/lattice.hpp"
#include "herzflow/norms.hpp"
#include "herzflow/operators.hpp"

namespace herzflow {

/// Standard normal draws from mt19937_64 via Box-Muller. Both pieces are fully specified, so a seed
/// produces the same sequence with every standard library.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53 random bits in (0, 1]
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Preset { Shear, TaylorGreen, RandomBandlimited, ModeList };

inline Preset parse_preset(const std::string& s) {
  if (s == "shear") return Preset::Shear;
  if (s == "taylor_green") return Preset::TaylorGreen;
  if (s == "random_bandlimited") return Preset::RandomBandlimited;
  if (s == "mode_list") return Preset::ModeList;
  throw ParameterError("unknown initial data preset '" + s + "'");
}

struct ModeEntry {
  IVec3 k{};
  Vec3c value{};
};

struct InitialDataSpec {
  Preset preset = Preset::Shear;
  /// Shear and Taylor-Green: velocity amplitude. Random: target chi^{-1} norm. Mode list: scale factor.
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  /// Random support radius |xi| <= band.
  double band = 2.0;
  bool divergence_free = true;
  std::vector<ModeEntry> modes;
};

/// Hermitian Gaussian field supported in |xi| <= band, optionally Leray-projected, scaled to the
/// requested chi^{-1} norm. Draws visit only index offsets |i|,|j|,|l| <= floor(band/h) in
/// lexicographic order, so the same seed yields the same field on every lattice covering the band.
inline SpectralField random_bandlimited_field(const FrequencyLattice& L, std::uint64_t seed, double band,
                                              double target_chi_m1, bool divergence_free = true) {
  require(band > 0.0, "random band radius must be positive");
  require(target_chi_m1 >= 0.0, "target chi^{-1} norm must be nonnegative");
  SpectralField u(L, true);
  NormalStream rng(seed);
  const int R = std::min(L.K(), static_cast<int>(std::floor(band / L.h() + 1e-12)));
  for (int i = -R; i <= R; ++i)
    for (int j = -R; j <= R; ++j)
      for (int l = -R; l <= R; ++l) {
        const std::size_t n = L.unchecked_index(i, j, l);
        if (!L.is_mode(n) || n < L.zero_index()) continue;  // lower half is filled by conjugation
        if (L.norm(n) > band * (1.0 + 1e-12)) continue;
        Vec3c z;
        for (auto& c : z) {
          const double re = rng();
          const double im = rng();
          c = Complex(re, im);
        }
        u.set_mode(L.coords(n), z);
      }
  if (divergence_free) u = leray_project(u);
  const double norm = chi_norm(u, -1);
  if (norm == 0.0) return u;
  return scaled(u, target_chi_m1 / norm);
}

inline SpectralField generate_initial_data(const InitialDataSpec& spec, const FrequencyLattice& L) {
  require(std::isfinite(spec.amplitude), "initial data amplitude must be finite");
  SpectralField u(L, true);
  const double A = spec.amplitude;
  const Complex I(0.0, 1.0);
  switch (spec.preset) {
    case Preset::Shear:
      // A sin(h y) e_1
      u.set_mode({0, 1, 0}, {-0.5 * I * A, 0.0, 0.0});
      break;
    case Preset::TaylorGreen:
      // A (sin(hx) cos(hy), -cos(hx) sin(hy), 0)
      for (int sx : {-1, 1})
        for (int sy : {-1, 1}) {
          const auto n = *L.index_of({sx, sy, 0});
          u[n] = {-0.25 * I * A * double(sx), 0.25 * I * A * double(sy), 0.0};
        }
      break;
    case Preset::RandomBandlimited:
      return random_bandlimited_field(L, spec.seed, spec.band, A, spec.divergence_free);
    case Preset::ModeList: {
      std::vector<bool> given(L.size(), false);
      for (const auto& m : spec.modes) {
        if (m.k[0] == 0 && m.k[1] == 0 && m.k[2] == 0) throw ParameterError("mode list contains the zero mode");
        const auto n = L.index_of(m.k);
        if (!n) throw ParameterError("mode list entry outside the lattice");
        u[*n] = {A * m.value[0], A * m.value[1], A * m.value[2]};
        given[*n] = true;
      }
      // Hermitian completion: a missing partner takes the conjugate, a given one must agree.
      for (std::size_t n = 0; n < L.size(); ++n) {
        if (!given[n]) continue;
        const std::size_t m = L.mirror(n);
        const Vec3c conj{std::conj(u[n][0]), std::conj(u[n][1]), std::conj(u[n][2])};
        if (!given[m]) {
          u[m] = conj;
        } else {
          const Vec3c d{u[m][0] - conj[0], u[m][1] - conj[1], u[m][2] - conj[2]};
          if (modulus(d) > 1e-12 * std::max(1.0, modulus(u[n])))
            throw ParameterError("mode list entries at k and -k are not complex conjugates");
        }
      }
      if (spec.divergence_free) u = leray_project(u);
      break;
    }
  }
  return u;
}

}  // namespace herzflow
