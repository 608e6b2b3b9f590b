#include "fdecon/estimator.hpp"

#include <algorithm>
#include <tuple>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "fdecon/error.hpp"

namespace fdecon {
namespace {

int log2_floor(std::size_t n) {
  int l = 0;
  while ((std::size_t{2} << l) <= n) ++l;
  return l;
}

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

// Full-array flat index of every retained spatial coefficient, in the
// row-major order of the truncated extents.
std::vector<std::size_t> retained_positions(const std::vector<WaveletLayout>& space,
                                            const std::vector<std::size_t>& full_dims) {
  std::vector<std::size_t> extents;
  for (const auto& lay : space) extents.push_back(lay.size());
  std::vector<std::size_t> out(product(extents));
  std::vector<std::size_t> idx(extents.size(), 0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < extents.size(); ++a) flat = flat * full_dims[a] + idx[a];
    out[s] = flat;
    for (std::size_t a = extents.size(); a-- > 0;) {
      if (++idx[a] < extents[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace

const char* to_string(Mode mode) noexcept { return mode == Mode::Functional ? "functional" : "separate"; }

const char* to_string(ScalingExemption e) noexcept { return e == ScalingExemption::Joint ? "joint" : "time"; }

int time_capacity(std::size_t n) noexcept {
  int j = 1;
  while (static_cast<std::size_t>(MeyerBasis::band_top(j + 1)) < n / 2) ++j;
  return j;
}

ResolutionLimits resolution_limits(double epsilon, double nu, std::size_t n,
                                   const std::vector<std::size_t>& spatial_dims, int m0, int m0_prime) {
  ResolutionLimits out;
  const int cap = time_capacity(n);
  if (cap < m0)
    throw Error(ErrorCode::LevelTooFine, "estimator",
                "N=" + std::to_string(n) + " cannot hold the coarsest Meyer level m0=" + std::to_string(m0));
  std::vector<int> caps;
  for (auto m : spatial_dims) caps.push_back(log2_floor(m));

  if (epsilon >= 1.0) {
    out.degenerate = true;
    out.raw_finest = 0;
    out.raw_finest_prime = 0;
    out.finest = m0;
    for (int c : caps) out.finest_prime.push_back(std::min(m0_prime, c));
    return out;
  }
  // The 1e-9 guard keeps exact dyadic powers (eps^2 = 2^-9) from flooring down.
  if (epsilon <= 0.0) {
    out.raw_finest = cap;
    out.raw_finest_prime = caps.empty() ? 0 : *std::max_element(caps.begin(), caps.end());
  } else {
    const double log2_inv_eps2 = -2.0 * std::log2(epsilon);
    out.raw_finest = static_cast<int>(std::floor(log2_inv_eps2 / (2.0 * nu + 1.0) + 1e-9));
    out.raw_finest_prime = static_cast<int>(std::floor(log2_inv_eps2 + 1e-9));
  }
  out.finest = std::clamp(out.raw_finest, m0, cap);
  for (int c : caps) out.finest_prime.push_back(std::clamp(out.raw_finest_prime, std::min(m0_prime, c), c));
  return out;
}

double threshold_value(int j, double c_beta, double nu, double epsilon) {
  if (!(epsilon > 0.0) || epsilon >= 1.0) return 0.0;
  return c_beta * std::sqrt(std::log(1.0 / epsilon)) * std::pow(2.0, j * nu) * epsilon;
}

double ResolvedConfig::threshold(int j) const { return c_beta * std::pow(2.0, j * nu) * noise_scale; }

ResolvedConfig resolve_config(const EstimatorConfig& cfg, const KernelSpectrum& ks, std::size_t n,
                              const std::vector<std::size_t>& spatial_dims, double sigma) {
  if (ks.g.n() != n || ks.g.profiles() != product(spatial_dims))
    throw Error(ErrorCode::Index, "estimator", "kernel spectrum shape does not match the data grid");
  if (cfg.c_beta && !(*cfg.c_beta >= 0.0)) throw Error(ErrorCode::Config, "estimator", "c_beta must be >= 0");
  if (cfg.nu && !(*cfg.nu >= 0.0)) throw Error(ErrorCode::Config, "estimator", "nu must be >= 0");

  ResolvedConfig rc;
  rc.mode = cfg.mode;
  rc.exemption = cfg.exemption;
  rc.sigma = sigma;
  rc.n = n;
  rc.spatial_dims = spatial_dims;
  rc.m0 = cfg.m0;
  rc.m0_prime = cfg.m0_prime;

  if (cfg.nu) {
    rc.nu = *cfg.nu;
  } else {
    KernelSpectrum probe = ks;
    rc.nu = estimate_nu(probe, cfg.nu_range.value_or(default_nu_range(n)));
  }

  const double big_n = static_cast<double>(n);
  const double profiles = static_cast<double>(product(spatial_dims));
  if (rc.mode == Mode::Functional) {
    rc.epsilon = sigma / std::sqrt(profiles * big_n);
    rc.noise_scale = rc.epsilon > 0.0 && rc.epsilon < 1.0 ? rc.epsilon * std::sqrt(std::log(1.0 / rc.epsilon)) : 0.0;
  } else {
    rc.epsilon = sigma / std::sqrt(big_n);
    rc.noise_scale = sigma * std::sqrt(std::log(big_n) / big_n);
  }

  rc.limits = resolution_limits(rc.epsilon, rc.nu, n, spatial_dims, cfg.m0, cfg.m0_prime);
  if (cfg.finest) {
    if (*cfg.finest < cfg.m0)
      throw Error(ErrorCode::LevelTooCoarse, "estimator", "J=" + std::to_string(*cfg.finest) + " < m0");
    if (*cfg.finest > time_capacity(n))
      throw Error(ErrorCode::LevelTooFine, "estimator",
                  "J=" + std::to_string(*cfg.finest) + " exceeds the capacity of N=" + std::to_string(n));
    rc.limits.finest = *cfg.finest;
  }
  if (cfg.finest_prime) {
    for (std::size_t a = 0; a < spatial_dims.size(); ++a) {
      const int cap = log2_floor(spatial_dims[a]);
      if (*cfg.finest_prime > cap)
        throw Error(ErrorCode::LevelTooFine, "estimator",
                    "J'=" + std::to_string(*cfg.finest_prime) + " exceeds log2 M=" + std::to_string(cap));
      if (*cfg.finest_prime < std::min(cfg.m0_prime, cap))
        throw Error(ErrorCode::LevelTooCoarse, "estimator", "J' below m0'");
      rc.limits.finest_prime[a] = *cfg.finest_prime;
    }
  }

  const int band = MeyerBasis::band_top(rc.limits.finest);
  require_nonvanishing(ks, band);
  std::tie(rc.c1, rc.c2) = regularity_bounds(ks, rc.nu, band);
  const double window = std::pow(2.0 * std::numbers::pi / 3.0, rc.nu);
  rc.c_beta_theory = rc.c1 > 0.0 ? std::sqrt(80.0 / rc.c1) * window : 0.0;
  if (cfg.c_beta)
    rc.c_beta = *cfg.c_beta;
  else
    rc.c_beta = rc.c1 > 0.0 ? 4.0 * window / std::sqrt(rc.c1) : 0.0;
  return rc;
}

HyperCoeffs::HyperCoeffs(Mode mode, WaveletLayout time, std::vector<WaveletLayout> space, std::size_t profiles)
    : mode_(mode), time_(time), space_(std::move(space)) {
  if (mode_ == Mode::Functional) {
    spatial_size_ = 1;
    for (const auto& lay : space_) spatial_size_ *= lay.size();
  } else {
    space_.clear();
    spatial_size_ = profiles;
  }
  values_.assign(spatial_size_ * time_.size(), cplx{});
  kept_.assign(values_.size(), 1);
}

HyperCoeffs::Index HyperCoeffs::index_of(std::size_t spatial, std::size_t tpos) const {
  Index idx;
  idx.j = time_.level_of(tpos);
  idx.k = time_.shift_of(tpos);
  if (mode_ == Mode::Separate) {
    idx.k_prime.push_back(spatial);
    return idx;
  }
  idx.j_prime.resize(space_.size());
  idx.k_prime.resize(space_.size());
  for (std::size_t a = space_.size(); a-- > 0;) {
    const std::size_t ext = space_[a].size();
    const std::size_t p = spatial % ext;
    spatial /= ext;
    idx.j_prime[a] = space_[a].level_of(p);
    idx.k_prime[a] = space_[a].shift_of(p);
  }
  return idx;
}

std::pair<std::size_t, std::size_t> HyperCoeffs::locate(const Index& idx) const {
  auto check_level = [](const WaveletLayout& lay, int j, std::size_t k, const char* axis) {
    if (j < lay.scaling_label() || j >= lay.finest || k >= lay.count(j))
      throw Error(ErrorCode::Index, "estimator",
                  std::string("index (") + std::to_string(j) + ", " + std::to_string(k) + ") outside the " + axis +
                      " range");
  };
  check_level(time_, idx.j, idx.k, "t");
  const std::size_t tpos = time_.position(idx.j, idx.k);
  if (mode_ == Mode::Separate) {
    if (idx.k_prime.size() != 1 || idx.k_prime[0] >= spatial_size_)
      throw Error(ErrorCode::Index, "estimator", "profile index out of range");
    return {idx.k_prime[0], tpos};
  }
  if (idx.j_prime.size() != space_.size() || idx.k_prime.size() != space_.size())
    throw Error(ErrorCode::Index, "estimator", "spatial multi-index has the wrong rank");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < space_.size(); ++a) {
    check_level(space_[a], idx.j_prime[a], idx.k_prime[a], "spatial");
    flat = flat * space_[a].size() + space_[a].position(idx.j_prime[a], idx.k_prime[a]);
  }
  return {flat, tpos};
}

bool HyperCoeffs::is_exempt(std::size_t spatial, std::size_t tpos, ScalingExemption rule) const {
  if (!time_.is_scaling(tpos)) return false;
  if (rule == ScalingExemption::Time || mode_ == Mode::Separate) return true;
  for (std::size_t a = space_.size(); a-- > 0;) {
    const std::size_t ext = space_[a].size();
    if (!space_[a].is_scaling(spatial % ext)) return false;
    spatial /= ext;
  }
  return true;
}

HyperCoeffs estimate_coeffs(const ProfileSpectrum& spec, const KernelSpectrum& ks, const ResolvedConfig& cfg) {
  const std::size_t n = cfg.n;
  const std::size_t profiles = product(cfg.spatial_dims);
  if (spec.n() != n || spec.profiles() != profiles || ks.g.n() != n || ks.g.profiles() != profiles)
    throw Error(ErrorCode::Index, "estimator", "data and kernel spectra are not aligned with the configuration");

  const MeyerBasis meyer(cfg.m0);
  const int finest = cfg.finest();
  const int band = MeyerBasis::band_top(finest);
  if (static_cast<std::size_t>(band) >= n / 2)
    throw Error(ErrorCode::LevelTooFine, "estimator", "level J-1=" + std::to_string(finest - 1) + " exceeds Nyquist");
  require_nonvanishing(ks, band);

  const std::size_t tsize = std::size_t{1} << finest;
  std::vector<cplx> per_profile(profiles * tsize);
  std::vector<cplx> ratio(n);
  for (std::size_t l = 0; l < profiles; ++l) {
    std::fill(ratio.begin(), ratio.end(), cplx{});
    for (int m = -band; m <= band; ++m) ratio[static_cast<std::size_t>(m < 0 ? m + static_cast<int>(n) : m)] =
        spec.at(l, m) / ks.g.at(l, m);
    auto b = meyer.analyze(ratio, finest);
    std::copy(b.begin(), b.end(), per_profile.begin() + static_cast<std::ptrdiff_t>(l * tsize));
  }

  if (cfg.mode == Mode::Separate) {
    HyperCoeffs out(Mode::Separate, meyer.layout(finest), {}, profiles);
    std::copy(per_profile.begin(), per_profile.end(), out.values().begin());
    return out;
  }

  const SpatialBasis spatial(cfg.m0_prime);
  std::vector<WaveletLayout> space;
  for (std::size_t a = 0; a < cfg.spatial_dims.size(); ++a) {
    WaveletLayout lay = spatial.layout(cfg.spatial_dims[a]);
    lay.finest = cfg.limits.finest_prime[a];
    lay.coarsest = std::min(lay.coarsest, lay.finest);
    space.push_back(lay);
  }
  HyperCoeffs out(Mode::Functional, meyer.layout(finest), space, profiles);
  const auto keep = retained_positions(space, cfg.spatial_dims);
  // eta_{j',k'}(u_l) = sqrt(M) w[l] for the orthonormal DWT vector w, so the
  // (1/M) sum over profiles becomes DWT / sqrt(M).
  const double norm = 1.0 / std::sqrt(static_cast<double>(profiles));
  std::vector<cplx> column(profiles);
  for (std::size_t t = 0; t < tsize; ++t) {
    for (std::size_t l = 0; l < profiles; ++l) column[l] = per_profile[l * tsize + t];
    spatial.tensor_forward<cplx>(column, cfg.spatial_dims);
    for (std::size_t s = 0; s < keep.size(); ++s) out.at(s, t) = column[keep[s]] * norm;
  }
  return out;
}

HyperCoeffs hard_threshold(HyperCoeffs coeffs, const ResolvedConfig& cfg) {
  const auto& tl = coeffs.time_layout();
  for (std::size_t s = 0; s < coeffs.spatial_size(); ++s)
    for (std::size_t t = 0; t < coeffs.time_size(); ++t) {
      if (coeffs.is_exempt(s, t, cfg.exemption)) {
        coeffs.set_kept(s, t, true);
        continue;
      }
      const bool keep = std::abs(coeffs.at(s, t)) > cfg.threshold(tl.level_of(t));
      coeffs.set_kept(s, t, keep);
      if (!keep) coeffs.at(s, t) = cplx{};
    }
  return coeffs;
}

Reconstruction reconstruct(const HyperCoeffs& coeffs, const ResolvedConfig& cfg) {
  const std::size_t n = cfg.n;
  const std::size_t profiles = product(cfg.spatial_dims);
  const std::size_t tsize = coeffs.time_size();
  const MeyerBasis meyer(cfg.m0);

  std::vector<cplx> per_profile(profiles * tsize);
  if (coeffs.mode() == Mode::Separate) {
    if (coeffs.spatial_size() != profiles) throw Error(ErrorCode::Index, "estimator", "profile count mismatch");
    std::copy(coeffs.values().begin(), coeffs.values().end(), per_profile.begin());
  } else {
    const SpatialBasis spatial(cfg.m0_prime);
    const auto keep = retained_positions(coeffs.space_layouts(), cfg.spatial_dims);
    const double norm = std::sqrt(static_cast<double>(profiles));
    std::vector<cplx> column(profiles);
    for (std::size_t t = 0; t < tsize; ++t) {
      std::fill(column.begin(), column.end(), cplx{});
      for (std::size_t s = 0; s < keep.size(); ++s) column[keep[s]] = coeffs.at(s, t) * norm;
      spatial.tensor_inverse<cplx>(column, cfg.spatial_dims);
      for (std::size_t l = 0; l < profiles; ++l) per_profile[l * tsize + t] = column[l];
    }
  }

  ProfileSpectrum spectrum(profiles, n);
  for (std::size_t l = 0; l < profiles; ++l) {
    auto row = meyer.synthesize(std::span<const cplx>(per_profile.data() + l * tsize, tsize), n);
    std::copy(row.begin(), row.end(), spectrum.row(l).begin());
  }
  double max_imag = 0.0;
  auto values = inverse_fourier(spectrum, &max_imag);
  double scale = 1.0;
  for (double v : values) scale = std::max(scale, std::abs(v));
  if (max_imag > 1e-6 * scale)
    throw Error(ErrorCode::Numerical, "estimator",
                "reconstruction has imaginary residue " + std::to_string(max_imag) +
                    "; conjugate symmetry was lost upstream");
  return {ObservationGrid(cfg.spatial_dims, n, cfg.sigma, std::move(values)), coeffs, cfg};
}

Reconstruction deconvolve(const ObservationGrid& grid, const KernelSpectrum& ks, const EstimatorConfig& cfg) {
  const ResolvedConfig rc = resolve_config(cfg, ks, grid.n(), grid.spatial_dims(), grid.sigma());
  const auto spec = fourier_coeffs(grid);
  auto coeffs = hard_threshold(estimate_coeffs(spec, ks, rc), rc);
  return reconstruct(coeffs, rc);
}

std::vector<double> sampled_spatial_atom(const SpatialBasis& basis, std::size_t m, int j_prime, std::size_t k_prime) {
  const WaveletLayout lay = basis.layout(m);
  if (j_prime < lay.scaling_label() || j_prime >= lay.finest || k_prime >= lay.count(j_prime))
    throw Error(ErrorCode::Index, "spatial_dwt", "atom index out of range");
  std::vector<double> v(m, 0.0);
  v[lay.position(j_prime, k_prime)] = 1.0;
  basis.inverse<double>(v);
  const double s = std::sqrt(static_cast<double>(m));
  for (auto& x : v) x *= s;
  return v;
}

std::vector<double> sampled_time_atom(const MeyerBasis& basis, std::size_t n, int j, std::size_t k) {
  const int finest = std::max(j + 1, basis.coarsest_level());
  const WaveletLayout lay = basis.layout(finest);
  if (j < lay.scaling_label() || k >= lay.count(j)) throw Error(ErrorCode::Index, "meyer", "atom index out of range");
  std::vector<cplx> c(lay.size());
  c[lay.position(j, k)] = 1.0;
  ProfileSpectrum spec(1, n, basis.synthesize(c, n));
  return inverse_fourier(spec);
}

void write_coeffs_csv(const HyperCoeffs& coeffs, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "estimator", "cannot open " + path);
  os << "j,k,jprime,kprime,re,im,kept\n" << std::setprecision(17);
  auto join = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ":" : "") + std::to_string(v[i]);
    return s;
  };
  for (std::size_t s = 0; s < coeffs.spatial_size(); ++s)
    for (std::size_t t = 0; t < coeffs.time_size(); ++t) {
      const auto idx = coeffs.index_of(s, t);
      const cplx v = coeffs.at(s, t);
      os << idx.j << ',' << idx.k << ',' << (idx.j_prime.empty() ? std::string("-1") : join(idx.j_prime)) << ','
         << join(idx.k_prime) << ',' << v.real() << ',' << v.imag() << ',' << (coeffs.kept(s, t) ? 1 : 0) << '\n';
    }
  if (!os) throw Error(ErrorCode::Io, "estimator", "write failed: " + path);
}

}  // namespace fdecon
