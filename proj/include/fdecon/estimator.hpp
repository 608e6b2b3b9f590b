#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fdecon/layout.hpp"
#include "fdecon/meyer.hpp"
#include "fdecon/spatial_dwt.hpp"
#include "fdecon/spectra.hpp"

namespace fdecon {

enum class Mode { Functional, Separate };

/// Which coefficient blocks skip thresholding.
enum class ScalingExemption {
  Joint,  ///< only entries that are scaling in t and in every spatial axis
  Time,   ///< every entry whose t-index is in the scaling block
};

const char* to_string(Mode mode) noexcept;
const char* to_string(ScalingExemption e) noexcept;

/// User-facing estimator settings. Unset optionals are resolved from the data:
/// nu by log-log regression on the kernel spectrum, c_beta by
/// 4 (2 pi / 3)^nu / sqrt(c1), J and J' from the noise level.
struct EstimatorConfig {
  Mode mode = Mode::Functional;
  std::optional<double> c_beta;
  std::optional<double> nu;
  std::optional<FrequencyRange> nu_range;
  int m0 = 3;
  int m0_prime = 3;
  std::optional<int> finest;        ///< J
  std::optional<int> finest_prime;  ///< J', applied to every spatial axis
  ScalingExemption exemption = ScalingExemption::Joint;
};

struct ResolutionLimits {
  int raw_finest = 0;        ///< floor(log2(eps^(-2/(2 nu + 1))))
  int raw_finest_prime = 0;  ///< floor(log2(eps^-2))
  int finest = 0;
  std::vector<int> finest_prime;  ///< one per spatial axis
  bool degenerate = false;        ///< eps >= 1: coarsest levels only
};

/// Grid capacity: largest J whose finest band stays strictly below N/2.
int time_capacity(std::size_t n) noexcept;

/// Cutoffs for noise level eps in (0, 1). eps <= 0 means noiseless and gives
/// the grid capacity; eps >= 1 returns the coarsest levels with `degenerate`.
ResolutionLimits resolution_limits(double epsilon, double nu, std::size_t n,
                                   const std::vector<std::size_t>& spatial_dims, int m0 = 3, int m0_prime = 3);

/// lambda = c_beta sqrt(ln(1/eps)) 2^(j nu) eps.
double threshold_value(int j, double c_beta, double nu, double epsilon);

/// Everything the pipeline needs once data-dependent defaults are filled in.
struct ResolvedConfig {
  Mode mode = Mode::Functional;
  ScalingExemption exemption = ScalingExemption::Joint;
  double c_beta = 0.0;
  double c_beta_theory = 0.0;  ///< sqrt(80 (2 pi/3)^(2 nu) / c1), diagnostic only
  double nu = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;      ///< sigma/sqrt(MN) (Functional) or sigma/sqrt(N) (Separate)
  double noise_scale = 0.0;  ///< lambda_j = c_beta 2^(j nu) noise_scale
  int m0 = 3;
  int m0_prime = 3;
  ResolutionLimits limits;
  std::size_t n = 0;
  std::vector<std::size_t> spatial_dims;

  int finest() const noexcept { return limits.finest; }
  double threshold(int j) const;
};

ResolvedConfig resolve_config(const EstimatorConfig& cfg, const KernelSpectrum& ks, std::size_t n,
                              const std::vector<std::size_t>& spatial_dims, double sigma);

/// Hyperbolic coefficients beta_{j,k,j',k'} stored densely: spatial position
/// (row-major over the truncated spatial layouts) times t position
/// (WaveletLayout order). In Separate mode the spatial index is the raw profile
/// index and carries no wavelet level.
class HyperCoeffs {
 public:
  struct Index {
    int j = 0;
    std::size_t k = 0;
    std::vector<int> j_prime;          ///< empty in Separate mode
    std::vector<std::size_t> k_prime;  ///< profile index in Separate mode
  };

  HyperCoeffs() = default;
  HyperCoeffs(Mode mode, WaveletLayout time, std::vector<WaveletLayout> space, std::size_t profiles);

  Mode mode() const noexcept { return mode_; }
  const WaveletLayout& time_layout() const noexcept { return time_; }
  const std::vector<WaveletLayout>& space_layouts() const noexcept { return space_; }
  std::size_t time_size() const noexcept { return time_.size(); }
  std::size_t spatial_size() const noexcept { return spatial_size_; }
  std::size_t size() const noexcept { return values_.size(); }

  cplx& at(std::size_t spatial, std::size_t tpos) { return values_[spatial * time_size() + tpos]; }
  cplx at(std::size_t spatial, std::size_t tpos) const { return values_[spatial * time_size() + tpos]; }
  bool kept(std::size_t spatial, std::size_t tpos) const { return kept_[spatial * time_size() + tpos] != 0; }
  void set_kept(std::size_t spatial, std::size_t tpos, bool k) { kept_[spatial * time_size() + tpos] = k; }

  std::span<const cplx> values() const noexcept { return values_; }
  std::span<cplx> values() noexcept { return values_; }

  Index index_of(std::size_t spatial, std::size_t tpos) const;
  /// Position lookup for a (j, k, j', k') tuple; throws IndexError when outside
  /// the declared ranges.
  std::pair<std::size_t, std::size_t> locate(const Index& idx) const;
  bool is_exempt(std::size_t spatial, std::size_t tpos, ScalingExemption rule) const;

 private:
  Mode mode_ = Mode::Functional;
  WaveletLayout time_;
  std::vector<WaveletLayout> space_;
  std::size_t spatial_size_ = 0;
  std::vector<cplx> values_;
  std::vector<unsigned char> kept_;
};

struct Reconstruction {
  ObservationGrid estimate;  ///< f-hat(u_l, t_i); sigma echoes the input
  HyperCoeffs coeffs;
  ResolvedConfig config;
};

/// beta-tilde: spectra divided pointwise by the kernel, Meyer analysis along t
/// per profile, then the tensor spatial DWT (Functional mode only).
HyperCoeffs estimate_coeffs(const ProfileSpectrum& spec, const KernelSpectrum& ks, const ResolvedConfig& cfg);

/// Keep an entry iff |beta| > lambda_j (strict); exempt blocks pass through.
HyperCoeffs hard_threshold(HyperCoeffs coeffs, const ResolvedConfig& cfg);

/// Synthesizes f-hat on the M x N grid from (thresholded) coefficients.
Reconstruction reconstruct(const HyperCoeffs& coeffs, const ResolvedConfig& cfg);

/// Full pipeline: spectra, coefficient estimation, thresholding, synthesis.
Reconstruction deconvolve(const ObservationGrid& grid, const KernelSpectrum& ks, const EstimatorConfig& cfg);

/// Sampled tensor basis function eta_{j',k'}(u_l), l = 0..M-1, for one axis of
/// length M (unit L2 norm in the (1/M) sum sense).
std::vector<double> sampled_spatial_atom(const SpatialBasis& basis, std::size_t m, int j_prime, std::size_t k_prime);

/// psi_{j,k}(t_i) on the N-point grid (scaling block when j == m0 - 1).
std::vector<double> sampled_time_atom(const MeyerBasis& basis, std::size_t n, int j, std::size_t k);

/// CSV dump "j,k,jprime,kprime,re,im,kept". For r >= 2 jprime/kprime hold
/// ':'-joined per-axis values; in Separate mode jprime is -1 and kprime the
/// profile index.
void write_coeffs_csv(const HyperCoeffs& coeffs, const std::string& path);

}  // namespace fdecon
