#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qtoken/gaussian.hpp"
#include "qtoken/rng.hpp"

namespace qtoken::cv {

/// Codebook of displaced squeezed states. codebook_variance is the
/// variance of the displacement distribution the symbols were drawn from;
/// +infinity denotes the infinite-codebook limit.
struct Codebook {
  std::vector<Eigen::Vector2d> symbols;
  double squeeze_r = 0.0;
  double squeeze_angle = 0.0;
  double codebook_variance = 0.0;

  Codebook() = default;
  Codebook(std::vector<Eigen::Vector2d> symbols, double squeeze_r,
           double squeeze_angle, double codebook_variance);

  static Codebook random(int n_symbols, double displacement_variance,
                         double squeeze_r, double squeeze_angle, Rng& rng);

  nlohmann::json to_json() const;
  static Codebook from_json(const nlohmann::json& j);
};

/// Eq.-style cavity/spin memory coefficients: output variance per
/// eigen-direction is r^2 s_in + l^2 sigma_l^2 + t^2 sigma_spin^2; the mean
/// scales by r. Passivity r^2 + l^2 + t^2 = 1 is enforced.
struct SpinMemoryParams {
  double r = 1.0;
  double l = 0.0;
  double t = 0.0;
  double sigma_l_sq = 0.25;
  double sigma_spin_sq = 0.25;

  SpinMemoryParams() = default;
  SpinMemoryParams(double r, double l, double t, double sigma_l_sq,
                   double sigma_spin_sq);

  nlohmann::json to_json() const;
  static SpinMemoryParams from_json(const nlohmann::json& j);
};

GaussianState generate_token(const Codebook& codebook, int symbol_index,
                             Rng& rng);

GaussianState spin_memory_channel(const GaussianState& g,
                                  const SpinMemoryParams& params);

/// n i.i.d. heterodyne quadrature pairs with covariance
/// cov + added_noise_sq * I.
std::vector<Eigen::Vector2d> heterodyne_sample(const GaussianState& g, int n,
                                               double added_noise_sq, Rng& rng);

struct MomentEstimate {
  std::int64_t sample_count = 0;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();   // noise-subtracted
  Eigen::Vector2d excess_kurtosis = Eigen::Vector2d::Zero();
  Eigen::Vector2d third_moment = Eigen::Vector2d::Zero();  // diagnostics only

  GaussianState state() const;
};

/// Unbiased moments with the added measurement noise subtracted from the
/// covariance diagonal. Throws if the subtracted covariance is not
/// positive definite (too few samples or wrong noise calibration); a
/// sub-Heisenberg determinant within sampling slack is projected back to
/// the boundary.
MomentEstimate reconstruct_gaussian(const std::vector<Eigen::Vector2d>& samples,
                                    double added_noise_sq);

enum class Verdict { authentic, suspect };
std::string to_string(Verdict v);

inline constexpr double kDefaultBeta = 0.1;

/// No-cloning threshold: 2/3 in the infinite-codebook limit, raised by
/// beta * 0.25 / (0.25 + v) for finite codebook variance v. Boundary
/// fidelity exactly at threshold is suspect.
double no_cloning_threshold(const Codebook& codebook, double beta = kDefaultBeta);
Verdict verify_no_cloning(double f_measured, const Codebook& codebook,
                          double beta = kDefaultBeta);

struct SymbolReport {
  int symbol_index = 0;
  double fidelity = 0.0;
  Verdict verdict = Verdict::suspect;
  double squeezing_in_db = 0.0;
  double squeezing_out_db = 0.0;

  nlohmann::json to_json() const;
};

/// generate -> channel -> heterodyne -> reconstruct -> fidelity vs issued
/// -> verdict, for every symbol in the codebook.
std::vector<SymbolReport> roundtrip(const Codebook& codebook,
                                    const SpinMemoryParams& params,
                                    int n_samples, double added_noise_sq,
                                    Rng& rng, double beta = kDefaultBeta);

}  // namespace qtoken::cv
