#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fou2/rng.hpp"
#include "fou2/types.hpp"

namespace fou2 {

enum class ProcessTag { FBM, Y1 };
enum class SampleMethod { Cholesky, Circulant, TimeChange };
enum class Y1Route { ExactCov, TimeChange, Circulant };

/// One realization of a zero-mean Gaussian process on a grid, with provenance.
struct GaussianPath {
  TimeGrid grid;
  std::vector<double> values;
  ProcessTag tag = ProcessTag::FBM;
  double h = 0.5;
  SampleMethod method = SampleMethod::Cholesky;
  SeedSpec seed;
};

/// Level covariance matrix at grid points together with its generating spec.
struct CovMatrix {
  Eigen::MatrixXd levels;
  ProcessTag tag = ProcessTag::FBM;
  double h = 0.5;
  TimeGrid grid;
};

// E[B^H_s B^H_t] = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2
double fbm_cov(const HurstParam& h, double s, double t);

// k_H(x) = H(2H-1)H^{2H-2} e^{-(1-H)x/H} (1-e^{-x/H})^{2H-2}, x > 0, H > 1/2
double kernel_k(const HurstParam& h, double x);

// Symmetric increment-covariance kernel; identical to k_H(|u-v|).
double kernel_r(const HurstParam& h, double u, double v);

/// Variogram v(t) = (1/2) E (Y^{(1)}_{t+s} - Y^{(1)}_s)^2 = \int_0^t (t-x) k_H(x) dx.
/// H > 1/2: singularity-absorbing substitution + adaptive quadrature (rel err <= 1e-8).
/// H = 1/2: exact closed form t/2 (Y^{(1)} is a Brownian motion there).
/// H < 1/2: falls back to the brute-force bilinear route.
double variogram(const HurstParam& h, double t);

/// Double Riemann-Stieltjes sum of (1/2) E(Y_t)^2 in fBm increment covariances
/// over a subdiv-point refinement. Valid for all H in (0,1); independent of
/// the kernel representation.
double variogram_bruteforce(const HurstParam& h, double t, int subdiv);

CovMatrix build_cov_matrix(ProcessTag tag, const HurstParam& h, const TimeGrid& grid);

/// Increment covariance E[(X_{t_i}-X_{t_{i-1}})(X_{t_j}-X_{t_{j-1}})] derived
/// from a level covariance.
Eigen::MatrixXd increment_cov(const CovMatrix& cov);

/// max_j sum_k |E(Delta_k Delta_j)| together with the C^{1,1} lemma's bound
/// max_j d(j/n,(j-1)/n) + n^{-(1 and 2H)}.
struct RowSumDiagnostic {
  double row_sum = 0.0;
  double lemma_bound = 0.0;
  double ratio = 0.0;
};
RowSumDiagnostic rowsum_diagnostic(const Eigen::MatrixXd& inc_cov, double h);

GaussianPath sample_cholesky(const CovMatrix& cov, const SeedSpec& seed);

GaussianPath sample_fbm_circulant(const HurstParam& h, const TimeGrid& grid,
                                  const SeedSpec& seed);

/// Autocovariance gamma(k), k = 0..nlags, of unit-lag Y^{(1)} increments on a
/// uniform grid of mesh delta (second differences of the variogram).
std::vector<double> y1_increment_autocov(const HurstParam& h, double delta, long nlags);

GaussianPath sample_y1(const HurstParam& h, const TimeGrid& grid, const SeedSpec& seed,
                       Y1Route route, int refine = 16);

/// Davies-Harte sampler for a zero-mean stationary sequence with autocovariance
/// gamma(0..n). Returns n draws. Sets used_fallback when the circulant
/// embedding is not nonnegative definite and a dense factorization was used.
std::vector<double> sample_stationary(const std::vector<double>& gamma, long n,
                                      NormalRng& rng, bool* used_fallback = nullptr);

// Cholesky budget: dense factorizations refuse grids beyond this many levels.
inline constexpr long kCholeskyBudget = 4096;

}  // namespace fou2
