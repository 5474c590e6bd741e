#include <fftw3.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fou2/gaussian.hpp"

namespace fou2 {

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// Samples x ~ N(0, cov) with a pivoted LDLT factorization; PSD matrices with
/// zero directions are fine. One jitter pass of at most 1e-10 * max diagonal,
/// then a hard failure.
Eigen::VectorXd sample_mvn(const Eigen::MatrixXd& cov, NormalRng& rng) {
  const Eigen::Index n = cov.rows();
  if (n == 0) return Eigen::VectorXd();
  const double max_diag = cov.diagonal().maxCoeff();
  const double neg_tol = 1e-10 * std::max(max_diag, 1e-300);

  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();

  for (int attempt = 0; attempt < 2; ++attempt) {
    Eigen::MatrixXd m = cov;
    if (attempt == 1) m.diagonal().array() += 1e-10 * max_diag;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd d = ldlt.vectorD();
    if (d.minCoeff() < -neg_tol) continue;
    for (Eigen::Index i = 0; i < n; ++i) d(i) = d(i) > 0.0 ? std::sqrt(d(i)) : 0.0;
    Eigen::VectorXd y = d.asDiagonal() * z;
    y = ldlt.matrixL() * y;
    return ldlt.transpositionsP().transpose() * y;
  }
  throw std::runtime_error(
      "sample_mvn: covariance is indefinite beyond the regularization budget");
}

std::vector<double> cumsum_from_zero(const std::vector<double>& increments) {
  std::vector<double> out(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) out[i + 1] = out[i] + increments[i];
  return out;
}

}  // namespace

GaussianPath sample_cholesky(const CovMatrix& cov, const SeedSpec& seed) {
  const Eigen::Index npts = cov.levels.rows();
  if (npts != static_cast<Eigen::Index>(cov.grid.size()))
    throw std::invalid_argument("sample_cholesky: covariance/grid size mismatch");
  if (npts - 1 > kCholeskyBudget)
    throw std::invalid_argument("sample_cholesky: grid exceeds the dense factorization budget");
  if (std::abs(cov.levels(0, 0)) > 1e-12)
    throw std::invalid_argument("sample_cholesky: level covariance must be anchored at t = 0");
  NormalRng rng(seed);
  // factor the submatrix excluding t = 0 so values[0] = 0 by construction
  Eigen::VectorXd tail = sample_mvn(cov.levels.bottomRightCorner(npts - 1, npts - 1), rng);
  GaussianPath path;
  path.grid = cov.grid;
  path.tag = cov.tag;
  path.h = cov.h;
  path.method = SampleMethod::Cholesky;
  path.seed = seed;
  path.values.assign(static_cast<std::size_t>(npts), 0.0);
  for (Eigen::Index i = 1; i < npts; ++i)
    path.values[static_cast<std::size_t>(i)] = tail(i - 1);
  return path;
}

std::vector<double> sample_stationary(const std::vector<double>& gamma, long n,
                                      NormalRng& rng, bool* used_fallback) {
  if (n < 1) throw std::invalid_argument("sample_stationary: n must be >= 1");
  if (static_cast<long>(gamma.size()) < n + 1)
    throw std::invalid_argument("sample_stationary: need autocovariances up to lag n");
  if (used_fallback) *used_fallback = false;
  if (n == 1) return {std::sqrt(std::max(0.0, gamma[0])) * rng.normal()};

  const long m = 2 * n;
  // circulant first row c_k = gamma(min(k, m-k))
  std::vector<std::complex<double>> c(static_cast<std::size_t>(m));
  for (long k = 0; k < m; ++k)
    c[static_cast<std::size_t>(k)] = gamma[static_cast<std::size_t>(std::min(k, m - k))];

  std::vector<std::complex<double>> lambda(static_cast<std::size_t>(m));
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                      reinterpret_cast<fftw_complex*>(c.data()),
                                      reinterpret_cast<fftw_complex*>(lambda.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  double lam_max = 0.0, lam_min = 0.0;
  for (long k = 0; k < m; ++k) {
    const double v = lambda[static_cast<std::size_t>(k)].real();
    lam_max = std::max(lam_max, v);
    lam_min = std::min(lam_min, v);
  }
  if (lam_min < -1e-9 * lam_max) {
    // embedding not nonnegative definite: dense fallback on the Toeplitz law
    if (used_fallback) *used_fallback = true;
    if (n > kCholeskyBudget)
      throw std::runtime_error(
          "sample_stationary: circulant embedding indefinite and grid exceeds the "
          "dense fallback budget");
    Eigen::MatrixXd toep(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j)
        toep(i, j) = gamma[static_cast<std::size_t>(std::labs(i - j))];
    Eigen::VectorXd x = sample_mvn(toep, rng);
    return std::vector<double>(x.data(), x.data() + n);
  }

  std::vector<std::complex<double>> a(static_cast<std::size_t>(m));
  auto lam = [&](long k) {
    return std::max(0.0, lambda[static_cast<std::size_t>(k)].real());
  };
  a[0] = std::sqrt(lam(0)) * rng.normal();
  for (long k = 1; k < n; ++k) {
    const double g = rng.normal();
    const double hpart = rng.normal();
    const double s = std::sqrt(0.5 * lam(k));
    a[static_cast<std::size_t>(k)] = std::complex<double>(s * g, s * hpart);
    a[static_cast<std::size_t>(m - k)] = std::conj(a[static_cast<std::size_t>(k)]);
  }
  a[static_cast<std::size_t>(n)] = std::sqrt(lam(n)) * rng.normal();

  std::vector<std::complex<double>> out(static_cast<std::size_t>(m));
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m),
                                      reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(out.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> increments(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j)
    increments[static_cast<std::size_t>(j)] = out[static_cast<std::size_t>(j)].real() * scale;
  return increments;
}

GaussianPath sample_fbm_circulant(const HurstParam& h, const TimeGrid& grid,
                                  const SeedSpec& seed) {
  if (!grid.uniform)
    throw std::invalid_argument("sample_fbm_circulant: uniform grid required");
  const long n = grid.n;
  const double delta = grid.horizon / static_cast<double>(n);
  const double twoH = 2.0 * h.value();
  const double scale = 0.5 * std::pow(delta, twoH);
  std::vector<double> gamma(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k)
    gamma[static_cast<std::size_t>(k)] =
        scale * (std::pow(std::abs(static_cast<double>(k + 1)), twoH) +
                 std::pow(std::abs(static_cast<double>(k - 1)), twoH) -
                 2.0 * std::pow(static_cast<double>(k), twoH));
  NormalRng rng(seed);
  bool fallback = false;
  auto increments = sample_stationary(gamma, n, rng, &fallback);
  GaussianPath path;
  path.grid = grid;
  path.tag = ProcessTag::FBM;
  path.h = h.value();
  path.method = fallback ? SampleMethod::Cholesky : SampleMethod::Circulant;
  path.seed = seed;
  path.values = cumsum_from_zero(increments);
  return path;
}

namespace {

GaussianPath y1_from_increments(const HurstParam& h, const TimeGrid& grid,
                                const SeedSpec& seed, std::vector<double> increments,
                                SampleMethod method) {
  GaussianPath path;
  path.grid = grid;
  path.tag = ProcessTag::Y1;
  path.h = h.value();
  path.method = method;
  path.seed = seed;
  path.values = cumsum_from_zero(increments);
  return path;
}

GaussianPath sample_y1_timechange(const HurstParam& h, const TimeGrid& grid,
                                  const SeedSpec& seed, int refine) {
  if (refine < 1) throw std::invalid_argument("sample_y1: refine must be >= 1");
  const long ncells = static_cast<long>(grid.size()) - 1;
  const long M = ncells * refine;
  if (M > kCholeskyBudget)
    throw std::invalid_argument("sample_y1: refined grid exceeds the dense budget");
  // fail early if the horizon is unsimulatable via the time change
  time_change(h, grid.horizon);

  std::vector<double> s(static_cast<std::size_t>(M) + 1);
  for (long k = 0; k < ncells; ++k) {
    const double a = grid.points[static_cast<std::size_t>(k)];
    const double b = grid.points[static_cast<std::size_t>(k) + 1];
    for (long r = 0; r < refine; ++r)
      s[static_cast<std::size_t>(k * refine + r)] = a + (b - a) * r / refine;
  }
  s[static_cast<std::size_t>(M)] = grid.horizon;

  // fBm at the time-changed points, anchored at tau_0 = a_0 = H
  std::vector<double> tau(static_cast<std::size_t>(M) + 1);
  for (long p = 0; p <= M; ++p)
    tau[static_cast<std::size_t>(p)] = time_change(h, s[static_cast<std::size_t>(p)]);
  Eigen::MatrixXd anchored(M, M);
  for (long i = 1; i <= M; ++i)
    for (long j = 1; j <= i; ++j) {
      const double c = fbm_cov(h, tau[static_cast<std::size_t>(i)], tau[static_cast<std::size_t>(j)]) -
                       fbm_cov(h, tau[static_cast<std::size_t>(i)], tau[0]) -
                       fbm_cov(h, tau[0], tau[static_cast<std::size_t>(j)]) +
                       fbm_cov(h, tau[0], tau[0]);
      anchored(i - 1, j - 1) = c;
      anchored(j - 1, i - 1) = c;
    }
  NormalRng rng(seed);
  Eigen::VectorXd b = sample_mvn(anchored, rng);  // B_{tau_p} - B_{tau_0}, p = 1..M

  // left-point Riemann-Stieltjes sum of e^{-s} dB_{a_s}, restricted to grid points
  std::vector<double> increments(static_cast<std::size_t>(ncells), 0.0);
  double prev_level = 0.0;
  for (long k = 0; k < ncells; ++k) {
    double acc = 0.0;
    for (long r = 0; r < refine; ++r) {
      const long j = k * refine + r + 1;  // fine increment index
      const double bj = b(j - 1);
      const double bj_prev = (j - 1 == 0) ? 0.0 : b(j - 2);
      acc += std::exp(-s[static_cast<std::size_t>(j - 1)]) * (bj - bj_prev);
    }
    increments[static_cast<std::size_t>(k)] = acc;
    prev_level += acc;
  }
  (void)prev_level;
  return y1_from_increments(h, grid, seed, std::move(increments), SampleMethod::TimeChange);
}

}  // namespace

GaussianPath sample_y1(const HurstParam& h, const TimeGrid& grid, const SeedSpec& seed,
                       Y1Route route, int refine) {
  switch (route) {
    case Y1Route::ExactCov: {
      CovMatrix cov = build_cov_matrix(ProcessTag::Y1, h, grid);
      GaussianPath p = sample_cholesky(cov, seed);
      p.tag = ProcessTag::Y1;
      return p;
    }
    case Y1Route::Circulant: {
      if (!grid.uniform)
        throw std::invalid_argument("sample_y1: circulant route requires a uniform grid");
      const double delta = grid.horizon / static_cast<double>(grid.n);
      auto gamma = y1_increment_autocov(h, delta, grid.n);
      NormalRng rng(seed);
      bool fallback = false;
      auto increments = sample_stationary(gamma, grid.n, rng, &fallback);
      return y1_from_increments(h, grid, seed, std::move(increments),
                                fallback ? SampleMethod::Cholesky : SampleMethod::Circulant);
    }
    case Y1Route::TimeChange:
      return sample_y1_timechange(h, grid, seed, refine);
  }
  throw std::logic_error("sample_y1: unknown route");
}

}  // namespace fou2
