#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fou2/gaussian.hpp"

using namespace fou2;

TEST_CASE("fBm covariance closed form") {
  const HurstParam h(0.75);
  CHECK(fbm_cov(h, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(fbm_cov(h, 2.0, 2.0) == doctest::Approx(std::pow(2.0, 1.5)));
  CHECK(fbm_cov(h, 1.0, 2.0) ==
        doctest::Approx(0.5 * (1.0 + std::pow(2.0, 1.5) - 1.0)));
  CHECK(fbm_cov(h, 1.0, 2.0) == fbm_cov(h, 2.0, 1.0));
  // H = 1/2 is standard Brownian motion: cov = min(s, t)
  const HurstParam half(0.5);
  CHECK(fbm_cov(half, 0.3, 1.7) == doctest::Approx(0.3));
  CHECK(fbm_cov(half, 2.0, 0.4) == doctest::Approx(0.4));
  CHECK(fbm_cov(h, 0.0, 5.0) == doctest::Approx(0.0));
}

TEST_CASE("moving-average kernel k_H") {
  const HurstParam h(0.75);
  // direct evaluation of H(2H-1) H^{2H-2} e^{-(1-H)x/H} (1-e^{-x/H})^{2H-2}
  const double H = 0.75, x = 1.0;
  const double expected = H * (2 * H - 1) * std::pow(H, 2 * H - 2) *
                          std::exp(-(1 - H) * x / H) *
                          std::pow(1.0 - std::exp(-x / H), 2 * H - 2);
  CHECK(kernel_k(h, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(kernel_k(h, 1.0) == doctest::Approx(0.361558082865).epsilon(1e-9));

  SUBCASE("small-x asymptotics: k_H(x) ~ H(2H-1) x^{2H-2}") {
    const HurstParam h06(0.6);
    const double xx = 0.01;
    const double asym = 0.6 * 0.2 * std::pow(xx, 2 * 0.6 - 2.0);
    const double ratio = kernel_k(h06, xx) / asym;
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
  }

  SUBCASE("positive and decreasing on the long-memory side") {
    const HurstParam h06(0.6);
    double prev = kernel_k(h06, 0.05);
    for (double xx = 0.1; xx < 4.0; xx += 0.05) {
      const double cur = kernel_k(h06, xx);
      CHECK(cur > 0.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }

  SUBCASE("rejects the short-memory regime and x <= 0") {
    CHECK_THROWS(kernel_k(HurstParam(0.4), 1.0));
    CHECK_THROWS(kernel_k(h, 0.0));
    CHECK_THROWS(kernel_k(h, -1.0));
  }
}

TEST_CASE("stationary increment kernel r_H") {
  const HurstParam h(0.7);
  CHECK(kernel_r(h, 2.0, 1.0) == doctest::Approx(kernel_k(h, 1.0)).epsilon(1e-14));
  CHECK(kernel_r(h, 1.0, 2.0) == kernel_r(h, 2.0, 1.0));
  CHECK(kernel_r(h, 0.3, 4.0) == doctest::Approx(kernel_k(h, 3.7)).epsilon(1e-14));
}

TEST_CASE("variogram values and limits") {
  SUBCASE("H = 1/2 closed form") {
    const HurstParam half(0.5);
    CHECK(variogram(half, 0.8) == doctest::Approx(0.4));
    CHECK(variogram(half, 3.0) == doctest::Approx(1.5));
  }

  SUBCASE("small-time limit v(t)/t^{2H} -> 1/2") {
    for (double H : {0.55, 0.6, 0.7, 0.8, 0.9}) {
      const HurstParam h(H);
      const double t = 1e-4;
      const double ratio = variogram(h, t) / std::pow(t, 2 * H);
      CHECK(ratio == doctest::Approx(0.5).epsilon(2e-3));
    }
  }

  SUBCASE("monotone increasing in t") {
    const HurstParam h(0.65);
    double prev = 0.0;
    for (double t : {0.01, 0.05, 0.1, 0.5, 1.0, 2.0}) {
      const double v = variogram(h, t);
      CHECK(v > prev);
      prev = v;
    }
  }

  SUBCASE("agrees with the brute-force bilinear sum") {
    // the brute-force estimate uses left-point sums, so its relative bias is
    // of order t / subdiv
    for (double H : {0.55, 0.7, 0.85}) {
      const HurstParam h(H);
      for (double t : {0.05, 0.1, 0.5}) {
        const double quad = variogram(h, t);
        const double brute = variogram_bruteforce(h, t, 4096);
        CHECK(brute == doctest::Approx(quad).epsilon(5e-4));
      }
    }
  }

  SUBCASE("brute force handles the short-memory side too") {
    const HurstParam h(0.3);
    const double t = 0.01;
    const double ratio = variogram_bruteforce(h, t, 2048) / std::pow(t, 0.6);
    CHECK(ratio == doctest::Approx(0.5).epsilon(0.02));
    // the public variogram routes H < 1/2 through the same estimate
    CHECK(variogram(h, t) == doctest::Approx(variogram_bruteforce(h, t, 1024)).epsilon(1e-3));
  }
}

TEST_CASE("level covariance matrices") {
  TimeGrid grid = TimeGrid::make_uniform(1.0, 5);

  SUBCASE("Brownian levels are min(s,t)") {
    CovMatrix cov = build_cov_matrix(ProcessTag::FBM, HurstParam(0.5), grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j)
        CHECK(cov.levels(static_cast<long>(i), static_cast<long>(j)) ==
              doctest::Approx(std::min(grid.points[i], grid.points[j])));
  }

  SUBCASE("driver increments are stationary") {
    const HurstParam h(0.7);
    CovMatrix cov = build_cov_matrix(ProcessTag::Y1, h, grid);
    Eigen::MatrixXd inc = increment_cov(cov);
    const double delta = grid.mesh();
    const double var0 = 2.0 * variogram(h, delta);
    for (long i = 0; i < inc.rows(); ++i)
      CHECK(inc(i, i) == doctest::Approx(var0).epsilon(1e-10));
    // same-lag covariances agree along the diagonal band
    for (long lag = 1; lag < inc.rows(); ++lag)
      for (long i = 0; i + lag < inc.rows(); ++i)
        CHECK(inc(i, i + lag) == doctest::Approx(inc(0, lag)).epsilon(1e-8));
  }

  SUBCASE("increment variance matches delta^{2H} at small mesh") {
    const HurstParam h(0.7);
    TimeGrid fine = TimeGrid::make_uniform(0.01, 10);
    CovMatrix cov = build_cov_matrix(ProcessTag::Y1, h, fine);
    Eigen::MatrixXd inc = increment_cov(cov);
    const double expect = std::pow(fine.mesh(), 1.4);
    CHECK(inc(0, 0) == doctest::Approx(expect).epsilon(0.05));
  }

  SUBCASE("covariances are positive semi-definite") {
    for (double H : {0.3, 0.5, 0.75}) {
      for (ProcessTag tag : {ProcessTag::FBM, ProcessTag::Y1}) {
        CovMatrix cov = build_cov_matrix(tag, HurstParam(H), grid);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.levels);
        const double scale = cov.levels.diagonal().maxCoeff();
        CHECK(es.eigenvalues().minCoeff() > -1e-10 * scale);
      }
    }
  }
}

TEST_CASE("row-sum diagnostic") {
  SUBCASE("Brownian increments are orthogonal: row sum is exactly 1/n") {
    TimeGrid grid = TimeGrid::make_uniform(1.0, 16);
    CovMatrix cov = build_cov_matrix(ProcessTag::FBM, HurstParam(0.5), grid);
    RowSumDiagnostic d = rowsum_diagnostic(increment_cov(cov), 0.5);
    CHECK(d.row_sum == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(d.row_sum <= d.lemma_bound * (1.0 + 1e-12));
  }

  SUBCASE("driver rows obey the lemma bound across n") {
    const HurstParam h(0.6);
    for (long n : {16L, 64L, 256L}) {
      TimeGrid grid = TimeGrid::make_uniform(1.0, n);
      CovMatrix cov = build_cov_matrix(ProcessTag::Y1, h, grid);
      RowSumDiagnostic d = rowsum_diagnostic(increment_cov(cov), h.value());
      CHECK(d.ratio <= 1.0 + 1e-9);
      CHECK(d.row_sum > 0.0);
    }
  }
}

TEST_CASE("Cholesky sampler") {
  SUBCASE("time zero is pinned at 0") {
    TimeGrid grid = TimeGrid::make_uniform(1.0, 8);
    CovMatrix cov = build_cov_matrix(ProcessTag::FBM, HurstParam(0.75), grid);
    GaussianPath p = sample_cholesky(cov, SeedSpec{11, 0});
    CHECK(p.values[0] == 0.0);
    CHECK(p.values.size() == grid.size());
  }

  SUBCASE("Brownian increments come out independent") {
    TimeGrid grid = TimeGrid::make_uniform(1.0, 4);
    CovMatrix cov = build_cov_matrix(ProcessTag::FBM, HurstParam(0.5), grid);
    const int N = 20000;
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;
    for (int rep = 0; rep < N; ++rep) {
      GaussianPath p = sample_cholesky(cov, SeedSpec{5, static_cast<std::uint64_t>(rep)});
      const double d1 = p.values[1] - p.values[0];
      const double d2 = p.values[2] - p.values[1];
      s11 += d1 * d1;
      s22 += d2 * d2;
      s12 += d1 * d2;
    }
    const double corr = s12 / std::sqrt(s11 * s22);
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(N)));
    CHECK(s11 / N == doctest::Approx(0.25).epsilon(0.05));
  }

  SUBCASE("empirical covariance matches the target within 5 SE") {
    const HurstParam h(0.7);
    TimeGrid grid = TimeGrid::make_uniform(1.0, 6);
    CovMatrix cov = build_cov_matrix(ProcessTag::Y1, h, grid);
    const int N = 20000;
    Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(7, 7);
    for (int rep = 0; rep < N; ++rep) {
      GaussianPath p = sample_cholesky(cov, SeedSpec{99, static_cast<std::uint64_t>(rep)});
      Eigen::Map<const Eigen::VectorXd> v(p.values.data(), 7);
      emp += v * v.transpose();
    }
    emp /= static_cast<double>(N);
    for (long i = 0; i < 7; ++i)
      for (long j = 0; j < 7; ++j) {
        // Var(XY) <= Cov(X,X)Cov(Y,Y) + Cov(X,Y)^2 for joint Gaussians
        const double se = std::sqrt((cov.levels(i, i) * cov.levels(j, j) +
                                     cov.levels(i, j) * cov.levels(i, j)) /
                                    N);
        CHECK(std::abs(emp(i, j) - cov.levels(i, j)) <= 5.0 * se + 1e-12);
      }
  }

  SUBCASE("refuses grids beyond the dense budget") {
    TimeGrid big = TimeGrid::make_uniform(1.0, kCholeskyBudget + 1);
    CovMatrix cov;
    cov.grid = big;
    cov.levels = Eigen::MatrixXd::Identity(static_cast<long>(big.size()),
                                           static_cast<long>(big.size()));
    CHECK_THROWS(sample_cholesky(cov, SeedSpec{1, 0}));
  }
}

TEST_CASE("circulant fBm sampler") {
  SUBCASE("deterministic per seed") {
    TimeGrid grid = TimeGrid::make_uniform(1.0, 64);
    GaussianPath a = sample_fbm_circulant(HurstParam(0.7), grid, SeedSpec{3, 4});
    GaussianPath b = sample_fbm_circulant(HurstParam(0.7), grid, SeedSpec{3, 4});
    GaussianPath c = sample_fbm_circulant(HurstParam(0.7), grid, SeedSpec{3, 5});
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
  }

  SUBCASE("Brownian terminal variance") {
    TimeGrid grid = TimeGrid::make_uniform(2.0, 32);
    const int N = 20000;
    double sumsq = 0.0;
    for (int rep = 0; rep < N; ++rep) {
      GaussianPath p =
          sample_fbm_circulant(HurstParam(0.5), grid, SeedSpec{21, static_cast<std::uint64_t>(rep)});
      sumsq += p.values.back() * p.values.back();
    }
    // Var B_2 = 2; SE of the mean of squares is 2*sqrt(2/N)
    CHECK(sumsq / N == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("driver increment autocovariance") {
  const HurstParam h(0.7);
  const double delta = 1.0 / 64.0;
  std::vector<double> gamma = y1_increment_autocov(h, delta, 8);
  CHECK(gamma.size() == 9);
  CHECK(gamma[0] == doctest::Approx(2.0 * variogram(h, delta)).epsilon(1e-10));
  // gamma(1) from the variogram second difference (safe at small lags)
  const double g1 = variogram(h, 2 * delta) - 2.0 * variogram(h, delta);
  CHECK(gamma[1] == doctest::Approx(g1).epsilon(1e-6));
  // long-memory side: positive correlations decaying monotonically
  for (std::size_t k = 1; k + 1 < gamma.size(); ++k) {
    CHECK(gamma[k] > 0.0);
    CHECK(gamma[k + 1] < gamma[k]);
  }

  SUBCASE("Brownian case is white") {
    std::vector<double> g = y1_increment_autocov(HurstParam(0.5), 0.25, 4);
    CHECK(g[0] == doctest::Approx(0.25));
    for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] == doctest::Approx(0.0));
  }
}

TEST_CASE("driver sampling routes agree") {
  const HurstParam h(0.7);
  TimeGrid grid = TimeGrid::make_uniform(1.0, 16);
  const int N = 4000;
  auto terminal_meansq = [&](Y1Route route) {
    double s = 0.0;
    for (int rep = 0; rep < N; ++rep) {
      GaussianPath p = sample_y1(h, grid, SeedSpec{77, static_cast<std::uint64_t>(rep)}, route);
      s += p.values.back() * p.values.back();
    }
    return s / N;
  };
  const double exact = 2.0 * variogram(h, 1.0);  // stationary increments from 0
  const double mc_tol = 0.10;                    // 4000 reps => ~2.2% SE, plus route bias
  CHECK(terminal_meansq(Y1Route::ExactCov) == doctest::Approx(exact).epsilon(mc_tol));
  CHECK(terminal_meansq(Y1Route::Circulant) == doctest::Approx(exact).epsilon(mc_tol));
  CHECK(terminal_meansq(Y1Route::TimeChange) == doctest::Approx(exact).epsilon(mc_tol));
}

TEST_CASE("stationary sampler falls back cleanly") {
  // an autocovariance whose circulant embedding is wildly indefinite
  std::vector<double> gamma = {1.0, 0.9, 0.9, 0.9, 0.9};
  NormalRng rng(SeedSpec{1, 2});
  bool fallback = false;
  std::vector<double> draws = sample_stationary(gamma, 4, rng, &fallback);
  CHECK(draws.size() == 4);
  for (double d : draws) CHECK(std::isfinite(d));
}
