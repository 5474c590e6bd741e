#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "fou2/gaussian.hpp"

namespace fou2 {

namespace {

Eigen::MatrixXd fbm_levels(const HurstParam& h, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = fbm_cov(h, grid.points[static_cast<std::size_t>(i)],
                               grid.points[static_cast<std::size_t>(j)]);
      m(i, j) = c;
      m(j, i) = c;
    }
  return m;
}

// H >= 1/2: stationary increments give E[Y_s Y_t] = v(s) + v(t) - v(|t-s|).
Eigen::MatrixXd y1_levels_variogram(const HurstParam& h, const TimeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  std::map<double, double> memo;
  auto v = [&](double t) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    const double val = variogram(h, t);
    memo.emplace(t, val);
    return val;
  };
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double s = grid.points[static_cast<std::size_t>(i)];
      const double t = grid.points[static_cast<std::size_t>(j)];
      const double c = v(s) + v(t) - v(std::abs(s - t));
      m(i, j) = c;
      m(j, i) = c;
    }
  return m;
}

// H < 1/2: brute-force bilinear route over a refined time-changed fBm grid;
// makes no use of the kernel representation or increment stationarity.
Eigen::MatrixXd y1_levels_bruteforce(const HurstParam& h, const TimeGrid& grid) {
  const long ncells = static_cast<long>(grid.size()) - 1;
  const long refine = std::max<long>(4, std::min<long>(32, 2048 / std::max<long>(1, ncells)));
  const long M = ncells * refine;
  if (M > 8192)
    throw std::invalid_argument(
        "build_cov_matrix: Y1 grid too large for the brute-force route (H < 1/2)");
  const double twoH = 2.0 * h.value();
  // fine times s_p, time-changed points tau_p, left-point weights w_i = e^{-s_{i-1}}
  std::vector<double> s(static_cast<std::size_t>(M) + 1), tau(static_cast<std::size_t>(M) + 1),
      w(static_cast<std::size_t>(M) + 1, 0.0);
  for (long k = 0; k < ncells; ++k) {
    const double a = grid.points[static_cast<std::size_t>(k)];
    const double b = grid.points[static_cast<std::size_t>(k) + 1];
    for (long r = 0; r < refine; ++r)
      s[static_cast<std::size_t>(k * refine + r)] = a + (b - a) * r / refine;
  }
  s[static_cast<std::size_t>(M)] = grid.points.back();
  for (long p = 0; p <= M; ++p)
    tau[static_cast<std::size_t>(p)] = time_change(h, s[static_cast<std::size_t>(p)]);
  for (long i = 1; i <= M; ++i)
    w[static_cast<std::size_t>(i)] = std::exp(-s[static_cast<std::size_t>(i - 1)]);

  // P[p][q] = sum_{i<=p, j<=q} w_i w_j E[dB_i dB_j]; rolling rows, harvested at
  // multiples of refine. The level terms of the fBm covariance cancel in the
  // increment second difference, leaving only |tau_p - tau_q|^{2H} entries.
  const auto nlev = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd levels = Eigen::MatrixXd::Zero(nlev, nlev);
  std::vector<double> prevP(static_cast<std::size_t>(M) + 1, 0.0);
  std::vector<double> curP(static_cast<std::size_t>(M) + 1, 0.0);
  auto dist = [&](long p, long q) {
    return std::pow(std::abs(tau[static_cast<std::size_t>(p)] - tau[static_cast<std::size_t>(q)]),
                    twoH);
  };
  for (long p = 1; p <= M; ++p) {
    curP[0] = 0.0;
    for (long q = 1; q <= M; ++q) {
      const double g = 0.5 * (dist(p, q - 1) + dist(p - 1, q) - dist(p, q) - dist(p - 1, q - 1));
      curP[static_cast<std::size_t>(q)] = prevP[static_cast<std::size_t>(q)] +
                                          curP[static_cast<std::size_t>(q - 1)] -
                                          prevP[static_cast<std::size_t>(q - 1)] +
                                          w[static_cast<std::size_t>(p)] *
                                              w[static_cast<std::size_t>(q)] * g;
    }
    if (p % refine == 0) {
      const auto row = static_cast<Eigen::Index>(p / refine);
      for (long l = 0; l * refine <= M; ++l)
        levels(row, static_cast<Eigen::Index>(l)) = curP[static_cast<std::size_t>(l * refine)];
    }
    std::swap(prevP, curP);
  }
  // symmetrize against accumulation round-off
  levels = 0.5 * (levels + levels.transpose()).eval();
  return levels;
}

}  // namespace

CovMatrix build_cov_matrix(ProcessTag tag, const HurstParam& h, const TimeGrid& grid) {
  CovMatrix cov;
  cov.tag = tag;
  cov.h = h.value();
  cov.grid = grid;
  if (tag == ProcessTag::FBM) {
    cov.levels = fbm_levels(h, grid);
  } else if (h.value() >= 0.5 - 1e-12) {
    cov.levels = y1_levels_variogram(h, grid);
  } else {
    cov.levels = y1_levels_bruteforce(h, grid);
  }
  return cov;
}

Eigen::MatrixXd increment_cov(const CovMatrix& cov) {
  const Eigen::Index n = cov.levels.rows() - 1;
  if (n < 1) throw std::invalid_argument("increment_cov: need at least 2 grid points");
  Eigen::MatrixXd inc(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      inc(i, j) = cov.levels(i + 1, j + 1) - cov.levels(i + 1, j) - cov.levels(i, j + 1) +
                  cov.levels(i, j);
  return inc;
}

RowSumDiagnostic rowsum_diagnostic(const Eigen::MatrixXd& inc_cov, double h) {
  const Eigen::Index n = inc_cov.rows();
  if (n < 1 || inc_cov.cols() != n)
    throw std::invalid_argument("rowsum_diagnostic: square increment matrix required");
  double row_sum = 0.0;
  double max_diag = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) acc += std::abs(inc_cov(j, k));
    row_sum = std::max(row_sum, acc);
    max_diag = std::max(max_diag, inc_cov(j, j));
  }
  RowSumDiagnostic d;
  d.row_sum = row_sum;
  d.lemma_bound = max_diag + std::pow(1.0 / static_cast<double>(n), std::min(1.0, 2.0 * h));
  d.ratio = d.row_sum / d.lemma_bound;
  return d;
}

}  // namespace fou2
