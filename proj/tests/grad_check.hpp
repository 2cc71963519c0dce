#pragma once

#include "sga/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

namespace sga::test {

// |a - n| / max(|a|, |n|, 1e-6): relative error with a floor so that
// near-zero gradient entries are compared absolutely.
inline double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

// Central differences of f at x, step h.
template <class F>
Eigen::VectorXd numeric_gradient(F&& f, Eigen::VectorXd x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double up = f(x);
    x[k] = x0 - h;
    const double down = f(x);
    x[k] = x0;
    g[k] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_rel_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    worst = std::max(worst, rel_error(analytic[k], numeric[k]));
  }
  return worst;
}

// Independent extended-precision InfoNCE loss. Finite differences of the
// double loss lose ~1e-10 to cancellation, which swamps gradient entries
// near 1e-7 at small temperatures.
inline long double info_nce_loss_ld(const Eigen::MatrixXd& S,
                                    const std::vector<std::pair<int, int>>& pos, double temp) {
  long double row = 0.0L, col = 0.0L;
  for (const auto& [i, j] : pos) {
    long double m = -1e300L;
    for (Eigen::Index c = 0; c < S.cols(); ++c) m = std::max(m, (long double)S(i, c) / temp);
    long double z = 0.0L;
    for (Eigen::Index c = 0; c < S.cols(); ++c) z += std::exp((long double)S(i, c) / temp - m);
    row += m + std::log(z) - (long double)S(i, j) / temp;
    m = -1e300L;
    for (Eigen::Index r = 0; r < S.rows(); ++r) m = std::max(m, (long double)S(r, j) / temp);
    z = 0.0L;
    for (Eigen::Index r = 0; r < S.rows(); ++r) z += std::exp((long double)S(r, j) / temp - m);
    col += m + std::log(z) - (long double)S(i, j) / temp;
  }
  const long double n = static_cast<long double>(pos.size());
  return 0.5L * (row / n + col / n);
}

// Central differences of the extended-precision loss; max relative error
// against the analytic gradient.
inline double info_nce_fd_error(const Eigen::MatrixXd& S,
                                const std::vector<std::pair<int, int>>& pos, double temp,
                                double h = 1e-5) {
  const auto res = info_nce(S, pos, temp);
  Eigen::MatrixXd x = S;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double x0 = x.data()[k];
    x.data()[k] = x0 + h;
    const long double up = info_nce_loss_ld(x, pos, temp);
    x.data()[k] = x0 - h;
    const long double down = info_nce_loss_ld(x, pos, temp);
    x.data()[k] = x0;
    const double num = static_cast<double>((up - down) / (2.0L * h));
    worst = std::max(worst, rel_error(res.grad.data()[k], num));
  }
  return worst;
}

// Random I x J similarity with a random partial matching of positives.
inline double info_nce_grad_error(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(1, 6);
  const int I = size(rng), J = size(rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd S(I, J);
  for (Eigen::Index k = 0; k < S.size(); ++k) S.data()[k] = u(rng);
  std::vector<int> cols(static_cast<std::size_t>(J));
  std::iota(cols.begin(), cols.end(), 0);
  std::shuffle(cols.begin(), cols.end(), rng);
  std::vector<std::pair<int, int>> pos;
  const int n = std::uniform_int_distribution<int>(1, std::min(I, J))(rng);
  for (int k = 0; k < n; ++k) pos.emplace_back(k, cols[static_cast<std::size_t>(k)]);
  const double temp = std::uniform_real_distribution<double>(0.2, 1.0)(rng);

  return info_nce_fd_error(S, pos, temp);
}

// Random triplet with the hinge active and away from its kink.
inline double triplet_grad_error(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const int d = std::uniform_int_distribution<int>(2, 8)(rng);
  const double margin = 0.5;
  Eigen::VectorXd a(d), p(d), q(d);
  for (;;) {
    for (int k = 0; k < d; ++k) {
      a[k] = n(rng);
      p[k] = a[k] + n(rng);
      q[k] = a[k] + 0.6 * n(rng);
    }
    const double z = (a - p).norm() - (a - q).norm() + margin;
    if (z > 1e-3) break;
  }
  const auto res = triplet_loss(a, p, q, margin);
  Eigen::VectorXd x(3 * d);
  x << a, p, q;
  auto f = [&](const Eigen::VectorXd& v) {
    return triplet_loss(v.segment(0, d), v.segment(d, d), v.segment(2 * d, d), margin).loss;
  };
  Eigen::VectorXd g(3 * d);
  g << res.grad_anchor, res.grad_positive, res.grad_negative;
  return max_rel_error(g, numeric_gradient(f, x));
}

}  // namespace sga::test
