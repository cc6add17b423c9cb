#include "mind/diff/eigh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mind/common.hpp"

namespace mind::diff {

namespace {

double off_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EighResult symmetric_eigh(const Eigen::MatrixXd& m, double off_tol, int max_sweeps) {
  const Eigen::Index n = m.rows();
  require(m.cols() == n, "symmetric_eigh: matrix must be square");
  require(n <= 256, "symmetric_eigh: n must be at most 256");
  require(((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10) || n == 0, "symmetric_eigh: matrix is not symmetric");

  Eigen::MatrixXd a = 0.5 * (m + m.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  EighResult r;
  while (off_norm(a) >= off_tol && r.sweeps < max_sweeps) {
    ++r.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
  r.values.resize(n);
  r.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    r.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return r;
}

}  // namespace mind::diff
