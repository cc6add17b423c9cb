#pragma once

#include <Eigen/Core>

namespace mind::diff {

struct EighResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column i pairs with values(i)
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for small dense symmetric matrices (n <= 256).
/// Throws ContractError if |M - M^T| exceeds 1e-10 anywhere.
EighResult symmetric_eigh(const Eigen::MatrixXd& m, double off_tol = 1e-12, int max_sweeps = 100);

}  // namespace mind::diff
