#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace dwf::detail {

// Dense symmetric eigenproblem through LAPACK dsyevd. On return `a` holds the
// eigenvectors column-wise and `w` the ascending eigenvalues.
void symmetric_eigen(Eigen::MatrixXd& a, Eigen::VectorXd& w);

// Runs body(i) for i in [0, n) on up to `workers` threads (0 = hardware).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

int resolve_workers(int workers);

} // namespace dwf::detail
