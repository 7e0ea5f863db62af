#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <vector>

namespace treecolor {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Ascending eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm is below `tol`.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol = 1e-12, int max_sweeps = 100);

/// Ascending eigenvalues via LAPACK dsyevd.
std::vector<double> lapack_eigenvalues(Eigen::MatrixXd a);

/// Ascending eigenvalues and orthonormal eigenvectors (columns) via LAPACK dsyevd.
std::pair<std::vector<double>, Eigen::MatrixXd> lapack_eigensystem(Eigen::MatrixXd a);

/// Jacobi up to `jacobi_cap`, LAPACK above.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& a, std::size_t jacobi_cap = 256);

struct PowerOptions {
  double tol = 1e-10;           // on the change of the Rayleigh quotient
  double residual_tol = 1e-6;   // on ||A v - rho v||
  std::uint64_t max_iter = 1'000'000;
  std::uint64_t seed = 12345;
};

struct PowerResult {
  double value;
  Eigen::VectorXd vector;
  std::uint64_t iterations;
  bool converged;
};

using LinearOp = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

/// Largest eigenvalue of a PSD operator on the orthogonal complement of `deflate`
/// (orthonormal vectors).
PowerResult power_iteration(const LinearOp& op, Eigen::Index dim, const std::vector<Eigen::VectorXd>& deflate,
                            const PowerOptions& opt = {});

}  // namespace treecolor
