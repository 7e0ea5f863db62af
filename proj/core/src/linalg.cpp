#include "treecolor/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "treecolor/errors.hpp"

namespace treecolor {

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, double tol, int max_sweeps) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw ParameterError("eigensolve of a non-square matrix");
  auto off_norm = [&] {
    double s = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
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
      }
    }
  }
  if (off_norm() > tol * std::max(1.0, a.diagonal().cwiseAbs().maxCoeff()))
    throw std::runtime_error("Jacobi eigensolver did not converge");
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> lapack_eigenvalues(Eigen::MatrixXd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  return w;
}

std::pair<std::vector<double>, Eigen::MatrixXd> lapack_eigensystem(Eigen::MatrixXd a) {
  const auto n = static_cast<lapack_int>(a.rows());
  std::vector<double> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data());
  if (info != 0) throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
  return {std::move(w), std::move(a)};
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& a, std::size_t jacobi_cap) {
  if (static_cast<std::size_t>(a.rows()) <= jacobi_cap) return jacobi_eigenvalues(a);
  return lapack_eigenvalues(a);
}

PowerResult power_iteration(const LinearOp& op, Eigen::Index dim, const std::vector<Eigen::VectorXd>& deflate,
                            const PowerOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(dim), w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  auto project = [&](Eigen::VectorXd& x) {
    for (const auto& u : deflate) x -= u.dot(x) * u;
  };
  project(v);
  if (v.norm() == 0) return {0.0, v, 0, true};
  v.normalize();
  double rho = 0, prev = -1;
  for (std::uint64_t it = 1; it <= opt.max_iter; ++it) {
    op(v, w);
    project(w);
    rho = v.dot(w);
    const double wn = w.norm();
    if (wn == 0) return {0.0, v, it, true};
    const double residual = (w - rho * v).norm();
    if (std::abs(rho - prev) < opt.tol && residual < opt.residual_tol) return {rho, v, it, true};
    prev = rho;
    v = w / wn;
  }
  return {rho, v, opt.max_iter, false};
}

}  // namespace treecolor
