#include "treecolor/star.hpp"

#include "treecolor/errors.hpp"
#include "treecolor/linalg.hpp"
#include "treecolor/oracle.hpp"

namespace treecolor {

namespace {

// joint(ua, vb) = Pr[sigma_u = a, sigma_v = b] on the star, from enumeration.
Eigen::MatrixXd pair_marginals(int delta) {
  if (delta < 1) throw ParameterError("star needs at least one edge");
  const int q = delta + 1;
  const Tree star = Tree::star(delta);
  const auto dist = enumerate_colorings(star, ListSpec::uniform(star, q));
  const Eigen::Index m = delta * q;
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(m, m);
  const double w = 1.0 / static_cast<double>(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    auto s = dist.state(i);
    for (int u = 0; u < delta; ++u)
      for (int v = 0; v < delta; ++v) joint(u * q + s[u] - 1, v * q + s[v] - 1) += w;
  }
  return joint;
}

}  // namespace

Eigen::MatrixXd star_correlation_matrix(int delta) {
  const int q = delta + 1;
  const Eigen::MatrixXd joint = pair_marginals(delta);
  const Eigen::Index m = joint.rows();
  Eigen::MatrixXd psi(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    const double px = joint(x, x);
    for (Eigen::Index y = 0; y < m; ++y) {
      const Eigen::Index v = y / q;
      double py = 0;  // mu_v(b)
      for (int a = 0; a < q; ++a) py += joint(v * q + a, y);
      psi(x, y) = joint(x, y) / px - py;
    }
  }
  return psi;
}

Eigen::MatrixXd star_correlation_closed_form(int delta) {
  const int q = delta + 1;
  const Eigen::Index m = delta * q;
  Eigen::MatrixXd psi(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = 0; y < m; ++y) {
      const bool same_edge = x / q == y / q, same_color = x % q == y % q;
      psi(x, y) = -1.0 / (delta + 1) + ((!same_edge && !same_color) ? 1.0 / delta : 0.0) +
                  ((same_edge && same_color) ? 1.0 : 0.0);
    }
  }
  return psi;
}

Eigen::MatrixXd star_local_walk(int delta) {
  if (delta < 2) throw ParameterError("local walk needs Delta >= 2");
  const int q = delta + 1;
  const Eigen::MatrixXd joint = pair_marginals(delta);
  const Eigen::Index m = joint.rows();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x)
    for (Eigen::Index y = 0; y < m; ++y)
      if (x / q != y / q) P(x, y) = joint(x, y) / joint(x, x) / (delta - 1);
  return P;
}

double lambda_max(const Eigen::MatrixXd& symmetric) {
  return jacobi_eigenvalues((symmetric + symmetric.transpose()) / 2).back();
}

double lambda_second(const Eigen::MatrixXd& symmetric) {
  const auto ev = jacobi_eigenvalues((symmetric + symmetric.transpose()) / 2);
  return ev[ev.size() - 2];
}

double local_to_global_constant(int delta) {
  if (delta < 1) throw ParameterError("local-to-global constant needs Delta >= 1");
  double c = 1;
  for (int i = 0; i <= delta - 2; ++i) c /= 1 - lambda_second(star_local_walk(delta - i));
  return c;
}

}  // namespace treecolor
