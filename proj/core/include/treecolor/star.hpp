#pragma once

#include <Eigen/Dense>

namespace treecolor {

// Star with Delta edges and q = Delta + 1 colors. Rows and columns are indexed
// by (edge u, color a) as u * q + (a - 1).

/// Psi(ua, vb) = mu^{ua}_v(b) - mu_v(b), from enumeration.
Eigen::MatrixXd star_correlation_matrix(int delta);
Eigen::MatrixXd star_correlation_closed_form(int delta);
/// P(ua, vb) = 1[u != v] / (Delta - 1) * mu^{ua}_v(b), from enumeration.
Eigen::MatrixXd star_local_walk(int delta);

double lambda_max(const Eigen::MatrixXd& symmetric);
/// Second largest eigenvalue.
double lambda_second(const Eigen::MatrixXd& symmetric);

/// prod_{i=0}^{Delta-2} (1 - lambda_2(P_{Delta-i}))^{-1}; 1 for Delta = 1.
double local_to_global_constant(int delta);

}  // namespace treecolor
