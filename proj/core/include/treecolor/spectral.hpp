#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treecolor/dynamics.hpp"
#include "treecolor/linalg.hpp"
#include "treecolor/oracle.hpp"

namespace treecolor {

struct MatrixCaps {
  std::size_t dense_cap = 6000;
  std::size_t sparse_cap = 300000;
  std::size_t jacobi_cap = 256;
  std::size_t mixing_cap = 2000;
};

/// Row-stochastic one-step matrix over an enumerated support.
struct TransitionMatrix {
  ChainKind kind;
  SparseMatrix P;
  Eigen::VectorXd pi;
  bool reversible = false;
  std::size_t num_edges = 0;

  Eigen::Index size() const { return P.rows(); }
  Eigen::MatrixXd dense(std::size_t cap) const;
  /// D^{1/2} P D^{-1/2}.
  SparseMatrix symmetrized() const;
};

TransitionMatrix transition_matrix(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                                   const DistributionTable& dist, const MatrixCaps& caps = {});

/// max |rowsum - 1|.
double row_sum_error(const TransitionMatrix& P);
/// max |pi(x) P(x,y) - pi(y) P(y,x)|.
double detailed_balance_error(const TransitionMatrix& P);
/// max |(pi P)(y) - pi(y)|.
double stationarity_error(const TransitionMatrix& P);
bool is_irreducible(const TransitionMatrix& P);

struct SpectralReport {
  double lambda2 = 0;
  double lambda_min = 0;
  double gap = 0;  // 1 - lambda_*
  double t_rel = 0;
  std::string method;
  std::uint64_t iterations = 0;
};

struct SpectralOptions {
  MatrixCaps caps;
  PowerOptions power;
  bool force_sparse = false;
};

SpectralReport spectral_report(const TransitionMatrix& P, const SpectralOptions& opt = {});

/// Full ascending spectrum of the symmetrized kernel (dense route only).
std::vector<double> spectrum(const TransitionMatrix& P, const MatrixCaps& caps = {});

/// max_x TV(delta_x P^t, pi).
double worst_tv(const Eigen::MatrixXd& Pt, const Eigen::VectorXd& pi);

/// Least t with worst-start TV distance <= eps; 0 when eps >= 1.
std::uint64_t mixing_time(const TransitionMatrix& P, double eps, const MatrixCaps& caps = {},
                          std::uint64_t t_cap = 1u << 20);

double conductance(const TransitionMatrix& P, std::span<const std::size_t> S);

struct CutResult {
  double phi = 0;
  double mass = 0;
  std::string label;
};

/// Upper bound on Phi_* from the color cuts {sigma : sigma_e = c} with mass <= 1/2
/// plus any extra cuts supplied.
CutResult conductance_star(const TransitionMatrix& P, const DistributionTable& dist,
                           const std::vector<std::vector<std::size_t>>& extra_cuts = {});

struct LowerBoundRecord {
  int delta = 0;
  int q = 0;
  std::size_t n = 0;
  double p_frozen_exact = 0;
  double p_frozen_formula = 0;
  double p_frozen_counted = 0;  // direct count of the subsets, see frozen_probability
  double trel_bound = 0;
  double t_rel = 0;
  double phi_cut = 0;
  bool probabilities_agree = false;
  bool counted_agree = false;
  bool trel_ok = false;
  bool cheeger_lower_ok = false;
  bool cheeger_upper_ok = false;
};

/// Frozen-edge probability and relaxation-time lower bound for an edge whose
/// endpoints both have maximum degree. Uses the heat-bath Glauber chain.
LowerBoundRecord lower_bound_check(const Tree& tree, EdgeId e, int q, const SpectralOptions& opt = {});

/// Delta! (Delta-1)! / ((2 Delta - q)! (q-1)!).
double frozen_formula(int delta, int q);
/// (Delta-1)!^2 / ((2 Delta - 1 - q)! (q-1)!), the subset count for Pr[|available(e)| <= 1 | sigma_e = 1].
double frozen_probability(int delta, int q);

std::string to_json(const SpectralReport& r, ChainKind kind, const std::string& tree_desc, int q, std::size_t N,
                    std::optional<std::uint64_t> t_mix_quarter);

}  // namespace treecolor
