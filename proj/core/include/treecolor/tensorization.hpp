#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treecolor/dynamics.hpp"
#include "treecolor/oracle.hpp"
#include "treecolor/spectral.hpp"
#include "treecolor/tree.hpp"

namespace treecolor {

// Quadratic forms M over the enumerated support, f^T M f for f indexed by state.

inline constexpr std::size_t kDenseFormCap = 1500;

/// (A f)(x) = mu_S[f](x): average over states agreeing with x off S.
Eigen::MatrixXd averaging_operator(const DistributionTable& dist, std::span<const EdgeId> S);
/// f -> Var(f).
Eigen::MatrixXd var_form(const DistributionTable& dist);
/// f -> mu[Var_S f].
Eigen::MatrixXd cond_var_form(const DistributionTable& dist, std::span<const EdgeId> S);
/// f -> Var(mu_S f).
Eigen::MatrixXd projected_var_form(const DistributionTable& dist, std::span<const EdgeId> S);
/// sum_B w_B mu[Var_B f].
Eigen::MatrixXd block_form(const DistributionTable& dist, std::span<const WeightedBlock> blocks);

/// max entry of |var - cond(S) - proj(S)|.
double total_variance_error(const DistributionTable& dist, std::span<const EdgeId> S);

enum class Verdict { pass, marginal, fail };
std::string to_string(Verdict v);

struct Certificate {
  std::string instance;
  std::string inequality;
  double min_eigenvalue = 0;
  Verdict verdict = Verdict::fail;

  bool holds() const { return verdict != Verdict::fail; }
  std::string to_json() const;
};

/// lhs <= rhs on functions orthogonal to constants: min eigenvalue of
/// D^{-1/2}(rhs - lhs)D^{-1/2} on the complement of sqrt(pi), against -1e-9.
Certificate certify_inequality(const DistributionTable& dist, const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                               std::string instance = {}, std::string inequality = {});

/// Smallest C with Var f <= C sum_B mu[Var_B f]. Dense generalized eigenproblem up to
/// `dense_cap` states, otherwise 1 / (|B| (1 - lambda_2)) of the block heat-bath chain.
double optimal_AT_constant(const Tree& tree, const DistributionTable& dist, const std::vector<Block>& blocks,
                           std::size_t dense_cap = kDenseFormCap, const SpectralOptions& opt = {});

/// Var_{mu*}(mu_{E \ r} f) <= sum_i alpha_i sum_{e in L_i} mu[Var_e f].
Certificate check_root_tensorization(const Tree& tree, const DistributionTable& dist, std::span<const double> alpha);

/// As above with the extra blocks {r, e}, e in L_1, at weight beta.
Certificate check_root_factorization(const Tree& tree, const DistributionTable& dist, std::span<const double> alpha,
                                     double beta);

Certificate check_block_factorization(const DistributionTable& dist, std::span<const WeightedBlock> blocks);

/// Least uniform C passing check_block_factorization, by bisection to relative `tol`.
double bisect_block_constant(const DistributionTable& dist, const std::vector<Block>& blocks, double tol = 1e-8);

// F recursion

double f_recursion(int k, int t, int ell, std::span<const double> alpha, double gamma);
double f_hat(int k, int t, int ell, std::span<const double> alpha, double gamma);
/// gamma (max_j alpha_j sum_{i <= floor(k/l)} alpha_l^i + max{1, alpha_0}).
double theorem_constant(int k, int ell, std::span<const double> alpha, double gamma);

struct FBoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // F / F-hat
};

FBoundCheck check_f_bounds(int ell, std::span<const double> alpha, double gamma, int k_max);

/// Var f <= sum_t F_k(t) sum_{e in L_t} mu[Var_e f] on T_k.
Certificate verify_induction(const Tree& tree, const DistributionTable& dist, int ell, std::span<const double> alpha,
                             double gamma);

/// End-to-end run on T_k: alpha = (l+1) xi from T*_l congestion, gamma from the
/// depth-<=l measures, then the recursion bound on T_k.
struct InductionRun {
  int delta = 0, q = 0, ell = 0, k = 0;
  std::vector<double> xi;
  std::vector<double> alpha;
  double gamma = 0;
  std::vector<double> F;  // F_k(t), t = 1..k
  Certificate root;
  Certificate induction;
  double theorem_bound = 0;
  double optimal_constant = 0;  // exact AT constant of mu_k
  std::string to_json() const;
};

InductionRun induction_pipeline(int delta, int q, int ell, int k);

/// Block variant on P(T_k) blocks for q = Delta + 1: alpha = 2(l+1) xi, beta = 2 xi_A
/// from edge-dynamics congestion, certified root-factorization, then a uniform
/// beta * theorem constant on P(T_k).
struct BlockInductionRun {
  int delta = 0, q = 0, ell = 0, k = 0;
  std::vector<double> alpha;
  double beta = 0;
  double gamma = 0;
  double constant = 0;
  Certificate root;
  Certificate factorization;
  std::string to_json() const;
};

BlockInductionRun block_induction_pipeline(int delta, int ell, int k);

/// gamma for the theorem: max over j <= l of the AT constants of mu_j and mu^{*,1}_j.
double gamma_constant(int delta, int q, int ell);

struct MonotonicityRecord {
  double c_super = 0, c_sub = 0;
  double edge_super = 0, edge_sub = 0;
  int q = 0;
  bool singleton_ok = false;  // C_sub <= q C_super
  bool edge_ok = false;       // C_sub^P <= (q+1)^2 C_super^P
};

MonotonicityRecord check_monotonicity(const Tree& super_tree, const Tree& sub_tree, int q);

struct ExchangeRecord {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_excess = 0;          // lhs - rhs over samples
  double commutation_error = -1;  // -1 when S1, S2 are within distance 2
};

/// mu[Var_{S1}(mu_{S2} f)] <= mu[Var_{S1}(mu_{S1 cap S2} f)] on random f, and, when
/// the sets are at distance >= 2, ||A_{S1} A_{S2} - A_{S2} A_{S1}||_max.
ExchangeRecord variance_exchange_checks(const Tree& tree, const DistributionTable& dist, std::span<const EdgeId> S1,
                                        std::span<const EdgeId> S2, std::size_t samples = 100,
                                        std::uint64_t seed = 7);

}  // namespace treecolor
