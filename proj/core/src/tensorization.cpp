#include "treecolor/tensorization.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>
#include <map>
#include <random>

#include "treecolor/canonical.hpp"
#include "treecolor/errors.hpp"
#include "treecolor/linalg.hpp"

namespace treecolor {

namespace {

constexpr std::size_t kFormCap = 2000;

void require_dense(const DistributionTable& dist) {
  if (dist.size() > kFormCap)
    throw CapacityError(fmt::format("quadratic forms need {} states, cap is {}", dist.size(), kFormCap));
}

Eigen::VectorXd pi_vector(const DistributionTable& dist) {
  Eigen::VectorXd pi(static_cast<Eigen::Index>(dist.size()));
  for (std::size_t i = 0; i < dist.size(); ++i) pi(static_cast<Eigen::Index>(i)) = dist.weight(i);
  return pi;
}

// States grouped by their configuration off S.
std::vector<std::vector<Eigen::Index>> classes_off(const DistributionTable& dist, std::span<const EdgeId> S) {
  std::vector<bool> in_s(dist.num_edges(), false);
  for (EdgeId e : S) in_s.at(e) = true;
  std::map<std::vector<Color>, std::vector<Eigen::Index>> groups;
  std::vector<Color> key(dist.num_edges());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto s = dist.state(i);
    for (std::size_t e = 0; e < key.size(); ++e) key[e] = in_s[e] ? 0 : s[e];
    groups[key].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<std::vector<Eigen::Index>> out;
  out.reserve(groups.size());
  for (auto& [k, v] : groups) out.push_back(std::move(v));
  return out;
}

void subtract_class_means(Eigen::MatrixXd& M, const Eigen::VectorXd& pi, const std::vector<std::vector<Eigen::Index>>& cls,
                          double scale) {
  for (const auto& c : cls) {
    double w = 0;
    for (auto x : c) w += pi(x);
    for (auto x : c)
      for (auto y : c) M(x, y) -= scale * pi(x) * pi(y) / w;
  }
}

void add_cond_var(Eigen::MatrixXd& M, const DistributionTable& dist, const Eigen::VectorXd& pi,
                  std::span<const EdgeId> S, double scale) {
  M.diagonal() += scale * pi;
  subtract_class_means(M, pi, classes_off(dist, S), scale);
}

Verdict classify(double min_ev) {
  if (min_ev >= 1e-9) return Verdict::pass;
  if (min_ev >= -1e-9) return Verdict::marginal;
  return Verdict::fail;
}

std::vector<EdgeId> all_but_root(const Tree& tree) {
  std::vector<EdgeId> out;
  for (EdgeId e = 1; e < tree.num_edges(); ++e) out.push_back(e);
  return out;
}

Eigen::MatrixXd level_weighted_form(const Tree& tree, const DistributionTable& dist, std::span<const double> alpha,
                                    int level_offset) {
  require_dense(dist);
  const Eigen::VectorXd pi = pi_vector(dist);
  const auto N = pi.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
  for (EdgeId e = 0; e < tree.num_edges(); ++e) {
    const std::size_t idx = static_cast<std::size_t>(tree.level(e) - level_offset);
    if (idx >= alpha.size()) throw ParameterError(fmt::format("no constant for level {}", tree.level(e)));
    const EdgeId single[] = {e};
    add_cond_var(M, dist, pi, single, alpha[idx]);
  }
  return M;
}

std::vector<double> alpha_from_xi(const std::vector<double>& xi, double factor) {
  std::vector<double> out(xi.size());
  std::transform(xi.begin(), xi.end(), out.begin(), [factor](double x) { return factor * x; });
  return out;
}

}  // namespace

Eigen::MatrixXd averaging_operator(const DistributionTable& dist, std::span<const EdgeId> S) {
  require_dense(dist);
  const Eigen::VectorXd pi = pi_vector(dist);
  const auto N = pi.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  for (const auto& c : classes_off(dist, S)) {
    double w = 0;
    for (auto x : c) w += pi(x);
    for (auto x : c)
      for (auto y : c) A(x, y) = pi(y) / w;
  }
  return A;
}

Eigen::MatrixXd var_form(const DistributionTable& dist) {
  require_dense(dist);
  const Eigen::VectorXd pi = pi_vector(dist);
  Eigen::MatrixXd M = -pi * pi.transpose();
  M.diagonal() += pi;
  return M;
}

Eigen::MatrixXd cond_var_form(const DistributionTable& dist, std::span<const EdgeId> S) {
  require_dense(dist);
  const Eigen::VectorXd pi = pi_vector(dist);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(pi.size(), pi.size());
  add_cond_var(M, dist, pi, S, 1.0);
  return M;
}

Eigen::MatrixXd projected_var_form(const DistributionTable& dist, std::span<const EdgeId> S) {
  const Eigen::MatrixXd A = averaging_operator(dist, S);
  return A.transpose() * var_form(dist) * A;
}

Eigen::MatrixXd block_form(const DistributionTable& dist, std::span<const WeightedBlock> blocks) {
  require_dense(dist);
  const Eigen::VectorXd pi = pi_vector(dist);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(pi.size(), pi.size());
  for (const auto& b : blocks)
    if (b.weight != 0) add_cond_var(M, dist, pi, b.edges, b.weight);
  return M;
}

double total_variance_error(const DistributionTable& dist, std::span<const EdgeId> S) {
  return (var_form(dist) - cond_var_form(dist, S) - projected_var_form(dist, S)).cwiseAbs().maxCoeff();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::marginal: return "marginal";
    case Verdict::fail: return "fail";
  }
  return "fail";
}

std::string Certificate::to_json() const {
  nlohmann::json j;
  j["instance"] = instance;
  j["inequality"] = inequality;
  j["min_eigenvalue"] = min_eigenvalue;
  j["verdict"] = to_string(verdict);
  return j.dump(2);
}

Certificate certify_inequality(const DistributionTable& dist, const Eigen::MatrixXd& lhs, const Eigen::MatrixXd& rhs,
                               std::string instance, std::string inequality) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() || lhs.rows() != static_cast<Eigen::Index>(dist.size()))
    throw ParameterError("quadratic forms have mismatched dimensions");
  const Eigen::VectorXd s = pi_vector(dist).cwiseSqrt();
  const Eigen::VectorXd inv = s.cwiseInverse();
  Eigen::MatrixXd M = inv.asDiagonal() * (rhs - lhs) * inv.asDiagonal();
  M = 0.5 * (M + M.transpose());
  // Push the constant direction above the spectrum so the minimum is over its complement.
  M += (M.norm() + 1) * s * s.transpose();
  const double min_ev = symmetric_eigenvalues(M).front();
  return {std::move(instance), std::move(inequality), min_ev, classify(min_ev)};
}

double optimal_AT_constant(const Tree& tree, const DistributionTable& dist, const std::vector<Block>& blocks,
                           std::size_t dense_cap, const SpectralOptions& opt) {
  if (blocks.empty()) throw ParameterError("no blocks given");
  if (dist.size() <= 1) return 1;
  std::vector<WeightedBlock> wb;
  for (const auto& b : blocks) wb.push_back({b, 1.0});
  if (dist.size() <= std::min(dense_cap, kFormCap)) {
    const Eigen::VectorXd s = pi_vector(dist).cwiseSqrt();
    const Eigen::VectorXd inv = s.cwiseInverse();
    Eigen::MatrixXd K = inv.asDiagonal() * block_form(dist, wb) * inv.asDiagonal();
    K = 0.5 * (K + K.transpose());
    K += (K.norm() + 1) * s * s.transpose();
    const double lo = symmetric_eigenvalues(K).front();
    if (lo < 1e-10) throw DomainError("blocks do not connect the state space");
    return 1 / lo;
  }
  const TransitionMatrix T = transition_matrix(tree, dist.lists(), ChainSpec::block(std::move(wb)), dist, opt.caps);
  SpectralOptions sopt = opt;
  sopt.force_sparse = true;
  const SpectralReport r = spectral_report(T, sopt);
  const double gap = 1 - r.lambda2;
  if (gap < 1e-12) throw DomainError("block chain has no spectral gap");
  return 1 / (static_cast<double>(blocks.size()) * gap);
}

Certificate check_root_tensorization(const Tree& tree, const DistributionTable& dist, std::span<const double> alpha) {
  if (!tree.has_hanging_root()) throw ParameterError("root tensorization needs a hanging root edge");
  if (alpha.size() != static_cast<std::size_t>(tree.max_level() + 1))
    throw ParameterError(fmt::format("need {} level constants, got {}", tree.max_level() + 1, alpha.size()));
  const auto rest = all_but_root(tree);
  return certify_inequality(dist, projected_var_form(dist, rest), level_weighted_form(tree, dist, alpha, 0),
                            tree.describe(), "root tensorization");
}

Certificate check_root_factorization(const Tree& tree, const DistributionTable& dist, std::span<const double> alpha,
                                     double beta) {
  if (!tree.has_hanging_root()) throw ParameterError("root factorization needs a hanging root edge");
  if (alpha.size() != static_cast<std::size_t>(tree.max_level() + 1))
    throw ParameterError(fmt::format("need {} level constants, got {}", tree.max_level() + 1, alpha.size()));
  Eigen::MatrixXd rhs = level_weighted_form(tree, dist, alpha, 0);
  const Eigen::VectorXd pi = pi_vector(dist);
  for (EdgeId e : tree.child_edges(0)) {
    const EdgeId pair[] = {0, e};
    add_cond_var(rhs, dist, pi, pair, beta);
  }
  return certify_inequality(dist, projected_var_form(dist, all_but_root(tree)), rhs, tree.describe(),
                            "root factorization");
}

Certificate check_block_factorization(const DistributionTable& dist, std::span<const WeightedBlock> blocks) {
  return certify_inequality(dist, var_form(dist), block_form(dist, blocks), {}, "block factorization");
}

double bisect_block_constant(const DistributionTable& dist, const std::vector<Block>& blocks, double tol) {
  std::vector<WeightedBlock> unit;
  for (const auto& b : blocks) unit.push_back({b, 1.0});
  const Eigen::MatrixXd L = var_form(dist);
  const Eigen::MatrixXd R = block_form(dist, unit);
  auto passes = [&](double c) { return certify_inequality(dist, L, c * R).verdict == Verdict::pass; };
  double lo = 0, hi = 1;
  while (!passes(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e12) throw DomainError("no finite block factorization constant below 1e12");
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

double f_recursion(int k, int t, int ell, std::span<const double> alpha, double gamma) {
  if (ell < 1 || t < 1 || t > k) throw ParameterError(fmt::format("F_{}({}) undefined for l = {}", k, t, ell));
  if (alpha.size() != static_cast<std::size_t>(ell + 1)) throw ParameterError("alpha needs l + 1 entries");
  if (k <= ell) return gamma;
  const int s = k - ell;
  if (t < s) return f_recursion(s, t, ell, alpha, gamma);
  const double top = f_recursion(s, s, ell, alpha, gamma);
  if (t == s) return alpha[0] * top;
  return alpha[static_cast<std::size_t>(t - s)] * top + gamma;
}

double f_hat(int k, int t, int ell, std::span<const double> alpha, double gamma) {
  if (ell < 1 || t < 1 || t > k) throw ParameterError(fmt::format("F-hat_{}({}) undefined for l = {}", k, t, ell));
  if (alpha.size() != static_cast<std::size_t>(ell + 1)) throw ParameterError("alpha needs l + 1 entries");
  const auto in_s = [&](int a) { return (a - k) % ell == 0; };
  int count = 0, top = 0;  // |[t-1] cap S_k| and its max, 0 when empty
  for (int a = 1; a < t; ++a)
    if (in_s(a)) {
      ++count;
      top = a;
    }
  double geo = 0;
  for (int i = 0; i <= count; ++i) geo += std::pow(alpha[ell], i);
  const double corner = in_s(t) && t != k ? alpha[0] : 1.0;
  return gamma * (geo * alpha[static_cast<std::size_t>(t - top)] + 1) * corner;
}

double theorem_constant(int k, int ell, std::span<const double> alpha, double gamma) {
  if (alpha.empty()) throw ParameterError("alpha is empty");
  double geo = 0;
  for (int i = 0; i <= k / ell; ++i) geo += std::pow(alpha[static_cast<std::size_t>(ell)], i);
  return gamma * (*std::max_element(alpha.begin(), alpha.end()) * geo + std::max(1.0, alpha[0]));
}

FBoundCheck check_f_bounds(int ell, std::span<const double> alpha, double gamma, int k_max) {
  FBoundCheck out;
  for (int k = 1; k <= k_max; ++k)
    for (int t = 1; t <= k; ++t) {
      const double F = f_recursion(k, t, ell, alpha, gamma);
      const double H = f_hat(k, t, ell, alpha, gamma);
      ++out.checked;
      if (H > 0) out.max_ratio = std::max(out.max_ratio, F / H);
      if (F > H * (1 + 1e-12) + 1e-300) ++out.violations;
    }
  return out;
}

Certificate verify_induction(const Tree& tree, const DistributionTable& dist, int ell, std::span<const double> alpha,
                             double gamma) {
  if (tree.has_hanging_root()) throw ParameterError("induction bound is stated on T_k without a hanging edge");
  const int k = tree.max_level();
  std::vector<double> F;
  for (int t = 1; t <= k; ++t) F.push_back(f_recursion(k, t, ell, alpha, gamma));
  return certify_inequality(dist, var_form(dist), level_weighted_form(tree, dist, F, 1), tree.describe(),
                            "induction bound");
}

double gamma_constant(int delta, int q, int ell) {
  double g = 0;
  for (int j = 1; j <= ell; ++j) {
    const Tree tk = Tree::complete_regular(delta, j);
    const auto dk = enumerate_colorings(tk, ListSpec::uniform(tk, q));
    g = std::max(g, optimal_AT_constant(tk, dk, singleton_blocks(tk)));
    const Tree ts = Tree::hanging_root(delta, j);
    const auto ds = enumerate_colorings(ts, ListSpec::pinned_root(ts, q, 1));
    g = std::max(g, optimal_AT_constant(ts, ds, singleton_blocks(ts)));
  }
  return g;
}

InductionRun induction_pipeline(int delta, int q, int ell, int k) {
  InductionRun run;
  run.delta = delta;
  run.q = q;
  run.ell = ell;
  run.k = k;
  const Tree star = Tree::hanging_root(delta, ell);
  const ListSpec star_lists = ListSpec::star_root(star, q);
  const auto star_dist = enumerate_colorings(star, star_lists);
  run.xi = congestion(PathFamily::glauber, star, star_lists, star_dist).xi;
  run.alpha = alpha_from_xi(run.xi, ell + 1);
  run.root = check_root_tensorization(star, star_dist, run.alpha);
  run.gamma = gamma_constant(delta, q, ell);

  const Tree tk = Tree::complete_regular(delta, k);
  const auto dist = enumerate_colorings(tk, ListSpec::uniform(tk, q));
  for (int t = 1; t <= k; ++t) run.F.push_back(f_recursion(k, t, ell, run.alpha, run.gamma));
  run.induction = verify_induction(tk, dist, ell, run.alpha, run.gamma);
  run.theorem_bound = theorem_constant(k, ell, run.alpha, run.gamma);
  run.optimal_constant = optimal_AT_constant(tk, dist, singleton_blocks(tk));
  return run;
}

std::string InductionRun::to_json() const {
  nlohmann::json j;
  j["Delta"] = delta;
  j["q"] = q;
  j["ell"] = ell;
  j["k"] = k;
  j["xi"] = xi;
  j["alpha"] = alpha;
  j["gamma"] = gamma;
  j["F"] = F;
  j["root_tensorization"] = nlohmann::json::parse(root.to_json());
  j["induction"] = nlohmann::json::parse(induction.to_json());
  j["theorem_bound"] = theorem_bound;
  j["optimal_constant"] = optimal_constant;
  return j.dump(2);
}

BlockInductionRun block_induction_pipeline(int delta, int ell, int k) {
  BlockInductionRun run;
  run.delta = delta;
  run.q = delta + 1;
  run.ell = ell;
  run.k = k;
  const Tree star = Tree::hanging_root(delta, ell);
  const ListSpec star_lists = ListSpec::star_root(star, run.q);
  const auto star_dist = enumerate_colorings(star, star_lists);
  const CongestionReport cr = congestion(PathFamily::edge_dynamics, star, star_lists, star_dist);
  run.alpha = alpha_from_xi(cr.xi, 2.0 * (ell + 1));
  run.beta = 2 * cr.xi_A;
  run.root = check_root_factorization(star, star_dist, run.alpha, run.beta);
  run.gamma = gamma_constant(delta, run.q, ell);
  run.constant = run.beta * theorem_constant(k, ell, run.alpha, run.gamma);

  const Tree tk = Tree::complete_regular(delta, k);
  const auto dist = enumerate_colorings(tk, ListSpec::uniform(tk, run.q));
  std::vector<WeightedBlock> blocks;
  for (auto& b : pair_blocks(tk, true)) blocks.push_back({std::move(b), run.constant});
  run.factorization = check_block_factorization(dist, blocks);
  run.factorization.instance = tk.describe();
  return run;
}

std::string BlockInductionRun::to_json() const {
  nlohmann::json j;
  j["Delta"] = delta;
  j["q"] = q;
  j["ell"] = ell;
  j["k"] = k;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["gamma"] = gamma;
  j["constant"] = constant;
  j["root_factorization"] = nlohmann::json::parse(root.to_json());
  j["block_factorization"] = nlohmann::json::parse(factorization.to_json());
  return j.dump(2);
}

MonotonicityRecord check_monotonicity(const Tree& super_tree, const Tree& sub_tree, int q) {
  MonotonicityRecord rec;
  rec.q = q;
  const auto sup = enumerate_colorings(super_tree, ListSpec::uniform(super_tree, q));
  const auto sub = enumerate_colorings(sub_tree, ListSpec::uniform(sub_tree, q));
  rec.c_super = optimal_AT_constant(super_tree, sup, singleton_blocks(super_tree));
  rec.c_sub = optimal_AT_constant(sub_tree, sub, singleton_blocks(sub_tree));
  rec.edge_super = optimal_AT_constant(super_tree, sup, pair_blocks(super_tree, true));
  rec.edge_sub = optimal_AT_constant(sub_tree, sub, pair_blocks(sub_tree, true));
  rec.singleton_ok = rec.c_sub <= q * rec.c_super;
  rec.edge_ok = rec.edge_sub <= (q + 1.0) * (q + 1.0) * rec.edge_super;
  return rec;
}

ExchangeRecord variance_exchange_checks(const Tree& tree, const DistributionTable& dist, std::span<const EdgeId> S1,
                                        std::span<const EdgeId> S2, std::size_t samples, std::uint64_t seed) {
  const auto contains = [](std::span<const EdgeId> S, EdgeId e) { return std::find(S.begin(), S.end(), e) != S.end(); };
  bool close = false;  // some pair within distance 1
  for (EdgeId e : S1)
    for (EdgeId f : S2) {
      if (e == f || tree.adjacent(e, f)) close = true;
      if (tree.adjacent(e, f) && !contains(S1, f))
        throw ParameterError(fmt::format("edge {} of S2 lies on the exterior boundary of S1", f));
    }

  std::vector<EdgeId> both;
  for (EdgeId e : S1)
    if (contains(S2, e)) both.push_back(e);
  const Eigen::MatrixXd C1 = cond_var_form(dist, S1);
  const Eigen::MatrixXd A2 = averaging_operator(dist, S2);
  const Eigen::MatrixXd A12 = averaging_operator(dist, both);
  const Eigen::MatrixXd lhs = A2.transpose() * C1 * A2;
  const Eigen::MatrixXd rhs = A12.transpose() * C1 * A12;

  ExchangeRecord rec;
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd f(static_cast<Eigen::Index>(dist.size()));
  for (std::size_t i = 0; i < samples; ++i) {
    for (Eigen::Index x = 0; x < f.size(); ++x) f(x) = gauss(eng);
    const double l = f.dot(lhs * f), r = f.dot(rhs * f);
    ++rec.samples;
    rec.max_excess = std::max(rec.max_excess, l - r);
    if (l > r + 1e-12 * std::max(1.0, std::abs(r))) ++rec.violations;
  }
  if (!close) {
    const Eigen::MatrixXd A1 = averaging_operator(dist, S1);
    rec.commutation_error = (A1 * A2 - A2 * A1).cwiseAbs().maxCoeff();
  }
  return rec;
}

}  // namespace treecolor
