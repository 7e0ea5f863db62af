#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <random>

#include "treecolor/canonical.hpp"
#include "treecolor/errors.hpp"
#include "treecolor/tensorization.hpp"

using namespace treecolor;

namespace {

DistributionTable uniform_table(const Tree& t, int q) { return enumerate_colorings(t, ListSpec::uniform(t, q)); }

std::vector<EdgeId> all_edges(const Tree& t) {
  std::vector<EdgeId> v(t.num_edges());
  std::iota(v.begin(), v.end(), EdgeId{0});
  return v;
}

}  // namespace

TEST_CASE("law of total variance") {
  const Tree t = Tree::complete_regular(2, 2);
  const auto d = uniform_table(t, 4);
  for (const std::vector<EdgeId>& S : {std::vector<EdgeId>{0}, {0, 2}, {1, 2, 3}})
    CHECK(total_variance_error(d, S) <= 1e-12);
  const auto all = all_edges(t);
  CHECK((cond_var_form(d, all) - var_form(d)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("forms annihilate constants and are symmetric") {
  const Tree t = Tree::path(3);
  const auto d = uniform_table(t, 3);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(d.size());
  const std::vector<EdgeId> S{1};
  for (const Eigen::MatrixXd& M : {var_form(d), cond_var_form(d, S), projected_var_form(d, S)}) {
    CHECK((M * one).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("product instance: variance is subadditive") {
  const std::vector<std::pair<VertexId, VertexId>> cp{{1, 0}, {2, 1}, {3, 2}};
  const Tree t = Tree::from_parent_pairs(4, 0, cp, false);
  const auto d = uniform_table(t, 6);
  const std::vector<EdgeId> ends{0, 2};
  // edges 0 and 2 interact only through edge 1; pinning it leaves a product
  Coloring pin(3, 0);
  pin[1] = 1;
  const auto prod = d.conditional(pin);
  const Eigen::MatrixXd Vp = var_form(prod);
  Eigen::MatrixXd Rp = Eigen::MatrixXd::Zero(prod.size(), prod.size());
  for (EdgeId e : ends) Rp += cond_var_form(prod, std::vector<EdgeId>{e});
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int k = 0; k < 100; ++k) {
    Eigen::VectorXd f(prod.size());
    for (auto& x : f) x = g(rng);
    CHECK(f.dot(Vp * f) <= f.dot(Rp * f) + 1e-12);
  }
}

TEST_CASE("certification basics") {
  const Tree t = Tree::path(3);
  const auto d = uniform_table(t, 3);
  const Eigen::MatrixXd V = var_form(d);
  CHECK(certify_inequality(d, V, V).holds());
  CHECK_FALSE(certify_inequality(d, V, 0.99 * V).holds());
  const auto c = certify_inequality(d, V, 2 * V, "path3", "Var <= 2 Var");
  CHECK(c.verdict == Verdict::pass);
  const auto j = nlohmann::json::parse(c.to_json());
  for (const char* key : {"instance", "inequality", "min_eigenvalue", "verdict"}) CHECK(j.contains(key));
  CHECK(j["verdict"] == "pass");
}

TEST_CASE("optimal AT constants") {
  const Tree e = Tree::path(1);
  CHECK(optimal_AT_constant(e, uniform_table(e, 3), singleton_blocks(e)) == doctest::Approx(1.0).epsilon(1e-9));
  const double cap = std::exp(std::numbers::pi * std::numbers::pi / 6);
  for (int delta : {2, 3}) {
    const Tree s = Tree::star(delta);
    CHECK(optimal_AT_constant(s, uniform_table(s, delta + 1), singleton_blocks(s)) <= cap);
  }
  const Tree frozen = Tree::star(3);
  CHECK_THROWS_AS(optimal_AT_constant(frozen, uniform_table(frozen, 3), singleton_blocks(frozen)), DomainError);
}

TEST_CASE("Dirichlet-form and eigenvalue routes agree") {
  for (auto [tree, q] : {std::pair{Tree::path(4), 3}, {Tree::star(3), 4}, {Tree::complete_regular(2, 2), 4}}) {
    const auto lists = ListSpec::uniform(tree, q);
    const auto d = enumerate_colorings(tree, lists);
    const double C = optimal_AT_constant(tree, d, singleton_blocks(tree));
    const auto P = transition_matrix(tree, lists, ChainSpec::heatbath_glauber(), d);
    const double t_rel = spectral_report(P).t_rel;
    CHECK(std::abs(C * tree.num_edges() - t_rel) <= 1e-6 * t_rel);
    // iterative route
    CHECK(std::abs(optimal_AT_constant(tree, d, singleton_blocks(tree), 0) - C) <= 1e-6 * C);
  }
}

TEST_CASE("root tensorization") {
  const Tree t = Tree::hanging_root(2, 1);
  const auto lists = ListSpec::star_root(t, 4);
  const auto d = enumerate_colorings(t, lists);
  const auto rep = congestion(PathFamily::glauber, t, lists, d);
  std::vector<double> alpha;
  for (double x : rep.xi) alpha.push_back(2 * x);
  CHECK(check_root_tensorization(t, d, alpha).holds());
  const std::vector<double> zero(2, 0.0);
  CHECK_FALSE(check_root_tensorization(t, d, zero).holds());

  for (int delta : {2, 3}) {
    const Tree h = Tree::hanging_root(delta, 1);
    const auto dd = enumerate_colorings(h, ListSpec::star_root(h, delta + 1));
    const std::vector<double> a{4.0 * delta, 8.0};
    CHECK(check_root_tensorization(h, dd, a).holds());
  }
}

TEST_CASE("block factorization") {
  const Tree p = Tree::path(4);
  const auto d = uniform_table(p, 3);
  const auto blocks = pair_blocks(p);
  const double C = bisect_block_constant(d, blocks);
  CHECK(std::isfinite(C));
  CHECK(C == doctest::Approx(optimal_AT_constant(p, d, blocks)).epsilon(1e-6));
  std::vector<WeightedBlock> big, small;
  for (const auto& b : blocks) {
    big.push_back({b, 10.0});
    small.push_back({b, 0.1});
  }
  CHECK(check_block_factorization(d, big).holds());
  CHECK_FALSE(check_block_factorization(d, small).holds());

  std::vector<WeightedBlock> sing;
  const double Cs = optimal_AT_constant(p, d, singleton_blocks(p));
  for (const auto& b : singleton_blocks(p)) sing.push_back({b, Cs * (1 + 1e-9)});
  CHECK(check_block_factorization(d, sing).holds());
  const std::vector<WeightedBlock> whole{{all_edges(p), 1.0}};
  CHECK(check_block_factorization(d, whole).holds());
}

TEST_CASE("F recursion") {
  const std::vector<double> alpha{3.0, 2.0, 1.5};
  const double gamma = 1.7;
  const int ell = 2;
  for (int k = 1; k <= ell; ++k)
    for (int t = 1; t <= k; ++t) CHECK(f_recursion(k, t, ell, alpha, gamma) == doctest::Approx(gamma));
  CHECK(f_recursion(ell + 1, 1, ell, alpha, gamma) == doctest::Approx(alpha[0] * gamma));
  const double f = f_recursion(2 * ell, 2 * ell, ell, alpha, gamma);
  CHECK(f <= f_hat(2 * ell, 2 * ell, ell, alpha, gamma) + 1e-12);
  const auto fb = check_f_bounds(ell, alpha, gamma, 6 * ell);
  CHECK(fb.checked > 0);
  CHECK(fb.violations == 0);
  CHECK_THROWS_AS(f_recursion(2, 3, ell, alpha, gamma), ParameterError);
}

TEST_CASE("induction on T_2") {
  const InductionRun run = induction_pipeline(2, 4, 1, 2);
  CHECK(run.root.holds());
  CHECK(run.induction.holds());
  CHECK(run.optimal_constant <= run.theorem_bound);
  CHECK(run.F.size() == 2);
  const auto j = nlohmann::json::parse(run.to_json());
  CHECK(j.contains("alpha"));

  // k <= l reduces to uniform gamma
  const Tree t1 = Tree::complete_regular(2, 1);
  const auto d1 = uniform_table(t1, 4);
  const double C = optimal_AT_constant(t1, d1, singleton_blocks(t1));
  const std::vector<double> alpha{1, 1};
  CHECK(verify_induction(t1, d1, 1, alpha, C * (1 + 1e-9)).holds());
  CHECK_FALSE(verify_induction(t1, d1, 1, alpha, C * 0.9).holds());
}

TEST_CASE("block induction on P(T_2)") {
  const BlockInductionRun run = block_induction_pipeline(2, 3, 2);
  CHECK(run.beta > 0);
  CHECK(run.root.holds());
  CHECK(run.factorization.holds());
}

TEST_CASE("monotonicity") {
  const Tree p5 = Tree::path(5);
  const auto same = check_monotonicity(p5, p5, 3);
  CHECK(same.singleton_ok);
  CHECK(same.edge_ok);
  const auto sub = check_monotonicity(p5, Tree::path(3), 3);
  CHECK(sub.singleton_ok);
  CHECK(sub.edge_ok);
  const auto st = check_monotonicity(Tree::complete_regular(3, 2), Tree::star(2), 4);
  CHECK(st.singleton_ok);
  CHECK(st.edge_ok);
}

TEST_CASE("variance exchange") {
  const Tree p = Tree::path(6);
  const auto d = uniform_table(p, 3);
  const std::vector<EdgeId> S1{0, 1, 2}, sub{1};
  const auto inside = variance_exchange_checks(p, d, S1, sub);
  CHECK(inside.violations == 0);
  CHECK(inside.max_excess <= 1e-12);
  const std::vector<EdgeId> far1{0, 1}, far2{4, 5};
  const auto far = variance_exchange_checks(p, d, far1, far2);
  CHECK(far.violations == 0);
  CHECK(far.commutation_error >= 0);
  CHECK(far.commutation_error <= 1e-12);
  const std::vector<EdgeId> touching{2};
  CHECK_THROWS_AS(variance_exchange_checks(p, d, far1, touching), ParameterError);
}
