#include <doctest.h>

#include <cmath>
#include <json.hpp>

#include "treecolor/errors.hpp"
#include "treecolor/spectral.hpp"

using namespace treecolor;

namespace {

struct Instance {
  Tree tree;
  ListSpec lists;
  DistributionTable dist;
  Instance(Tree t, int q) : tree(std::move(t)), lists(ListSpec::uniform(tree, q)), dist(enumerate_colorings(tree, lists)) {}
  TransitionMatrix matrix(const ChainSpec& spec = ChainSpec::heatbath_glauber()) const {
    return transition_matrix(tree, lists, spec, dist);
  }
};

}  // namespace

TEST_CASE("single-edge heat-bath matrix") {
  const Instance in(Tree::path(1), 3);
  const auto P = in.matrix();
  const Eigen::MatrixXd D = P.dense(10);
  CHECK((D.array() - 1.0 / 3).abs().maxCoeff() <= 1e-15);
  const auto rep = spectral_report(P);
  CHECK(std::abs(rep.lambda2) <= 1e-12);
  CHECK(rep.t_rel == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixing_time(P, 0.25) == 1);
  CHECK(mixing_time(P, 1.0) == 0);
}

TEST_CASE("two-edge uniform Glauber entries") {
  const Instance in(Tree::path(2), 3);
  const Eigen::MatrixXd D = in.matrix(ChainSpec::uniform_glauber()).dense(10);
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    int off = 0;
    for (Eigen::Index j = 0; j < D.cols(); ++j)
      if (i != j && D(i, j) > 0) {
        ++off;
        CHECK(D(i, j) == doctest::Approx(1.0 / 6).epsilon(1e-12));
      }
    CHECK(off == 2);
    CHECK(D(i, i) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  }
}

TEST_CASE("pair dynamics mixes faster than Glauber on a 2-edge path") {
  const Instance in(Tree::path(2), 3);
  const auto glauber = spectral_report(in.matrix());
  const auto pairs = spectral_report(in.matrix(ChainSpec::neighbor_pair()));
  CHECK(pairs.lambda2 < glauber.lambda2 - 1e-9);
}

TEST_CASE("matrix invariants") {
  const std::vector<Instance> instances{{Tree::path(4), 3}, {Tree::complete_regular(3, 1), 4}, {Tree::double_star(3), 5}};
  for (const Instance& in : instances) {
    for (const ChainSpec& spec : {ChainSpec::uniform_glauber(), ChainSpec::heatbath_glauber(), ChainSpec::neighbor_pair()}) {
      const auto P = in.matrix(spec);
      CHECK(row_sum_error(P) <= 1e-12);
      CHECK(detailed_balance_error(P) <= 1e-12);
      CHECK(stationarity_error(P) <= 1e-12);
      CHECK(is_irreducible(P));
      const Eigen::MatrixXd S = Eigen::MatrixXd(P.symmetrized());
      CHECK((S - S.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(spectral_report(in.matrix()).lambda_min >= -1e-9);
  }
}

TEST_CASE("dense and iterative routes agree") {
  const Instance in(Tree::path(2), 3);
  const auto P = in.matrix();
  const auto dense = spectral_report(P);
  SpectralOptions opt;
  opt.force_sparse = true;
  const auto sparse = spectral_report(P, opt);
  CHECK(std::abs(dense.t_rel - sparse.t_rel) <= 1e-8);

  const Instance big(Tree::complete_regular(3, 1), 5);
  const auto Pb = big.matrix(ChainSpec::neighbor_pair());
  const auto d2 = spectral_report(Pb);
  const auto s2 = spectral_report(Pb, opt);
  CHECK(std::abs(d2.t_rel - s2.t_rel) <= 1e-6 * d2.t_rel);
  CHECK(std::abs(d2.lambda_min - s2.lambda_min) <= 1e-6);

  const auto ev = spectrum(P);
  CHECK(ev.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ev[ev.size() - 2] == doctest::Approx(dense.lambda2).epsilon(1e-10));
}

TEST_CASE("reducible chains are rejected") {
  const Instance in(Tree::star(3), 3);
  CHECK_THROWS_AS(spectral_report(in.matrix(ChainSpec::uniform_glauber())), DomainError);
}

TEST_CASE("capacity caps") {
  const Instance in(Tree::path(6), 3);
  MatrixCaps caps;
  caps.sparse_cap = 10;
  CHECK_THROWS_AS(transition_matrix(in.tree, in.lists, ChainSpec::heatbath_glauber(), in.dist, caps), CapacityError);
  MatrixCaps mix;
  mix.mixing_cap = 10;
  CHECK_THROWS_AS(mixing_time(in.matrix(), 0.25, mix), CapacityError);
}

TEST_CASE("relaxation time per edge grows on q = 3 paths") {
  double last = 0;
  for (int n : {4, 6, 8}) {
    const Instance in(Tree::path(n), 3);
    const double r = spectral_report(in.matrix()).t_rel / n;
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("mixing time bound and monotonicity in eps") {
  const std::vector<Instance> instances{{Tree::path(4), 3}, {Tree::star(3), 4}, {Tree::double_star(2), 3}};
  for (const Instance& in : instances) {
    const auto P = in.matrix();
    const auto rep = spectral_report(P);
    const auto t4 = mixing_time(P, 0.25);
    const auto t2 = mixing_time(P, 0.5);
    CHECK(t2 <= t4);
    CHECK(static_cast<double>(t4) <= rep.t_rel * (1 + in.tree.num_edges() * std::log(in.lists.q())));
  }
}

TEST_CASE("conductance") {
  const Instance in(Tree::path(3), 3);
  const auto P = in.matrix();
  std::vector<std::size_t> S;
  for (std::size_t i = 0; i < in.dist.size(); ++i)
    if (in.dist.state(i)[1] == 1) S.push_back(i);
  CHECK(static_cast<double>(S.size()) / in.dist.size() == doctest::Approx(1.0 / 3).epsilon(1e-12));

  // Omega minus one state, by direct summation
  const Eigen::MatrixXd D = P.dense(100);
  std::vector<std::size_t> most;
  for (std::size_t i = 1; i < in.dist.size(); ++i) most.push_back(i);
  double flow = 0;
  for (std::size_t x : most) flow += D(x, 0) / in.dist.size();
  const double mass = static_cast<double>(most.size()) / in.dist.size();
  CHECK(conductance(P, most) == doctest::Approx(flow / mass).epsilon(1e-12));
  CHECK_THROWS_AS(conductance(P, std::vector<std::size_t>{}), ParameterError);

  const auto cut = conductance_star(P, in.dist);
  const double inv = 1.0 / spectral_report(P).t_rel;
  CHECK(inv <= 2 * cut.phi + 1e-12);
  CHECK(cut.phi * cut.phi / 2 <= inv + 1e-12);
}

TEST_CASE("frozen-edge lower bound") {
  CHECK(frozen_formula(3, 5) == 0.5);
  CHECK(frozen_formula(3, 4) == 1.0);
  CHECK(frozen_probability(3, 4) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(frozen_probability(3, 6) == 0.0);
  for (auto [d, q] : {std::pair{3, 4}, {3, 5}, {3, 6}, {2, 3}}) {
    const Tree ds = Tree::double_star(d);
    const auto r = lower_bound_check(ds, 0, q);
    CHECK(r.counted_agree);
    CHECK(r.trel_ok);
    CHECK(r.cheeger_upper_ok);
    CHECK(r.cheeger_lower_ok);
  }
  const auto p = lower_bound_check(Tree::path(3), 1, 3);
  CHECK(p.t_rel >= static_cast<double>(p.n));
  CHECK_THROWS_AS(lower_bound_check(Tree::path(3), 0, 3), ParameterError);
  CHECK_THROWS_AS(lower_bound_check(Tree::double_star(3), 0, 7), ParameterError);
}

TEST_CASE("spectral report json") {
  const Instance in(Tree::path(2), 3);
  const auto rep = spectral_report(in.matrix());
  const auto j = nlohmann::json::parse(to_json(rep, ChainKind::heatbath_glauber, in.tree.describe(), 3, 6, 4));
  for (const char* key : {"kind", "tree", "q", "N", "lambda2", "lambda_min", "t_rel", "t_mix_quarter"})
    CHECK(j.contains(key));
}
