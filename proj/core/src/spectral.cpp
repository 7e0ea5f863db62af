#include "treecolor/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "json.hpp"
#include "treecolor/errors.hpp"

namespace treecolor {

Eigen::MatrixXd TransitionMatrix::dense(std::size_t cap) const {
  if (static_cast<std::size_t>(size()) > cap)
    throw CapacityError("dense matrix needs " + std::to_string(size()) + " states, cap is " + std::to_string(cap));
  return Eigen::MatrixXd(P);
}

SparseMatrix TransitionMatrix::symmetrized() const {
  const Eigen::VectorXd s = pi.cwiseSqrt();
  const Eigen::VectorXd inv = s.cwiseInverse();
  SparseMatrix out = s.asDiagonal() * P * inv.asDiagonal();
  out.makeCompressed();
  return out;
}

TransitionMatrix transition_matrix(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                                   const DistributionTable& dist, const MatrixCaps& caps) {
  const std::size_t N = dist.size();
  if (N > caps.sparse_cap)
    throw CapacityError("transition matrix needs " + std::to_string(N) + " states, sparse cap is " +
                        std::to_string(caps.sparse_cap));
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < N; ++i)
    for (const auto& m : transitions(tree, lists, spec, dist.state(i)))
      trip.emplace_back(static_cast<int>(i), static_cast<int>(dist.require_index(m.next)), m.probability);
  TransitionMatrix T;
  T.kind = spec.kind;
  T.num_edges = tree.num_edges();
  T.P.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  T.P.setFromTriplets(trip.begin(), trip.end());
  T.P.makeCompressed();
  T.pi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(N), 1.0 / static_cast<double>(N));
  T.reversible = detailed_balance_error(T) < 1e-12;
  return T;
}

double row_sum_error(const TransitionMatrix& T) {
  double err = 0;
  for (Eigen::Index i = 0; i < T.P.outerSize(); ++i) {
    double s = 0;
    for (SparseMatrix::InnerIterator it(T.P, i); it; ++it) s += it.value();
    err = std::max(err, std::abs(s - 1));
  }
  return err;
}

double detailed_balance_error(const TransitionMatrix& T) {
  // Flow matrix D P against its transpose.
  const SparseMatrix F = T.pi.asDiagonal() * T.P;
  const SparseMatrix diff = F - SparseMatrix(F.transpose());
  double err = 0;
  for (Eigen::Index i = 0; i < diff.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(diff, i); it; ++it) err = std::max(err, std::abs(it.value()));
  return err;
}

double stationarity_error(const TransitionMatrix& T) {
  const Eigen::VectorXd piP = (T.pi.transpose() * T.P).transpose();
  return (piP - T.pi).cwiseAbs().maxCoeff();
}

bool is_irreducible(const TransitionMatrix& T) {
  const Eigen::Index N = T.size();
  if (N == 0) return false;
  auto reach = [N](const SparseMatrix& M) {
    std::vector<bool> seen(static_cast<std::size_t>(N), false);
    std::deque<Eigen::Index> queue{0};
    seen[0] = true;
    Eigen::Index count = 1;
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (SparseMatrix::InnerIterator it(M, i); it; ++it) {
        if (it.value() <= 0 || seen[static_cast<std::size_t>(it.col())]) continue;
        seen[static_cast<std::size_t>(it.col())] = true;
        ++count;
        queue.push_back(it.col());
      }
    }
    return count == N;
  };
  return reach(T.P) && reach(SparseMatrix(T.P.transpose()));
}

std::vector<double> spectrum(const TransitionMatrix& T, const MatrixCaps& caps) {
  const Eigen::MatrixXd S = Eigen::MatrixXd(T.symmetrized());
  if (static_cast<std::size_t>(S.rows()) > caps.dense_cap)
    throw CapacityError("dense spectrum needs " + std::to_string(S.rows()) + " states, cap is " +
                        std::to_string(caps.dense_cap));
  const Eigen::MatrixXd Ssym = (S + S.transpose()) / 2;
  return symmetric_eigenvalues(Ssym, caps.jacobi_cap);
}

SpectralReport spectral_report(const TransitionMatrix& T, const SpectralOptions& opt) {
  if (!is_irreducible(T)) throw DomainError("chain is not irreducible on the enumerated state space");
  const auto N = static_cast<std::size_t>(T.size());
  SpectralReport r;
  if (N == 1) {
    r.method = "trivial";
  } else if (N <= opt.caps.dense_cap && !opt.force_sparse) {
    const auto ev = spectrum(T, opt.caps);
    r.lambda2 = ev[N - 2];
    r.lambda_min = ev[0];
    r.method = N <= opt.caps.jacobi_cap ? "dense-jacobi" : "dense-lapack";
  } else {
    const SparseMatrix S = T.symmetrized();
    const Eigen::VectorXd u = T.pi.cwiseSqrt().normalized();
    const auto dim = static_cast<Eigen::Index>(N);
    const LinearOp plus = [&S](const Eigen::VectorXd& v, Eigen::VectorXd& w) { w = 0.5 * (v + S * v); };
    const LinearOp minus = [&S](const Eigen::VectorXd& v, Eigen::VectorXd& w) { w = 0.5 * (v - S * v); };
    const auto top = power_iteration(plus, dim, {u}, opt.power);
    const auto bottom = power_iteration(minus, dim, {u}, opt.power);
    if (!top.converged || !bottom.converged) throw std::runtime_error("power iteration did not converge");
    r.lambda2 = 2 * top.value - 1;
    r.lambda_min = 1 - 2 * bottom.value;
    r.iterations = top.iterations + bottom.iterations;
    r.method = "sparse-power";
  }
  const double lambda_star = std::max(r.lambda2, std::abs(r.lambda_min));
  r.gap = 1 - lambda_star;
  r.t_rel = 1 / r.gap;
  if (T.kind == ChainKind::heatbath_glauber && r.lambda_min < -1e-9)
    throw VerificationFailure("heat-bath Glauber has eigenvalue " + std::to_string(r.lambda_min) + " < -1e-9");
  return r;
}

double worst_tv(const Eigen::MatrixXd& Pt, const Eigen::VectorXd& pi) {
  double worst = 0;
  for (Eigen::Index x = 0; x < Pt.rows(); ++x)
    worst = std::max(worst, 0.5 * (Pt.row(x).transpose() - pi).cwiseAbs().sum());
  return worst;
}

std::uint64_t mixing_time(const TransitionMatrix& T, double eps, const MatrixCaps& caps, std::uint64_t t_cap) {
  if (eps >= 1) return 0;
  if (eps <= 0) throw ParameterError("mixing time needs eps > 0");
  const auto N = static_cast<std::size_t>(T.size());
  if (N > caps.mixing_cap)
    throw CapacityError("mixing time needs " + std::to_string(N) + " states, cap is " + std::to_string(caps.mixing_cap));
  // d(0) = 1 - min pi
  if (1 - T.pi.minCoeff() <= eps) return 0;
  std::vector<Eigen::MatrixXd> powers{T.dense(caps.mixing_cap)};  // powers[j] = P^{2^j}
  while (worst_tv(powers.back(), T.pi) > eps) {
    if ((std::uint64_t{1} << powers.size()) > t_cap)
      throw CapacityError("mixing time exceeds " + std::to_string(t_cap) + " steps");
    const Eigen::MatrixXd& last = powers.back();
    powers.push_back(last * last);
  }
  const std::size_t k = powers.size() - 1;
  if (k == 0) return 1;
  // d(2^{k-1}) > eps >= d(2^k); find the largest t with d(t) > eps.
  Eigen::MatrixXd cur = powers[k - 1];
  std::uint64_t t = std::uint64_t{1} << (k - 1);
  for (std::size_t j = k - 1; j-- > 0;) {
    Eigen::MatrixXd cand = cur * powers[j];
    if (worst_tv(cand, T.pi) > eps) {
      cur = std::move(cand);
      t += std::uint64_t{1} << j;
    }
  }
  return t + 1;
}

double conductance(const TransitionMatrix& T, std::span<const std::size_t> S) {
  if (S.empty()) throw ParameterError("conductance of an empty set");
  std::vector<bool> in(static_cast<std::size_t>(T.size()), false);
  for (auto x : S) in.at(x) = true;
  double flow = 0, mass = 0;
  for (auto x : S) {
    const auto xi = static_cast<Eigen::Index>(x);
    mass += T.pi[xi];
    for (SparseMatrix::InnerIterator it(T.P, xi); it; ++it)
      if (!in[static_cast<std::size_t>(it.col())]) flow += T.pi[xi] * it.value();
  }
  return flow / mass;
}

CutResult conductance_star(const TransitionMatrix& T, const DistributionTable& dist,
                           const std::vector<std::vector<std::size_t>>& extra_cuts) {
  CutResult best{std::numeric_limits<double>::infinity(), 0, ""};
  const double N = static_cast<double>(dist.size());
  auto consider = [&](std::vector<std::size_t> S, const std::string& label) {
    if (S.empty() || S.size() == dist.size()) return;
    double mass = static_cast<double>(S.size()) / N;
    if (mass > 0.5) {
      std::vector<bool> in(dist.size(), false);
      for (auto x : S) in[x] = true;
      std::vector<std::size_t> comp;
      for (std::size_t x = 0; x < dist.size(); ++x)
        if (!in[x]) comp.push_back(x);
      S = std::move(comp);
      mass = static_cast<double>(S.size()) / N;
    }
    const double phi = conductance(T, S);
    if (phi < best.phi) best = {phi, mass, label};
  };
  for (std::size_t e = 0; e < dist.num_edges(); ++e) {
    for (Color c : dist.lists().list(static_cast<EdgeId>(e))) {
      std::vector<std::size_t> S;
      for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist.state(i)[e] == c) S.push_back(i);
      if (static_cast<double>(S.size()) / N > 0.5) continue;
      consider(std::move(S), "edge " + std::to_string(e) + " color " + std::to_string(int{c}));
    }
  }
  for (std::size_t k = 0; k < extra_cuts.size(); ++k) consider(extra_cuts[k], "cut " + std::to_string(k));
  return best;
}

namespace {

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

double frozen_formula(int delta, int q) {
  // Delta! (Delta-1)! / ((2 Delta - q)! (q-1)!)
  if (2 * delta - q < 0) return 0;
  return factorial(delta) * factorial(delta - 1) / (factorial(2 * delta - q) * factorial(q - 1));
}

double frozen_probability(int delta, int q) {
  // C(Delta-1, 2Delta-1-q) / C(q-1, Delta-1): the q-Delta colors missing at v must sit
  // among the Delta-1 colors at u other than sigma_e.
  if (2 * delta - 1 - q < 0) return 0;
  return factorial(delta - 1) * factorial(delta - 1) / (factorial(2 * delta - 1 - q) * factorial(q - 1));
}

LowerBoundRecord lower_bound_check(const Tree& tree, EdgeId e, int q, const SpectralOptions& opt) {
  const int delta = tree.max_degree();
  const Edge& ed = tree.edge(e);
  if (tree.degree(ed.parent) != delta || tree.degree(ed.child) != delta)
    throw ParameterError("both endpoints of the edge must have maximum degree");
  if (q < delta + 1 || q > 2 * delta) throw ParameterError("lower bound needs Delta+1 <= q <= 2 Delta");
  const auto lists = ListSpec::uniform(tree, q);
  const auto dist = enumerate_colorings(tree, lists);
  LowerBoundRecord r;
  r.delta = delta;
  r.q = q;
  r.n = tree.num_edges();
  std::size_t pinned = 0, frozen = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    auto s = dist.state(i);
    if (s[e] != 1) continue;
    ++pinned;
    if (mask_size(available_mask(tree, lists, s, e)) <= 1) ++frozen;
  }
  r.p_frozen_exact = static_cast<double>(frozen) / static_cast<double>(pinned);
  r.p_frozen_formula = frozen_formula(delta, q);
  r.p_frozen_counted = frozen_probability(delta, q);
  r.trel_bound = static_cast<double>(r.n) * delta / (2.0 * (q - delta) * (q - delta));
  const auto T = transition_matrix(tree, lists, ChainSpec::heatbath_glauber(), dist, opt.caps);
  r.t_rel = spectral_report(T, opt).t_rel;
  r.phi_cut = conductance_star(T, dist).phi;
  r.probabilities_agree = std::abs(r.p_frozen_exact - r.p_frozen_formula) <= 1e-12;
  r.counted_agree = std::abs(r.p_frozen_exact - r.p_frozen_counted) <= 1e-12;
  r.trel_ok = r.t_rel >= r.trel_bound;
  r.cheeger_lower_ok = r.phi_cut * r.phi_cut / 2 <= 1 / r.t_rel;
  r.cheeger_upper_ok = 1 / r.t_rel <= 2 * r.phi_cut;
  return r;
}

std::string to_json(const SpectralReport& r, ChainKind kind, const std::string& tree_desc, int q, std::size_t N,
                    std::optional<std::uint64_t> t_mix_quarter) {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["tree"] = tree_desc;
  j["q"] = q;
  j["N"] = N;
  j["lambda2"] = r.lambda2;
  j["lambda_min"] = r.lambda_min;
  j["t_rel"] = r.t_rel;
  j["t_mix_quarter"] = t_mix_quarter ? nlohmann::json(*t_mix_quarter) : nlohmann::json(nullptr);
  j["method"] = r.method;
  return j.dump(2);
}

}  // namespace treecolor
