#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <json.hpp>

#include "treecolor/canonical.hpp"
#include "treecolor/errors.hpp"

namespace treecolor {

namespace {

std::vector<std::pair<Color, Color>> ordered_root_pairs(const ListSpec& lists) {
  std::vector<std::pair<Color, Color>> out;
  for (Color a : lists.list(0))
    for (Color b : lists.list(0))
      if (a != b) out.emplace_back(a, b);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

UsageTable usage_table(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist, Color a,
                       Color b) {
  const Coupling cp = flip_coupling(tree, dist, a, b);
  UsageTable out;
  out.a = a;
  out.b = b;
  out.weight = cp.weight;
  for (const auto& [si, ti] : cp.pairs) {
    const CanonicalPath path = canonical_path(family, tree, lists, dist.state(si), b);
    std::size_t from = si;
    for (std::size_t k = 0; k < path.steps.size(); ++k) {
      const std::size_t to = dist.require_index(path.states[k + 1]);
      const TransitionKey key{from, to};
      ++out.count[key];
      out.block.emplace(key, path.steps[k].block);
      from = to;
    }
  }
  return out;
}

double r_ab(const Tree& tree, const DistributionTable& dist, const UsageTable& usage) {
  const int ell = tree.max_level();
  double sum = 0;
  for (const auto& [key, n] : usage.count) {
    const Block& blk = usage.block.at(key);
    if (blk.size() == 1 && tree.level(blk[0]) == ell) sum += static_cast<double>(n) * static_cast<double>(n);
  }
  return sum / static_cast<double>(dist.size());
}

CongestionReport congestion(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist) {
  CongestionReport rep;
  rep.delta = tree.max_degree();
  rep.q = lists.q();
  rep.ell = tree.max_level();
  rep.family = family;
  rep.xi.assign(rep.ell + 1, 0.0);
  const double mu = 1.0 / static_cast<double>(dist.size());
  for (const auto& [a, b] : ordered_root_pairs(lists)) {
    const UsageTable usage = usage_table(family, tree, lists, dist, a, b);
    CongestionReport::PerPair pp{a, b, std::vector<double>(rep.ell + 1, 0.0), 0.0, 0.0};
    for (const auto& [key, n] : usage.count) {
      const Block& blk = usage.block.at(key);
      const auto from = dist.state(key.from);
      const double rate = blk.size() == 1
                              ? 1.0 / mask_size(available_mask(tree, lists, from, blk[0]))
                              : 1.0 / static_cast<double>(consistent_assignments(tree, lists, from, blk).size());
      const double p = static_cast<double>(n) * usage.weight;
      const double term = p * p / (mu * rate);
      if (blk.size() == 1)
        pp.xi[tree.level(blk[0])] += term;
      else
        pp.xi_A += term;
    }
    pp.r_ab = r_ab(tree, dist, usage);
    for (int t = 0; t <= rep.ell; ++t) rep.xi[t] = std::max(rep.xi[t], pp.xi[t]);
    rep.xi_A = std::max(rep.xi_A, pp.xi_A);
    rep.pairs.push_back(std::move(pp));
  }
  return rep;
}

std::string CongestionReport::to_json() const {
  nlohmann::json j;
  j["Delta"] = delta;
  j["q"] = q;
  j["ell"] = ell;
  j["kind"] = treecolor::to_string(family);
  j["xi"] = xi;
  j["xi_A"] = xi_A;
  auto& table = j["r_ab"] = nlohmann::json::array();
  for (const auto& p : pairs)
    table.push_back({{"a", p.a}, {"b", p.b}, {"r_ab", p.r_ab}, {"xi", p.xi}, {"xi_A", p.xi_A}});
  return j.dump(2);
}

GammaStats gamma_stats(const Tree& tree, const ListSpec& lists, std::span<const Color> gamma, Color a, Color b) {
  Color x, y;
  if (gamma[0] == a) {
    x = a;
    y = b;
  } else if (gamma[0] == b) {
    x = b;
    y = a;
  } else {
    throw ParameterError(fmt::format("gamma(r) = {} is neither {} nor {}", gamma[0], a, b));
  }
  const int ell = tree.max_level();
  GammaStats st;
  const auto spine = alternating_path(tree, gamma, 0, y);
  st.S = static_cast<int>(spine.size()) - 1;
  st.Z = st.S >= ell - 1 ? 1 : 0;
  st.P_i.assign(spine.size(), 0);
  const auto order = color_order(lists.q(), x, y);
  for (std::size_t i = 1; i < spine.size(); i += 2) {
    const BranchPlan bp = build_branch(tree, lists, gamma, spine, i, x, y, order);
    const bool deep =
        std::any_of(bp.branch.begin(), bp.branch.end(), [&](EdgeId e) { return tree.level(e) == ell - 1; });
    st.P_i[i] = deep ? 1 : 0;
    st.P += st.P_i[i];
  }
  return st;
}

LeafLoadResult leaf_load_check(const Tree& tree, const ListSpec& lists, const DistributionTable& dist) {
  const int ell = tree.max_level();
  const double two_delta = 2.0 * tree.max_degree();
  LeafLoadResult out;
  for (const auto& [a, b] : ordered_root_pairs(lists)) {
    const UsageTable usage = usage_table(PathFamily::glauber, tree, lists, dist, a, b);
    std::vector<double> lhs(dist.size(), 0.0);
    for (const auto& [key, n] : usage.count) {
      const Block& blk = usage.block.at(key);
      if (blk.size() == 1 && tree.level(blk[0]) == ell)
        lhs[key.from] += static_cast<double>(n) * static_cast<double>(n);
    }
    for (std::size_t g = 0; g < dist.size(); ++g) {
      const auto gamma = dist.state(g);
      ++out.checked;
      double bound = 0;
      if (gamma[0] == a || gamma[0] == b) {
        const GammaStats st = gamma_stats(tree, lists, gamma, a, b);
        const int k = st.P + st.Z;
        bound = 2.0 * k * std::pow(two_delta, 2 * k);
      }
      if (bound > 0) out.max_ratio = std::max(out.max_ratio, lhs[g] / bound);
      if (lhs[g] > bound + 1e-9) {
        ++out.violations;
        if (out.first_violation.empty())
          out.first_violation =
              fmt::format("gamma {} (a={}, b={}): lhs {} > bound {}", format_colors(gamma), a, b, lhs[g], bound);
      }
    }
  }
  return out;
}

double spine_probability_bound(int delta, int ell, int s, int x) {
  double v = std::pow(1.0 - 1.0 / delta, s) * binomial((s + 1) / 2, x);
  for (int i = 1; i <= x; ++i) v *= std::pow(1.0 - 2.0 / delta, ell + 2 * i - s - 3);
  return v;
}

std::vector<SpineProbabilityRow> spine_probability_check(const Tree& tree, const ListSpec& lists, const DistributionTable& dist) {
  const int ell = tree.max_level();
  const int delta = tree.max_degree();
  std::vector<SpineProbabilityRow> rows;
  for (const auto& [a, b] : ordered_root_pairs(lists)) {
    std::map<std::pair<int, int>, std::size_t> hist;
    std::size_t in_ab = 0;
    for (std::size_t g = 0; g < dist.size(); ++g) {
      const auto gamma = dist.state(g);
      if (gamma[0] != a && gamma[0] != b) continue;
      ++in_ab;
      const GammaStats st = gamma_stats(tree, lists, gamma, a, b);
      ++hist[{st.S, st.P}];
    }
    for (int s = 0; s <= ell; ++s)
      for (int x = 0; x <= (ell + 1) / 2; ++x) {
        SpineProbabilityRow row{a, b, s, x, 0, 0, spine_probability_bound(delta, ell, s, x), false, true};
        if (auto it = hist.find({s, x}); it != hist.end()) {
          row.joint = static_cast<double>(it->second) / static_cast<double>(dist.size());
          row.conditional = static_cast<double>(it->second) / static_cast<double>(in_ab);
        }
        row.skipped = x >= 1 && ell - s - 1 < 0;
        row.ok = row.skipped || row.conditional <= row.bound + 1e-12;
        rows.push_back(row);
      }
  }
  return rows;
}

RoutingBound routing_bound_ell1(int delta) {
  if (delta < 2) throw ParameterError("routing bound needs Delta >= 2");
  const Tree tree = Tree::hanging_root(delta, 1);
  const int q = delta + 1;
  const ListSpec lists = ListSpec::star_root(tree, q);
  const DistributionTable dist = enumerate_colorings(tree, lists);
  RoutingBound out;
  out.delta = delta;
  out.expected_steps.assign(2, 0.0);
  out.multiplicity.assign(2, 0);

  std::map<std::pair<std::size_t, EdgeId>, std::size_t> uses;
  Coloring pin(tree.num_edges(), 0);
  pin[0] = 1;
  const auto starts = dist.matching(pin);
  for (std::size_t si : starts) {
    const Coloring sigma = dist.coloring(si);
    const auto ap = alternating_path(tree, sigma, 0, 2);
    std::vector<std::pair<Coloring, EdgeId>> steps;  // (state before, edge)
    if (ap.size() == 1) {
      steps.emplace_back(sigma, 0);
    } else {
      const EdgeId h = ap[1];
      const ColorMask other = available_mask(tree, lists, sigma, h) & ~color_bit(sigma[h]);
      if (mask_size(other) != 1)
        throw VerificationFailure(fmt::format("level-1 edge {} has {} spare colors", h, mask_size(other)));
      Coloring s1 = sigma;
      s1[h] = mask_colors(other).front();
      Coloring s2 = s1;
      s2[0] = 2;
      steps.emplace_back(sigma, h);
      steps.emplace_back(s1, 0);
      steps.emplace_back(s2, h);
    }
    for (const auto& [rho, e] : steps) {
      out.expected_steps[tree.level(e)] += 1.0;
      ++uses[{dist.require_index(rho), e}];
    }
  }
  for (double& v : out.expected_steps) v /= static_cast<double>(starts.size());
  for (const auto& [key, n] : uses) {
    const int t = tree.level(key.second);
    out.multiplicity[t] = std::max(out.multiplicity[t], n);
  }
  out.alpha.resize(2);
  for (int t = 0; t < 2; ++t) out.alpha[t] = 2.0 * 2 * out.expected_steps[t] * static_cast<double>(out.multiplicity[t]);
  out.certified = out.alpha[0] <= 4.0 * delta + 1e-12 && out.alpha[1] <= 8.0 + 1e-12;
  return out;
}

}  // namespace treecolor
