#include "treecolor/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "treecolor/errors.hpp"

namespace treecolor {

DistributionTable::DistributionTable(std::size_t num_edges, std::vector<Color> flat, ListSpec lists,
                                     std::string tree_hash)
    : num_edges_(num_edges), data_(std::move(flat)), lists_(std::move(lists)), tree_hash_(std::move(tree_hash)) {
  if (num_edges_ == 0 || data_.size() % num_edges_ != 0) throw ParameterError("malformed state table");
}

Coloring DistributionTable::coloring(std::size_t i) const {
  auto s = state(i);
  return {s.begin(), s.end()};
}

std::optional<std::size_t> DistributionTable::index_of(std::span<const Color> c) const {
  if (c.size() != num_edges_) return std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    auto s = state(mid);
    if (std::lexicographical_compare(s.begin(), s.end(), c.begin(), c.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::ranges::equal(state(lo), c)) return lo;
  return std::nullopt;
}

std::size_t DistributionTable::require_index(std::span<const Color> c) const {
  auto i = index_of(c);
  if (!i) throw ParameterError("coloring " + format_colors(c) + " is not in the support");
  return *i;
}

std::vector<std::size_t> DistributionTable::matching(std::span<const Color> pinned) const {
  if (pinned.size() != num_edges_) throw ParameterError("pinning size does not match");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto s = state(i);
    bool ok = true;
    for (std::size_t e = 0; e < num_edges_ && ok; ++e) ok = pinned[e] == 0 || pinned[e] == s[e];
    if (ok) out.push_back(i);
  }
  return out;
}

DistributionTable DistributionTable::conditional(std::span<const Color> pinned) const {
  const auto idx = matching(pinned);
  if (idx.empty()) throw InfeasiblePinning("pinning " + format_colors(pinned) + " has no extension");
  std::vector<Color> flat;
  flat.reserve(idx.size() * num_edges_);
  for (auto i : idx) {
    auto s = state(i);
    flat.insert(flat.end(), s.begin(), s.end());
  }
  std::vector<ColorMask> masks;
  for (std::size_t e = 0; e < num_edges_; ++e)
    masks.push_back(pinned[e] != 0 ? color_bit(pinned[e]) : lists_.mask(static_cast<EdgeId>(e)));
  return DistributionTable(num_edges_, std::move(flat), ListSpec::custom(lists_.q(), std::move(masks)), tree_hash_);
}

std::map<std::vector<Color>, double> DistributionTable::marginal(std::span<const EdgeId> S) const {
  if (S.empty()) throw ParameterError("marginal over an empty edge set");
  std::map<std::vector<Color>, double> out;
  const double w = 1.0 / static_cast<double>(size());
  std::vector<Color> key(S.size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto s = state(i);
    for (std::size_t j = 0; j < S.size(); ++j) key[j] = s[S[j]];
    out[key] += w;
  }
  return out;
}

std::string DistributionTable::to_json(bool with_states) const {
  nlohmann::json j;
  j["tree_hash"] = tree_hash_;
  nlohmann::json lists = nlohmann::json::object();
  lists["q"] = lists_.q();
  lists["preset"] = lists_.preset_name();
  nlohmann::json per_edge = nlohmann::json::array();
  for (std::size_t e = 0; e < num_edges_; ++e) {
    nlohmann::json l = nlohmann::json::array();
    for (Color c : lists_.list(static_cast<EdgeId>(e))) l.push_back(int{c});
    per_edge.push_back(l);
  }
  lists["edges"] = per_edge;
  j["lists"] = lists;
  j["size"] = size();
  if (with_states) {
    nlohmann::json states = nlohmann::json::array();
    for (std::size_t i = 0; i < size(); ++i) {
      nlohmann::json s = nlohmann::json::array();
      for (Color c : state(i)) s.push_back(int{c});
      states.push_back(s);
    }
    j["states"] = states;
  }
  return j.dump(2);
}

namespace {

// Number of ways to color `children` with distinct list colors outside `forbidden`,
// weighting each child color by f[child][color].
BigInt extensions(std::span<const EdgeId> children, ColorMask forbidden, const ListSpec& lists,
                  const std::vector<std::vector<BigInt>>& f) {
  std::map<ColorMask, BigInt> layer{{forbidden, BigInt(1)}};
  for (EdgeId ch : children) {
    std::map<ColorMask, BigInt> next;
    for (const auto& [used, ways] : layer) {
      for (Color c : mask_colors(lists.mask(ch) & ~used)) {
        const BigInt& below = f[ch][c];
        if (below == 0) continue;
        next[used | color_bit(c)] += ways * below;
      }
    }
    layer = std::move(next);
  }
  BigInt total = 0;
  for (const auto& kv : layer) total += kv.second;
  return total;
}

}  // namespace

BigInt count_colorings(const Tree& tree, const ListSpec& lists) {
  if (lists.num_edges() != tree.num_edges()) throw ParameterError("lists do not match tree");
  const std::size_t E = tree.num_edges();
  std::vector<std::vector<BigInt>> f(E, std::vector<BigInt>(static_cast<std::size_t>(lists.q()) + 1, 0));
  for (std::size_t i = E; i-- > 0;) {
    const auto e = static_cast<EdgeId>(i);
    for (Color c : lists.list(e)) f[e][c] = extensions(tree.child_edges(e), color_bit(c), lists, f);
  }
  return extensions(tree.edges_below(tree.root()), 0, lists, f);
}

DistributionTable enumerate_colorings(const Tree& tree, const ListSpec& lists, std::size_t cap) {
  const BigInt estimate = count_colorings(tree, lists);
  if (estimate > cap) {
    std::ostringstream os;
    os << "enumeration needs " << estimate << " states, cap is " << cap;
    throw CapacityError(os.str());
  }
  const std::size_t E = tree.num_edges();
  const auto n = estimate.convert_to<std::size_t>();
  std::vector<Color> flat;
  flat.reserve(n * E);

  // Earlier neighbors of e are its parent edge and earlier siblings.
  std::vector<std::vector<EdgeId>> earlier(E);
  for (EdgeId e = 0; e < E; ++e)
    for (EdgeId f : tree.neighbors(e))
      if (f < e) earlier[e].push_back(f);

  Coloring cur(E, 0);
  std::vector<ColorMask> remaining(E, 0);
  auto options = [&](EdgeId e) {
    ColorMask m = lists.mask(e);
    for (EdgeId f : earlier[e]) m &= ~color_bit(cur[f]);
    return m;
  };
  std::size_t depth = 0;
  remaining[0] = options(0);
  for (;;) {
    if (remaining[depth] == 0) {
      cur[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    const auto c = static_cast<Color>(std::countr_zero(remaining[depth]));
    remaining[depth] &= remaining[depth] - 1;
    cur[depth] = c;
    if (depth + 1 == E) {
      flat.insert(flat.end(), cur.begin(), cur.end());
      continue;
    }
    ++depth;
    remaining[depth] = options(static_cast<EdgeId>(depth));
  }
  if (flat.size() != n * E) throw VerificationFailure("enumeration disagrees with the dynamic-programming count");
  return DistributionTable(E, std::move(flat), lists, tree.content_hash());
}

double conditional_independence_error(const Tree& tree, const DistributionTable& dist,
                                       std::span<const EdgeId> A, std::span<const EdgeId> B,
                                       std::span<const EdgeId> C) {
  // Separation: no line-graph path from A to B avoiding C.
  std::vector<int> tag(tree.num_edges(), 0);
  for (EdgeId e : C) tag.at(e) = 3;
  for (EdgeId e : A) {
    if (tag.at(e) != 0) throw ParameterError("A, B, C must be disjoint");
    tag[e] = 1;
  }
  for (EdgeId e : B) {
    if (tag.at(e) != 0) throw ParameterError("A, B, C must be disjoint");
    tag[e] = 2;
  }
  std::vector<bool> seen(tree.num_edges(), false);
  std::deque<EdgeId> queue(A.begin(), A.end());
  for (EdgeId e : A) seen[e] = true;
  while (!queue.empty()) {
    const EdgeId e = queue.front();
    queue.pop_front();
    for (EdgeId f : tree.neighbors(e)) {
      if (seen[f] || tag[f] == 3) continue;
      if (tag[f] == 2) throw ParameterError("C does not separate A from B");
      seen[f] = true;
      queue.push_back(f);
    }
  }

  struct Group {
    double total = 0;
    std::map<std::vector<Color>, double> ab, a, b;
  };
  std::map<std::vector<Color>, Group> groups;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    auto s = dist.state(i);
    std::vector<Color> kc, ka, kb;
    for (EdgeId e : C) kc.push_back(s[e]);
    for (EdgeId e : A) ka.push_back(s[e]);
    for (EdgeId e : B) kb.push_back(s[e]);
    auto kab = ka;
    kab.insert(kab.end(), kb.begin(), kb.end());
    Group& g = groups[kc];
    g.total += 1;
    g.ab[kab] += 1;
    g.a[ka] += 1;
    g.b[kb] += 1;
  }
  double err = 0;
  for (auto& [kc, g] : groups) {
    for (const auto& [ka, na] : g.a) {
      for (const auto& [kb, nb] : g.b) {
        auto kab = ka;
        kab.insert(kab.end(), kb.begin(), kb.end());
        const auto it = g.ab.find(kab);
        const double joint = it == g.ab.end() ? 0.0 : it->second / g.total;
        err = std::max(err, std::abs(joint - (na / g.total) * (nb / g.total)));
      }
    }
  }
  return err;
}

}  // namespace treecolor
