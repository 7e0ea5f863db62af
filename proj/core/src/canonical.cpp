#include "treecolor/canonical.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>
#include <tuple>

#include "treecolor/errors.hpp"

namespace treecolor {

namespace {

Color first_in(ColorMask m, std::span<const Color> order) {
  for (Color c : order)
    if (m & color_bit(c)) return c;
  return 0;
}

void require_root_color(std::span<const Color> sigma, Color b) {
  if (sigma.empty()) throw ParameterError("empty coloring");
  if (sigma[0] == b) throw ParameterError("sigma(r) must differ from b");
}

void push_step(CanonicalPath& path, Block block, Stage stage, Coloring next) {
  path.steps.push_back({std::move(block), stage});
  path.states.push_back(std::move(next));
}

// Applies the plan from the current last state, one edge per step.
void run_stage_one(CanonicalPath& path, const StageOnePlan& plan) {
  for (std::size_t k = 0; k < plan.order.size(); ++k) {
    Coloring next = path.states.back();
    next[plan.order[k]] = plan.new_color[k];
    push_step(path, {plan.order[k]}, Stage::one, std::move(next));
  }
}

void run_stage_three(CanonicalPath& path, const StageOnePlan& plan, std::span<const Color> tau) {
  for (auto it = plan.order.rbegin(); it != plan.order.rend(); ++it) {
    Coloring next = path.states.back();
    next[*it] = tau[*it];
    push_step(path, {*it}, Stage::three, std::move(next));
  }
}

CanonicalPath three_stage_path(const Tree& tree, const ListSpec& lists, std::span<const Color> sigma, Color b) {
  const Color a = sigma[0];
  const auto order = color_order(lists.q(), a, b);
  const StageOnePlan plan = plan_stage_one(tree, lists, sigma, a, b, 1, order);
  const Coloring tau = flip(tree, sigma, 0, b);

  CanonicalPath path;
  path.a = a;
  path.b = b;
  path.states.emplace_back(sigma.begin(), sigma.end());
  run_stage_one(path, plan);
  for (std::size_t i = 0; i < plan.spine.size(); i += 2) {
    Coloring next = path.states.back();
    next[plan.spine[i]] = b;
    push_step(path, {plan.spine[i]}, Stage::two, std::move(next));
  }
  run_stage_three(path, plan, tau);
  return path;
}

}  // namespace

std::vector<Color> color_order(int q, Color a, Color b) {
  if (a == b) throw ParameterError("color_order needs a != b");
  std::vector<Color> out;
  for (int c = 1; c <= q; ++c)
    if (c != a && c != b) out.push_back(static_cast<Color>(c));
  out.push_back(a);
  out.push_back(b);
  return out;
}

std::string to_string(PathFamily f) { return f == PathFamily::glauber ? "glauber" : "edge_dynamics"; }

Coupling flip_coupling(const Tree& tree, const DistributionTable& dist, Color a, Color b) {
  const ListSpec& lists = dist.lists();
  if (a == b) throw ParameterError("flip coupling needs a != b");
  if (!lists.allows(0, a) || !lists.allows(0, b))
    throw ParameterError(fmt::format("colors {} and {} must both be in the root list", a, b));
  Coupling out;
  out.a = a;
  out.b = b;
  Coloring pin(dist.num_edges(), 0);
  pin[0] = a;
  for (std::size_t i : dist.matching(pin)) {
    const Coloring tau = flip(tree, dist.state(i), 0, b);
    out.pairs.emplace_back(i, dist.require_index(tau));
  }
  if (out.pairs.empty()) throw ParameterError("no coloring has the requested root color");
  out.weight = 1.0 / static_cast<double>(out.pairs.size());
  return out;
}

BranchPlan build_branch(const Tree& tree, const ListSpec& lists, std::span<const Color> x, std::span<const EdgeId> spine,
                        std::size_t j, Color a, Color b, std::span<const Color> order) {
  const int q = lists.q();
  BranchPlan bp;
  bp.index = j;
  bp.spine_edge = spine[j];
  const EdgeId e = spine[j];
  const ColorMask other = available_mask(tree, lists, x, e) & ~color_bit(a) & ~color_bit(b);
  if (other) {
    bp.spine_new = first_in(other, order);
    return bp;
  }
  const Edge& ed = tree.edge(e);
  const Color cj = first_in(free_at_vertex(tree, q, x, ed.child), order);
  if (cj == 0) throw VerificationFailure(fmt::format("vertex {} has no free color", ed.child));
  EdgeId h = e;
  for (EdgeId f : tree.incident(ed.parent))
    if (f != e && x[f] == cj) h = f;
  if (h == e) throw VerificationFailure(fmt::format("no edge colored {} at vertex {}", cj, ed.parent));
  if (std::find(spine.begin(), spine.end(), h) != spine.end())
    throw VerificationFailure(fmt::format("branch of e_{} runs into the alternating path at edge {}", j, h));

  bp.branch.push_back(h);
  while (mask_size(available_mask(tree, lists, x, h)) < 2) {
    const Edge& hd = tree.edge(h);
    const Color c = first_in(free_at_vertex(tree, q, x, hd.parent), order);
    EdgeId next = h;
    for (EdgeId f : tree.edges_below(hd.child))
      if (x[f] == c) next = f;
    if (next == h) throw VerificationFailure(fmt::format("branch of e_{} stuck at edge {}", j, h));
    bp.branch.push_back(next);
    h = next;
  }
  const std::size_t t = bp.branch.size();
  bp.branch_new.resize(t);
  const EdgeId last = bp.branch.back();
  bp.branch_new[t - 1] = first_in(available_mask(tree, lists, x, last) & ~color_bit(x[last]), order);
  for (std::size_t k = 0; k + 1 < t; ++k) bp.branch_new[k] = x[bp.branch[k + 1]];
  bp.spine_new = x[bp.branch.front()];
  return bp;
}

StageOnePlan plan_stage_one(const Tree& tree, const ListSpec& lists, std::span<const Color> x, Color a, Color b,
                            int parity, std::span<const Color> order) {
  if (x[0] != a) throw ParameterError("stage-I start must have sigma(r) = a");
  StageOnePlan plan;
  plan.spine = alternating_path(tree, x, 0, b);
  for (std::size_t j = 1; j < plan.spine.size(); ++j)
    if (static_cast<int>(j % 2) == parity)
      plan.branches.push_back(build_branch(tree, lists, x, plan.spine, j, a, b, order));

  // (level descending, spine last, id) -> new color
  std::vector<std::tuple<int, int, EdgeId, Color>> items;
  for (const auto& bp : plan.branches) {
    items.emplace_back(-tree.level(bp.spine_edge), 1, bp.spine_edge, bp.spine_new);
    for (std::size_t k = 0; k < bp.branch.size(); ++k)
      items.emplace_back(-tree.level(bp.branch[k]), 0, bp.branch[k], bp.branch_new[k]);
  }
  std::sort(items.begin(), items.end());
  for (size_t k = 1; k < items.size(); ++k)
    if (std::get<2>(items[k]) == std::get<2>(items[k - 1]))
      throw VerificationFailure(fmt::format("edge {} lies on two branch paths", std::get<2>(items[k])));
  for (const auto& [lv, sp, e, c] : items) {
    plan.order.push_back(e);
    plan.new_color.push_back(c);
  }
  return plan;
}

CanonicalPath glauber_canonical_path(const Tree& tree, const ListSpec& lists, std::span<const Color> sigma, Color b) {
  if (lists.q() != tree.max_degree() + 2)
    throw UnsupportedRegime(fmt::format("Glauber canonical paths need q = Delta + 2 (q = {}, Delta = {})", lists.q(),
                                        tree.max_degree()));
  require_root_color(sigma, b);
  return three_stage_path(tree, lists, sigma, b);
}

CanonicalPath edge_dynamics_canonical_path(const Tree& tree, const ListSpec& lists, std::span<const Color> sigma,
                                           Color b) {
  const int ell = tree.max_level();
  if (lists.q() != tree.max_degree() + 1)
    throw UnsupportedRegime(fmt::format("edge-dynamics canonical paths need q = Delta + 1 (q = {}, Delta = {})",
                                        lists.q(), tree.max_degree()));
  if (ell % 2 == 0) throw UnsupportedRegime(fmt::format("edge-dynamics canonical paths need odd depth, got {}", ell));
  require_root_color(sigma, b);
  const Color a = sigma[0];
  const auto spine = alternating_path(tree, sigma, 0, b);
  if (spine.size() % 2 == 1 || static_cast<int>(spine.size()) == ell + 1)
    return three_stage_path(tree, lists, sigma, b);

  const auto order = color_order(lists.q(), a, b);
  const StageOnePlan plan = plan_stage_one(tree, lists, sigma, a, b, 0, order);
  const Coloring tau = flip(tree, sigma, 0, b);
  CanonicalPath path;
  path.a = a;
  path.b = b;
  path.states.emplace_back(sigma.begin(), sigma.end());
  run_stage_one(path, plan);
  {
    Coloring next = path.states.back();
    next[spine[0]] = b;
    next[spine[1]] = a;
    Block pair{spine[0], spine[1]};
    std::sort(pair.begin(), pair.end());
    push_step(path, std::move(pair), Stage::two, std::move(next));
  }
  for (std::size_t i = 3; i < spine.size(); i += 2) {
    Coloring next = path.states.back();
    next[spine[i]] = a;
    push_step(path, {spine[i]}, Stage::two, std::move(next));
  }
  run_stage_three(path, plan, tau);
  return path;
}

CanonicalPath canonical_path(PathFamily family, const Tree& tree, const ListSpec& lists, std::span<const Color> sigma,
                             Color b) {
  return family == PathFamily::glauber ? glauber_canonical_path(tree, lists, sigma, b)
                                       : edge_dynamics_canonical_path(tree, lists, sigma, b);
}

std::set<Block> allowed_blocks(const Tree& tree, bool with_root_pairs) {
  std::set<Block> out;
  for (EdgeId e = 0; e < tree.num_edges(); ++e) out.insert({e});
  if (with_root_pairs)
    for (EdgeId e : tree.child_edges(0)) out.insert({0, e});
  return out;
}

PathCheck verify_path(const Tree& tree, const ListSpec& lists, const CanonicalPath& path, const std::set<Block>& allowed,
                      std::span<const Color> sigma, std::span<const Color> tau) {
  auto fail = [](std::string msg) { return PathCheck{false, std::move(msg)}; };
  if (path.states.empty()) return fail("path has no states");
  if (path.steps.size() + 1 != path.states.size()) return fail("step count does not match state count");
  if (!std::ranges::equal(path.states.front(), sigma)) return fail("path does not start at sigma");
  if (!std::ranges::equal(path.states.back(), tau)) return fail("path does not end at tau");
  std::set<Coloring> seen;
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    if (!is_proper(tree, lists, path.states[k])) return fail(fmt::format("state {} is not proper", k));
    if (!seen.insert(path.states[k]).second) return fail(fmt::format("state {} repeats an earlier state", k));
  }
  std::set<std::pair<Coloring, Coloring>> used;
  for (std::size_t k = 0; k < path.steps.size(); ++k) {
    const auto diff = difference(path.states[k], path.states[k + 1]);
    Block block = path.steps[k].block;
    std::sort(block.begin(), block.end());
    if (diff != block) return fail(fmt::format("step {} changes edges other than its block", k));
    if (!allowed.contains(block)) return fail(fmt::format("step {} uses a block outside the allowed set", k));
    if (!used.emplace(path.states[k], path.states[k + 1]).second)
      return fail(fmt::format("step {} reuses a transition", k));
  }
  return {};
}

bool stage_three_reverses_stage_one(const Tree& tree, const ListSpec& lists, const CanonicalPath& path,
                                    std::span<const Color> tau) {
  // Stage-III states: the state before the first Stage-III step, then each step.
  std::size_t first = path.steps.size();
  while (first > 0 && path.steps[first - 1].stage == Stage::three) --first;
  std::vector<Coloring> stage3(path.states.begin() + static_cast<std::ptrdiff_t>(first), path.states.end());

  const bool even_case =
      std::any_of(path.steps.begin(), path.steps.end(), [](const PathStep& s) { return s.block.size() == 2; });
  const auto order = color_order(lists.q(), path.b, path.a);
  const StageOnePlan plan = plan_stage_one(tree, lists, tau, path.b, path.a, even_case ? 0 : 1, order);
  if (plan.order.size() + 1 != stage3.size()) return false;
  Coloring cur(tau.begin(), tau.end());
  if (cur != stage3.back()) return false;
  for (std::size_t k = 0; k < plan.order.size(); ++k) {
    cur[plan.order[k]] = plan.new_color[k];
    if (cur != stage3[stage3.size() - 2 - k]) return false;
  }
  return true;
}

bool stage_two_avoids_leaves(const Tree& tree, const CanonicalPath& path) {
  for (const auto& s : path.steps)
    if (s.stage == Stage::two)
      for (EdgeId e : s.block)
        if (tree.is_leaf_edge(e)) return false;
  return true;
}

PathSweep sweep_paths(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist) {
  PathSweep out;
  const auto allowed = allowed_blocks(tree, family == PathFamily::edge_dynamics);
  for (Color a : lists.list(0))
    for (Color b : lists.list(0)) {
      if (a == b) continue;
      const Coupling cp = flip_coupling(tree, dist, a, b);
      for (const auto& [si, ti] : cp.pairs) {
        const auto sigma = dist.state(si);
        const auto tau = dist.state(ti);
        ++out.paths;
        CanonicalPath path;
        try {
          path = canonical_path(family, tree, lists, sigma, b);
        } catch (const VerificationFailure& e) {
          if (out.first_failure.empty()) out.first_failure = fmt::format("{}: {}", format_colors(sigma), e.what());
          continue;
        }
        const PathCheck check = verify_path(tree, lists, path, allowed, sigma, tau);
        if (check.ok)
          ++out.verified;
        else if (out.first_failure.empty())
          out.first_failure = fmt::format("{} (b = {}): {}", format_colors(sigma), b, check.diagnostic);
        if (stage_three_reverses_stage_one(tree, lists, path, tau)) ++out.reversal_ok;
        if (stage_two_avoids_leaves(tree, path)) ++out.stage_two_leaf_free;
        out.max_length = std::max(out.max_length, path.steps.size());
      }
    }
  return out;
}

}  // namespace treecolor
