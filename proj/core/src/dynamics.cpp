#include "treecolor/dynamics.hpp"

#include <algorithm>
#include <boost/pending/disjoint_sets.hpp>
#include <ostream>

#include "treecolor/errors.hpp"

namespace treecolor {

std::string to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::uniform_glauber: return "uniform_glauber";
    case ChainKind::heatbath_glauber: return "heatbath_glauber";
    case ChainKind::neighbor_pair: return "neighbor_pair";
    case ChainKind::block: return "block";
  }
  return "?";
}

ChainKind parse_chain_kind(const std::string& name) {
  for (auto k : {ChainKind::uniform_glauber, ChainKind::heatbath_glauber, ChainKind::neighbor_pair, ChainKind::block})
    if (to_string(k) == name) return k;
  throw ParameterError("unknown chain kind '" + name + "'");
}

ChainSpec ChainSpec::block(std::vector<WeightedBlock> blocks) {
  double total = 0;
  for (const auto& b : blocks) {
    if (b.weight < 0) throw ParameterError("negative block weight");
    if (b.edges.empty()) throw ParameterError("empty block");
    total += b.weight;
  }
  if (total <= 0) throw ParameterError("block weights are all zero");
  return {ChainKind::block, std::move(blocks), true};
}

std::vector<Block> singleton_blocks(const Tree& tree) {
  std::vector<Block> out;
  for (EdgeId e = 0; e < tree.num_edges(); ++e) out.push_back({e});
  return out;
}

std::vector<Block> pair_blocks(const Tree& tree, bool include_singletons) {
  std::vector<Block> out;
  if (include_singletons) out = singleton_blocks(tree);
  for (EdgeId e = 0; e < tree.num_edges(); ++e)
    for (EdgeId f : tree.neighbors(e))
      if (e < f) out.push_back({e, f});
  return out;
}

std::vector<WeightedBlock> effective_blocks(const Tree& tree, const ChainSpec& spec) {
  std::vector<WeightedBlock> out;
  switch (spec.kind) {
    case ChainKind::uniform_glauber:
    case ChainKind::heatbath_glauber:
      for (auto& b : singleton_blocks(tree)) out.push_back({std::move(b), 1.0});
      break;
    case ChainKind::neighbor_pair:
      for (auto& b : pair_blocks(tree, spec.include_singletons)) out.push_back({std::move(b), 1.0});
      break;
    case ChainKind::block:
      for (const auto& b : spec.blocks) {
        Block sorted = b.edges;
        std::sort(sorted.begin(), sorted.end());
        for (EdgeId e : sorted)
          if (e >= tree.num_edges()) throw ParameterError("block edge out of range");
        out.push_back({std::move(sorted), b.weight});
      }
      break;
  }
  if (out.empty()) throw ParameterError("chain has no blocks");
  return out;
}

std::vector<std::vector<Color>> consistent_assignments(const Tree& tree, const ListSpec& lists,
                                                       std::span<const Color> c, const Block& block) {
  const std::size_t k = block.size();
  std::vector<ColorMask> base(k);
  for (std::size_t i = 0; i < k; ++i) {
    ColorMask used = 0;
    for (EdgeId f : tree.neighbors(block[i]))
      if (std::find(block.begin(), block.end(), f) == block.end()) used |= color_bit(c[f]);
    base[i] = lists.mask(block[i]) & ~used;
  }
  std::vector<std::vector<Color>> out;
  std::vector<Color> cur(k, 0);
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == k) {
      out.push_back(cur);
      return;
    }
    ColorMask m = base[i];
    for (std::size_t j = 0; j < i; ++j)
      if (tree.adjacent(block[i], block[j])) m &= ~color_bit(cur[j]);
    for (Color col : mask_colors(m)) {
      cur[i] = col;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<Move> transitions(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                              std::span<const Color> state) {
  std::vector<Move> out;
  double self = 0;
  const auto n = static_cast<double>(tree.num_edges());
  const Coloring base(state.begin(), state.end());

  if (spec.kind == ChainKind::uniform_glauber) {
    const int q = lists.q();
    const double p = 1.0 / (n * q);
    for (EdgeId e = 0; e < tree.num_edges(); ++e) {
      const ColorMask avail = available_mask(tree, lists, state, e);
      for (int col = 1; col <= q; ++col) {
        const auto c = static_cast<Color>(col);
        if (c == state[e] || !((avail >> c) & 1U)) {
          self += p;
          continue;
        }
        Coloring next = base;
        next[e] = c;
        out.push_back({std::move(next), p});
      }
    }
  } else {
    const auto blocks = effective_blocks(tree, spec);
    double total = 0;
    for (const auto& b : blocks) total += b.weight;
    for (const auto& b : blocks) {
      if (b.weight == 0) continue;
      const auto assigns = consistent_assignments(tree, lists, state, b.edges);
      const double p = b.weight / (total * static_cast<double>(assigns.size()));
      for (const auto& a : assigns) {
        bool same = true;
        for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == state[b.edges[i]];
        if (same) {
          self += p;
          continue;
        }
        Coloring next = base;
        for (std::size_t i = 0; i < a.size(); ++i) next[b.edges[i]] = a[i];
        out.push_back({std::move(next), p});
      }
    }
  }
  // Different blocks can reach the same state; merge so each target appears once.
  std::sort(out.begin(), out.end(), [](const Move& x, const Move& y) { return x.next < y.next; });
  std::vector<Move> merged;
  for (auto& m : out) {
    if (!merged.empty() && merged.back().next == m.next)
      merged.back().probability += m.probability;
    else
      merged.push_back(std::move(m));
  }
  if (self > 0) merged.push_back({base, self});
  return merged;
}

std::mt19937_64 make_engine(RngSpec rng) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng.seed), static_cast<std::uint32_t>(rng.seed >> 32),
                    static_cast<std::uint32_t>(rng.stream), static_cast<std::uint32_t>(rng.stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

struct StepOutcome {
  Block block;
  std::vector<Color> new_colors;
};

StepOutcome sample_step(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::span<const Color> state,
                        std::mt19937_64& engine) {
  const auto n = tree.num_edges();
  if (spec.kind == ChainKind::uniform_glauber || spec.kind == ChainKind::heatbath_glauber) {
    std::uniform_int_distribution<EdgeId> pick_edge(0, static_cast<EdgeId>(n - 1));
    const EdgeId e = pick_edge(engine);
    const ColorMask avail = available_mask(tree, lists, state, e);
    if (spec.kind == ChainKind::uniform_glauber) {
      std::uniform_int_distribution<int> pick_color(1, lists.q());
      const auto c = static_cast<Color>(pick_color(engine));
      return {{e}, {((avail >> c) & 1U) ? c : state[e]}};
    }
    const auto options = mask_colors(avail);
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    return {{e}, {options[pick(engine)]}};
  }
  const auto blocks = effective_blocks(tree, spec);
  std::vector<double> weights;
  for (const auto& b : blocks) weights.push_back(b.weight);
  std::discrete_distribution<std::size_t> pick_block(weights.begin(), weights.end());
  const auto& b = blocks[pick_block(engine)];
  const auto assigns = consistent_assignments(tree, lists, state, b.edges);
  std::uniform_int_distribution<std::size_t> pick(0, assigns.size() - 1);
  return {b.edges, assigns[pick(engine)]};
}

}  // namespace

Coloring step(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::span<const Color> state,
              std::mt19937_64& engine) {
  Coloring next(state.begin(), state.end());
  auto out = sample_step(tree, lists, spec, state, engine);
  for (std::size_t i = 0; i < out.block.size(); ++i) next[out.block[i]] = out.new_colors[i];
  return next;
}

RunResult run_chain(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::uint64_t t_steps,
                    RngSpec rng, std::span<const Color> start, bool record_trace) {
  if (!is_proper(tree, lists, start)) throw ParameterError("start coloring is not proper");
  auto engine = make_engine(rng);
  RunResult res{Coloring(start.begin(), start.end()), {}};
  for (std::uint64_t t = 0; t < t_steps; ++t) {
    auto out = sample_step(tree, lists, spec, res.final_state, engine);
    TraceRow row{t + 1, out.block, {}, out.new_colors};
    for (std::size_t i = 0; i < out.block.size(); ++i) {
      row.old_colors.push_back(res.final_state[out.block[i]]);
      res.final_state[out.block[i]] = out.new_colors[i];
    }
    if (record_trace) res.trace.push_back(std::move(row));
  }
  return res;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
  out << "step,edge_or_block,old_colors,new_colors\r\n";
  auto join = [](const auto& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(static_cast<int>(v[i]));
    return s;
  };
  for (const auto& r : trace)
    out << r.step << ',' << join(r.block) << ',' << join(r.old_colors) << ',' << join(r.new_colors) << "\r\n";
}

ErgodicityReport check_ergodicity(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::size_t cap) {
  return check_ergodicity(tree, lists, spec, enumerate_colorings(tree, lists, cap));
}

ErgodicityReport check_ergodicity(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                                  const DistributionTable& dist) {
  const std::size_t N = dist.size();
  std::vector<std::size_t> rank(N), parent(N);
  boost::disjoint_sets<std::size_t*, std::size_t*> sets(rank.data(), parent.data());
  for (std::size_t i = 0; i < N; ++i) sets.make_set(i);
  for (std::size_t i = 0; i < N; ++i) {
    for (const auto& m : transitions(tree, lists, spec, dist.state(i))) {
      if (m.probability <= 0) continue;
      sets.union_set(i, dist.require_index(m.next));
    }
  }
  std::size_t comps = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (sets.find_set(i) == i) ++comps;
  return {comps == 1, comps};
}

}  // namespace treecolor
