#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "treecolor/coloring.hpp"
#include "treecolor/oracle.hpp"
#include "treecolor/tree.hpp"

namespace treecolor {

enum class ChainKind { uniform_glauber, heatbath_glauber, neighbor_pair, block };

std::string to_string(ChainKind kind);
ChainKind parse_chain_kind(const std::string& name);

using Block = std::vector<EdgeId>;

struct WeightedBlock {
  Block edges;
  double weight = 1.0;
};

/// A chain kind plus its block data. For neighbor_pair the blocks are derived
/// from the tree; for block they are supplied.
struct ChainSpec {
  ChainKind kind = ChainKind::heatbath_glauber;
  std::vector<WeightedBlock> blocks;
  bool include_singletons = true;

  static ChainSpec uniform_glauber() { return {ChainKind::uniform_glauber, {}, true}; }
  static ChainSpec heatbath_glauber() { return {ChainKind::heatbath_glauber, {}, true}; }
  static ChainSpec neighbor_pair(bool include_singletons = true) {
    return {ChainKind::neighbor_pair, {}, include_singletons};
  }
  static ChainSpec block(std::vector<WeightedBlock> blocks);
};

/// All singletons followed by all adjacent pairs {e, f}, e < f.
std::vector<Block> pair_blocks(const Tree& tree, bool include_singletons = true);
std::vector<Block> singleton_blocks(const Tree& tree);

/// Blocks a heat-bath step of `spec` chooses from, with selection weights.
std::vector<WeightedBlock> effective_blocks(const Tree& tree, const ChainSpec& spec);

/// Assignments of `block` consistent with the colors of c off the block, in
/// lexicographic order.
std::vector<std::vector<Color>> consistent_assignments(const Tree& tree, const ListSpec& lists,
                                                       std::span<const Color> c, const Block& block);

struct Move {
  Coloring next;
  double probability;
};

/// One-step distribution from `state`, self-loop merged into a single entry.
std::vector<Move> transitions(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                              std::span<const Color> state);

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

std::mt19937_64 make_engine(RngSpec rng);

/// One transition; the output is proper whenever the input is.
Coloring step(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::span<const Color> state,
              std::mt19937_64& engine);

struct TraceRow {
  std::uint64_t step;
  Block block;
  std::vector<Color> old_colors;
  std::vector<Color> new_colors;
};

struct RunResult {
  Coloring final_state;
  std::vector<TraceRow> trace;
};

RunResult run_chain(const Tree& tree, const ListSpec& lists, const ChainSpec& spec, std::uint64_t t_steps,
                    RngSpec rng, std::span<const Color> start, bool record_trace = false);

/// CSV "step,edge_or_block,old_colors,new_colors"; multi-edge fields are space separated.
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);

struct ErgodicityReport {
  bool connected;
  std::size_t components;
};

/// Connectivity of the one-step move graph on the enumerated state space.
ErgodicityReport check_ergodicity(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                                  std::size_t cap = kDefaultEnumerationCap);
ErgodicityReport check_ergodicity(const Tree& tree, const ListSpec& lists, const ChainSpec& spec,
                                  const DistributionTable& dist);

}  // namespace treecolor
