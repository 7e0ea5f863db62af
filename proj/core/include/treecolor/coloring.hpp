#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "treecolor/tree.hpp"

namespace treecolor {

/// Colors are 1-based; 0 marks an unassigned edge in partial colorings.
using Color = std::uint8_t;
using ColorMask = std::uint32_t;  // bit c set <=> color c allowed
using Coloring = std::vector<Color>;

inline constexpr int kMaxColors = 30;

enum class ListPreset { uniform, star_root, pinned_root };

/// Per-edge color lists over the palette [q].
class ListSpec {
 public:
  static ListSpec uniform(const Tree& tree, int q);
  /// Root edge (edge 0) gets [q - d] with d = max_degree - 1; others get [q].
  static ListSpec star_root(const Tree& tree, int q);
  static ListSpec pinned_root(const Tree& tree, int q, Color c);
  static ListSpec from_preset(const Tree& tree, int q, ListPreset preset, Color pin = 1);
  static ListSpec custom(int q, std::vector<ColorMask> masks);

  int q() const { return q_; }
  std::size_t num_edges() const { return masks_.size(); }
  ColorMask mask(EdgeId e) const { return masks_.at(e); }
  bool allows(EdgeId e, Color c) const { return (masks_.at(e) >> c) & 1U; }
  std::vector<Color> list(EdgeId e) const;
  ListPreset preset() const { return preset_; }
  std::string preset_name() const;
  /// Restriction to a subset of edges, in the order given.
  ListSpec restrict(std::span<const EdgeId> edges) const;

  friend bool operator==(const ListSpec&, const ListSpec&) = default;

 private:
  int q_ = 0;
  std::vector<ColorMask> masks_;
  ListPreset preset_ = ListPreset::uniform;
};

inline ColorMask color_bit(Color c) { return ColorMask{1} << c; }
std::vector<Color> mask_colors(ColorMask m);
int mask_size(ColorMask m);

/// Colors on assigned edges meeting e.
ColorMask neighbor_colors(const Tree& tree, std::span<const Color> c, EdgeId e);

bool is_proper(const Tree& tree, const ListSpec& lists, std::span<const Color> c);

/// List of e minus colors on N(e); e's own color stays in when it conflicts with nothing.
ColorMask available_mask(const Tree& tree, const ListSpec& lists, std::span<const Color> c, EdgeId e);
std::vector<Color> available_colors(const Tree& tree, const ListSpec& lists, std::span<const Color> c, EdgeId e);

/// Colors absent from all edges at vertex v, over the palette [q].
ColorMask free_at_vertex(const Tree& tree, int q, std::span<const Color> c, VertexId v);

/// Maximal downward path from e alternating c(e), b, c(e), ...
std::vector<EdgeId> alternating_path(const Tree& tree, std::span<const Color> c, EdgeId e, Color b);

/// c with colors c(e) and b interchanged along alternating_path(c, e, b).
Coloring flip(const Tree& tree, std::span<const Color> c, EdgeId e, Color b);

/// Edges where two colorings differ.
std::vector<EdgeId> difference(std::span<const Color> x, std::span<const Color> y);

/// CSV lines "edge_id,color" in edge order.
void write_coloring_csv(std::ostream& out, std::span<const Color> c);
std::string format_colors(std::span<const Color> c);

}  // namespace treecolor
