#include "treecolor/coloring.hpp"

#include <bit>
#include <ostream>
#include <sstream>

#include "treecolor/errors.hpp"

namespace treecolor {

namespace {

ColorMask palette(int q) {
  if (q < 1 || q > kMaxColors) throw ParameterError("palette size must be in 1.." + std::to_string(kMaxColors));
  return ((ColorMask{1} << (q + 1)) - 1) & ~ColorMask{1};
}

}  // namespace

ListSpec ListSpec::uniform(const Tree& tree, int q) {
  ListSpec s;
  s.q_ = q;
  s.masks_.assign(tree.num_edges(), palette(q));
  s.preset_ = ListPreset::uniform;
  return s;
}

ListSpec ListSpec::star_root(const Tree& tree, int q) {
  ListSpec s = uniform(tree, q);
  const int d = tree.max_degree() - 1;
  if (q - d < 1) throw ParameterError("star-root list [q-d] is empty");
  s.masks_[0] = palette(q - d);
  s.preset_ = ListPreset::star_root;
  return s;
}

ListSpec ListSpec::pinned_root(const Tree& tree, int q, Color c) {
  ListSpec s = uniform(tree, q);
  if (c < 1 || c > q) throw ParameterError("pinned color outside [q]");
  s.masks_[0] = color_bit(c);
  s.preset_ = ListPreset::pinned_root;
  return s;
}

ListSpec ListSpec::from_preset(const Tree& tree, int q, ListPreset preset, Color pin) {
  switch (preset) {
    case ListPreset::uniform: return uniform(tree, q);
    case ListPreset::star_root: return star_root(tree, q);
    case ListPreset::pinned_root: return pinned_root(tree, q, pin);
  }
  throw ParameterError("unknown list preset");
}

ListSpec ListSpec::custom(int q, std::vector<ColorMask> masks) {
  ListSpec s;
  s.q_ = q;
  const ColorMask all = palette(q);
  for (ColorMask m : masks)
    if (m == 0 || (m & ~all) != 0) throw ParameterError("color list empty or outside [q]");
  s.masks_ = std::move(masks);
  return s;
}

std::vector<Color> ListSpec::list(EdgeId e) const { return mask_colors(masks_.at(e)); }

std::string ListSpec::preset_name() const {
  switch (preset_) {
    case ListPreset::uniform: return "uniform";
    case ListPreset::star_root: return "star_root";
    case ListPreset::pinned_root: return "pinned_root";
  }
  return "custom";
}

ListSpec ListSpec::restrict(std::span<const EdgeId> edges) const {
  ListSpec s = *this;
  s.masks_.clear();
  for (EdgeId e : edges) s.masks_.push_back(masks_.at(e));
  return s;
}

std::vector<Color> mask_colors(ColorMask m) {
  std::vector<Color> out;
  while (m != 0) {
    out.push_back(static_cast<Color>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

int mask_size(ColorMask m) { return std::popcount(m); }

ColorMask neighbor_colors(const Tree& tree, std::span<const Color> c, EdgeId e) {
  ColorMask used = 0;
  for (EdgeId f : tree.neighbors(e))
    if (c[f] != 0) used |= color_bit(c[f]);
  return used;
}

bool is_proper(const Tree& tree, const ListSpec& lists, std::span<const Color> c) {
  if (c.size() != tree.num_edges()) throw ParameterError("coloring size does not match tree");
  for (Color x : c)
    if (x == 0) throw ParameterError("partial coloring passed to is_proper");
  for (EdgeId e = 0; e < c.size(); ++e) {
    if (!lists.allows(e, c[e])) return false;
    for (EdgeId f : tree.neighbors(e))
      if (c[f] == c[e]) return false;
  }
  return true;
}

ColorMask available_mask(const Tree& tree, const ListSpec& lists, std::span<const Color> c, EdgeId e) {
  return lists.mask(e) & ~neighbor_colors(tree, c, e);
}

std::vector<Color> available_colors(const Tree& tree, const ListSpec& lists, std::span<const Color> c, EdgeId e) {
  return mask_colors(available_mask(tree, lists, c, e));
}

ColorMask free_at_vertex(const Tree& tree, int q, std::span<const Color> c, VertexId v) {
  ColorMask used = 0;
  for (EdgeId f : tree.incident(v))
    if (c[f] != 0) used |= color_bit(c[f]);
  return palette(q) & ~used;
}

std::vector<EdgeId> alternating_path(const Tree& tree, std::span<const Color> c, EdgeId e, Color b) {
  if (b == c[e]) throw ParameterError("alternating path needs b != c(e)");
  std::vector<EdgeId> path{e};
  const Color a = c[e];
  Color want = b;
  EdgeId cur = e;
  for (;;) {
    bool found = false;
    for (EdgeId f : tree.child_edges(cur)) {
      if (c[f] == want) {
        path.push_back(f);
        cur = f;
        want = want == b ? a : b;
        found = true;
        break;
      }
    }
    if (!found) return path;
  }
}

Coloring flip(const Tree& tree, std::span<const Color> c, EdgeId e, Color b) {
  Coloring out(c.begin(), c.end());
  const Color a = c[e];
  for (EdgeId f : alternating_path(tree, c, e, b)) out[f] = out[f] == a ? b : a;
  return out;
}

std::vector<EdgeId> difference(std::span<const Color> x, std::span<const Color> y) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < x.size(); ++e)
    if (x[e] != y[e]) out.push_back(e);
  return out;
}

void write_coloring_csv(std::ostream& out, std::span<const Color> c) {
  for (EdgeId e = 0; e < c.size(); ++e) out << e << ',' << int{c[e]} << "\r\n";
}

std::string format_colors(std::span<const Color> c) {
  std::ostringstream os;
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << int{c[i]};
  return os.str();
}

}  // namespace treecolor
