#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "treecolor/coloring.hpp"
#include "treecolor/dynamics.hpp"
#include "treecolor/oracle.hpp"
#include "treecolor/tree.hpp"

namespace treecolor {

/// Ascending [q] \ {a, b}, then a, then b.
std::vector<Color> color_order(int q, Color a, Color b);

/// Pairs (sigma, tau = flip(sigma, r, b)) over sigma with sigma(r) = a.
struct Coupling {
  Color a = 0;
  Color b = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // indices into the full table
  double weight = 0;                                        // p^{ra}
};

Coupling flip_coupling(const Tree& tree, const DistributionTable& dist, Color a, Color b);

enum class Stage { one = 1, two = 2, three = 3 };

struct PathStep {
  Block block;
  Stage stage;
};

/// gamma_0 = sigma, ..., gamma_m = tau with steps[k] taking gamma_k to gamma_{k+1}.
struct CanonicalPath {
  std::vector<Coloring> states;
  std::vector<PathStep> steps;
  Color a = 0;
  Color b = 0;
};

enum class PathFamily { glauber, edge_dynamics };

std::string to_string(PathFamily f);

/// One branch path E_j hanging off spine edge e_j together with its recoloring.
struct BranchPlan {
  std::size_t index = 0;  // j, position on the alternating path
  EdgeId spine_edge = 0;
  std::vector<EdgeId> branch;      // h_1 .. h_t
  std::vector<Color> branch_new;   // new colors of h_1 .. h_t
  Color spine_new = 0;             // c_j
};

/// Stage-I data from coloring x with x(r) = a, alternating with b.
struct StageOnePlan {
  std::vector<EdgeId> spine;  // e_0 = r, e_1, ..., e_s
  std::vector<BranchPlan> branches;
  std::vector<EdgeId> order;     // recoloring order
  std::vector<Color> new_color;  // target color per edge in `order`
};

/// Branch plans for the spine positions of the given parity (1 = odd, 0 = positive even).
StageOnePlan plan_stage_one(const Tree& tree, const ListSpec& lists, std::span<const Color> x, Color a, Color b,
                            int parity, std::span<const Color> order);

/// Branch path from spine position j (Stage-I rule), empty when e_j has a free color outside {a, b}.
BranchPlan build_branch(const Tree& tree, const ListSpec& lists, std::span<const Color> x, std::span<const EdgeId> spine,
                        std::size_t j, Color a, Color b, std::span<const Color> order);

/// Stage I-III path for q = Delta + 2 and STAR_ROOT lists on T*_l.
CanonicalPath glauber_canonical_path(const Tree& tree, const ListSpec& lists, std::span<const Color> sigma, Color b);

/// Path for q = Delta + 1 using singletons and the pairs {r, e}, e in L_1; l odd.
CanonicalPath edge_dynamics_canonical_path(const Tree& tree, const ListSpec& lists, std::span<const Color> sigma,
                                           Color b);

CanonicalPath canonical_path(PathFamily family, const Tree& tree, const ListSpec& lists, std::span<const Color> sigma,
                             Color b);

/// Singletons, plus {r, e} for e in L_1 when `with_root_pairs`.
std::set<Block> allowed_blocks(const Tree& tree, bool with_root_pairs);

struct PathCheck {
  bool ok = true;
  std::string diagnostic;
};

/// Properness, single allowed-block steps, distinct states, correct endpoints,
/// each transition used once.
PathCheck verify_path(const Tree& tree, const ListSpec& lists, const CanonicalPath& path, const std::set<Block>& allowed,
                      std::span<const Color> sigma, std::span<const Color> tau);

/// Stage-I run from tau with a and b swapped retraces Stage-III backwards.
bool stage_three_reverses_stage_one(const Tree& tree, const ListSpec& lists, const CanonicalPath& path,
                                    std::span<const Color> tau);

/// True when no Stage-II step touches a leaf edge.
bool stage_two_avoids_leaves(const Tree& tree, const CanonicalPath& path);

struct PathSweep {
  std::size_t paths = 0;
  std::size_t verified = 0;
  std::size_t reversal_ok = 0;
  std::size_t stage_two_leaf_free = 0;
  std::size_t max_length = 0;
  std::string first_failure;
};

/// Builds and verifies every path of every flip coupling (a, b), a != b in [q-d].
PathSweep sweep_paths(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist);

// Congestion

struct TransitionKey {
  std::size_t from;
  std::size_t to;
  friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

/// Usage count of each transition by the paths of one coupling.
struct UsageTable {
  Color a = 0;
  Color b = 0;
  double weight = 0;  // p^{ra}
  std::map<TransitionKey, std::size_t> count;
  std::map<TransitionKey, Block> block;
};

UsageTable usage_table(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist, Color a,
                       Color b);

struct CongestionReport {
  int delta = 0;
  int q = 0;
  int ell = 0;
  PathFamily family = PathFamily::glauber;
  std::vector<double> xi;  // per level 0..l, maximized over (a, b)
  double xi_A = 0;
  struct PerPair {
    Color a, b;
    std::vector<double> xi;
    double xi_A;
    double r_ab;
  };
  std::vector<PerPair> pairs;
  std::string to_json() const;
};

CongestionReport congestion(PathFamily family, const Tree& tree, const ListSpec& lists, const DistributionTable& dist);

/// E_gamma[ sum_{h leaf} sum_{c in avail \ gamma(h)} N(gamma, h, c)^2 ].
double r_ab(const Tree& tree, const DistributionTable& dist, const UsageTable& usage);

struct GammaStats {
  int S = 0;
  int P = 0;
  int Z = 0;
  std::vector<int> P_i;  // indexed by odd i, 0 elsewhere
};

GammaStats gamma_stats(const Tree& tree, const ListSpec& lists, std::span<const Color> gamma, Color a, Color b);

struct LeafLoadResult {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_ratio = 0;  // lhs / bound over gamma with bound > 0
  std::string first_violation;
};

/// Per-gamma inequality over all gamma and all ordered (a, b).
LeafLoadResult leaf_load_check(const Tree& tree, const ListSpec& lists, const DistributionTable& dist);

struct SpineProbabilityRow {
  Color a, b;
  int s, x;
  double joint;        // Pr[S = s, P = x, gamma(r) in {a, b}]
  double conditional;  // Pr[S = s, P = x | gamma(r) in {a, b}]
  double bound;
  bool skipped;        // negative exponent
  bool ok;
};

std::vector<SpineProbabilityRow> spine_probability_check(const Tree& tree, const ListSpec& lists, const DistributionTable& dist);
double spine_probability_bound(int delta, int ell, int s, int x);

struct RoutingBound {
  int delta = 0;
  std::vector<double> expected_steps;  // per level
  std::vector<std::size_t> multiplicity;
  std::vector<double> alpha;
  bool certified = false;  // alpha_0 <= 4 Delta and alpha_1 <= 8
};

/// l = 1, q = Delta + 1 routing through the level-1 edge.
RoutingBound routing_bound_ell1(int delta);

}  // namespace treecolor
