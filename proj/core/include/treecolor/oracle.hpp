#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treecolor/coloring.hpp"
#include "treecolor/tree.hpp"

namespace treecolor {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kDefaultEnumerationCap = 2'000'000;

/// Uniform distribution over an explicit, lexicographically sorted support.
class DistributionTable {
 public:
  DistributionTable(std::size_t num_edges, std::vector<Color> flat, ListSpec lists, std::string tree_hash);

  std::size_t size() const { return num_edges_ == 0 ? 0 : data_.size() / num_edges_; }
  std::size_t num_edges() const { return num_edges_; }
  std::span<const Color> state(std::size_t i) const {
    return {data_.data() + i * num_edges_, num_edges_};
  }
  Coloring coloring(std::size_t i) const;
  double weight(std::size_t) const { return 1.0 / static_cast<double>(size()); }
  std::optional<std::size_t> index_of(std::span<const Color> c) const;
  std::size_t require_index(std::span<const Color> c) const;

  const ListSpec& lists() const { return lists_; }
  const std::string& tree_hash() const { return tree_hash_; }

  /// Uniform over states that agree with `pinned` wherever pinned != 0.
  DistributionTable conditional(std::span<const Color> pinned) const;
  /// Indices of the states matching `pinned` (0 = free).
  std::vector<std::size_t> matching(std::span<const Color> pinned) const;
  /// Color tuple on S (in the order given) -> probability.
  std::map<std::vector<Color>, double> marginal(std::span<const EdgeId> S) const;

  /// JSON {tree_hash, lists, size, states?}.
  std::string to_json(bool with_states) const;

 private:
  std::size_t num_edges_;
  std::vector<Color> data_;
  ListSpec lists_;
  std::string tree_hash_;
};

BigInt count_colorings(const Tree& tree, const ListSpec& lists);

/// All proper list colorings in lexicographic order of BFS edge indices.
DistributionTable enumerate_colorings(const Tree& tree, const ListSpec& lists,
                                      std::size_t cap = kDefaultEnumerationCap);

/// Max absolute deviation from factorization of the joint marginal on A u B given
/// each configuration of C. C must separate A from B in the line graph.
double conditional_independence_error(const Tree& tree, const DistributionTable& dist,
                                       std::span<const EdgeId> A, std::span<const EdgeId> B,
                                       std::span<const EdgeId> C);

}  // namespace treecolor
