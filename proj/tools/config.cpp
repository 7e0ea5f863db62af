#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>

#include "treecolor/oracle.hpp"

namespace treecolor::cli {

namespace {

const std::set<std::string> kKnownKeys = {
    "command",
    "tree.shape", "tree.edges", "tree.delta", "tree.depth", "tree.file",
    "subtree.shape", "subtree.edges", "subtree.delta", "subtree.depth", "subtree.file",
    "coloring.q", "coloring.lists", "coloring.pin",
    "chain.kind", "chain.blocks", "chain.singletons",
    "run.seed", "run.steps", "run.eps", "run.jobs", "run.trace",
    "caps.enumeration", "caps.dense", "caps.sparse", "caps.mixing", "caps.jacobi",
    "output.dir",
    "lowerbound.edge",
    "congestion.family",
    "tensorize.mode", "tensorize.alpha", "tensorize.beta", "tensorize.blocks", "tensorize.constant",
    "tensorize.s1", "tensorize.s2",
    "induction.variant", "induction.delta", "induction.q", "induction.ell", "induction.k",
    "star.delta",
    "sweep.parameter", "sweep.values",
};

}  // namespace

std::string Config::trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Config Config::from_map(std::map<std::string, std::string> values) {
  for (const auto& [k, v] : values)
    if (!kKnownKeys.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  Config c;
  c.values_ = std::move(values);
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  std::map<std::string, std::string> flat;
  for (const auto& [section, node] : pt) {
    if (node.empty()) {
      flat[section] = node.data();
      continue;
    }
    for (const auto& [key, leaf] : node) flat[section + "." + key] = leaf.data();
  }
  return from_map(std::move(flat));
}

Tree tree_from(const Config& cfg, const std::string& prefix) {
  const std::string shape = cfg.require<std::string>(prefix + ".shape");
  if (shape == "path") return Tree::path(cfg.require<int>(prefix + ".edges"));
  if (shape == "star") return Tree::star(cfg.require<int>(prefix + ".edges"));
  if (shape == "double_star") return Tree::double_star(cfg.require<int>(prefix + ".delta"));
  if (shape == "complete")
    return Tree::complete_regular(cfg.require<int>(prefix + ".delta"), cfg.require<int>(prefix + ".depth"));
  if (shape == "hanging")
    return Tree::hanging_root(cfg.require<int>(prefix + ".delta"), cfg.require<int>(prefix + ".depth"));
  if (shape == "file") {
    const auto file = cfg.require<std::string>(prefix + ".file");
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open tree file '" + file + "'");
    return Tree::read(in);
  }
  throw ConfigError("unknown tree shape '" + shape + "'");
}

ListSpec lists_from(const Config& cfg, const Tree& tree, const std::string& default_preset) {
  const int q = cfg.require<int>("coloring.q");
  const std::string preset = cfg.get<std::string>("coloring.lists", default_preset);
  if (preset == "uniform") return ListSpec::uniform(tree, q);
  if (preset == "star_root") return ListSpec::star_root(tree, q);
  if (preset == "pinned_root") return ListSpec::pinned_root(tree, q, static_cast<Color>(cfg.get<int>("coloring.pin", 1)));
  throw ConfigError("unknown list preset '" + preset + "'");
}

MatrixCaps caps_from(const Config& cfg) {
  MatrixCaps caps;
  caps.dense_cap = cfg.get<std::size_t>("caps.dense", caps.dense_cap);
  caps.sparse_cap = cfg.get<std::size_t>("caps.sparse", caps.sparse_cap);
  caps.mixing_cap = cfg.get<std::size_t>("caps.mixing", caps.mixing_cap);
  caps.jacobi_cap = cfg.get<std::size_t>("caps.jacobi", caps.jacobi_cap);
  return caps;
}

std::size_t enumeration_cap(const Config& cfg) { return cfg.get<std::size_t>("caps.enumeration", kDefaultEnumerationCap); }

}  // namespace treecolor::cli
