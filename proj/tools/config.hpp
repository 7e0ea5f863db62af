#pragma once

#include <boost/lexical_cast.hpp>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "treecolor/coloring.hpp"
#include "treecolor/spectral.hpp"
#include "treecolor/tree.hpp"

namespace treecolor::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key" -> value view of an INI file.
class Config {
 public:
  static Config load(const std::string& path);
  static Config from_map(std::map<std::string, std::string> values);

  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  const std::map<std::string, std::string>& values() const { return values_; }

  template <class T>
  T get(const std::string& key, T fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : convert<T>(key, it->second);
  }
  template <class T>
  T require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return convert<T>(key, it->second);
  }
  std::string get(const std::string& key, const char* fallback) const { return get<std::string>(key, fallback); }

  /// Comma separated list.
  template <class T>
  std::vector<T> list(const std::string& key) const {
    std::vector<T> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    std::string item;
    for (char ch : it->second + ",") {
      if (ch == ',') {
        if (item.find_first_not_of(' ') != std::string::npos) out.push_back(convert<T>(key, trim(item)));
        item.clear();
      } else {
        item += ch;
      }
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s);
  template <class T>
  static T convert(const std::string& key, const std::string& value) {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        return value;
      } else {
        return boost::lexical_cast<T>(trim(value));
      }
    } catch (const boost::bad_lexical_cast&) {
      throw ConfigError("config key '" + key + "' has bad value '" + value + "'");
    }
  }

  std::map<std::string, std::string> values_;
};

/// Tree from the keys under `prefix` (shape, edges, delta, depth, file).
Tree tree_from(const Config& cfg, const std::string& prefix = "tree");
ListSpec lists_from(const Config& cfg, const Tree& tree, const std::string& default_preset = "uniform");
MatrixCaps caps_from(const Config& cfg);
std::size_t enumeration_cap(const Config& cfg);

}  // namespace treecolor::cli
