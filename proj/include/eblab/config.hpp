#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eblab/errors.hpp"

namespace eblab {

/// Flat sectioned key-value configuration:
///   [section]
///   key = value          # trailing comments allowed
/// Section and key names are case-sensitive; values are raw strings.
class Config {
 public:
  static Config parse_string(const std::string& text, const std::string& origin = "<string>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      // Strip comments and whitespace.
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
      };
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
        cfg.sections_[section];  // create
        continue;
      }
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
      cfg.sections_[section][key] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
      throw ConfigError(origin_ + ": missing section [" + section + "]");
    const auto k = s->second.find(key);
    if (k == s->second.end())
      throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + section + "]");
    return k->second;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::size_t used = 0;
    double out;
    try {
      out = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section + "] " + key + ": not a number: '" + v + "'");
    }
    if (used != v.size())
      throw ConfigError(origin_ + ": [" + section + "] " + key + ": trailing characters in '" + v +
                        "'");
    return out;
  }

  double get_double(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  long get_int(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::size_t used = 0;
    long out;
    try {
      out = std::stol(v, &used);
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": [" + section + "] " + key + ": not an integer: '" + v + "'");
    }
    if (used != v.size())
      throw ConfigError(origin_ + ": [" + section + "] " + key + ": trailing characters in '" + v +
                        "'");
    return out;
  }

  long get_int(const std::string& section, const std::string& key, long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
  }

  std::vector<double> get_list(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::vector<double> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": bad list entry '" + tok + "'");
      }
    }
    if (out.empty())
      throw ConfigError(origin_ + ": [" + section + "] " + key + ": empty list");
    return out;
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace eblab
