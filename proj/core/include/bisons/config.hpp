#pragma once

// Flat "key = value" configuration. Blank lines and lines starting with '#'
// are ignored. Later assignments replace earlier ones.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace bisons {

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<stream>");
  static Config load(const std::string& path);

  /// Applies "key=value" (spaces around '=' allowed).
  void assign(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;
  /// Throws Errc::kParse when the value is not a number.
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace bisons
