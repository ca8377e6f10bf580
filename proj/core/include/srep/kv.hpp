#pragma once

#include <map>
#include <string>
#include <vector>

namespace srep {

// Flat key=value text block. Lines starting with '#' and blank lines are
// ignored; keys keep file order for round-trip output.
class KvFile {
 public:
  KvFile() = default;

  static KvFile parse(const std::string& text);
  static KvFile load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;              // throws if absent
  std::string get_or(const std::string& key, std::string def) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double def) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long def) const;

  // Later entries win; used for config-file / CLI override layering.
  void merge_from(const KvFile& other);

  std::string to_string() const;
  void save(const std::string& path) const;

  const std::vector<std::string>& keys() const { return order_; }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
};

}  // namespace srep
