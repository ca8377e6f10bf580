#include "srep/kv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srep {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

KvFile KvFile::parse(const std::string& text) {
  KvFile kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("kv parse error: line " + std::to_string(lineno) +
                               " has no '=': " + t);
    kv.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return kv;
}

KvFile KvFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KvFile::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) order_.push_back(key);
  values_[key] = value;
}

void KvFile::set(const std::string& key, double value) { set(key, format_double(value)); }
void KvFile::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

bool KvFile::has(const std::string& key) const { return values_.count(key) > 0; }

const std::string& KvFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("kv: missing key '" + key + "'");
  return it->second;
}

std::string KvFile::get_or(const std::string& key, std::string def) const {
  const auto it = values_.find(key);
  return it == values_.end() ? std::move(def) : it->second;
}

double KvFile::get_double(const std::string& key) const {
  const std::string& raw = get(key);
  std::size_t pos = 0;
  const double v = std::stod(raw, &pos);
  if (pos != raw.size()) throw std::runtime_error("kv: key '" + key + "' is not a number: " + raw);
  return v;
}

double KvFile::get_double_or(const std::string& key, double def) const {
  return has(key) ? get_double(key) : def;
}

long long KvFile::get_int(const std::string& key) const {
  const std::string& raw = get(key);
  std::size_t pos = 0;
  const long long v = std::stoll(raw, &pos);
  if (pos != raw.size()) throw std::runtime_error("kv: key '" + key + "' is not an integer: " + raw);
  return v;
}

long long KvFile::get_int_or(const std::string& key, long long def) const {
  return has(key) ? get_int(key) : def;
}

void KvFile::merge_from(const KvFile& other) {
  for (const auto& k : other.order_) set(k, other.get(k));
}

std::string KvFile::to_string() const {
  std::ostringstream out;
  for (const auto& k : order_) out << k << "=" << values_.at(k) << "\n";
  return out.str();
}

void KvFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_string();
}

}  // namespace srep
