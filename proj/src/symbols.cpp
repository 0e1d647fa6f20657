#include "pinchlab/symbols.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {
struct Table {
  std::mutex mu;
  std::deque<std::string> names; // deque: stable references under growth
  std::unordered_map<std::string, Sym> ids;
};
Table& table() {
  static Table t;
  return t;
}
} // namespace

Sym intern_symbol(const std::string& name) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it != t.ids.end()) return it->second;
  Sym id = static_cast<Sym>(t.names.size());
  t.names.push_back(name);
  t.ids.emplace(name, id);
  return id;
}

const std::string& symbol_name(Sym s) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  if (s >= t.names.size()) throw symbol_error("unknown symbol id " + std::to_string(s));
  return t.names[s];
}

bool symbol_known(const std::string& name) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.ids.count(name) != 0;
}

Sym lookup_symbol(const std::string& name) {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.ids.find(name);
  if (it == t.ids.end()) throw symbol_error("unknown symbol '" + name + "'");
  return it->second;
}

std::size_t symbol_count() {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  return t.names.size();
}

void reset_symbols_for_tests() {
  Table& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  t.names.clear();
  t.ids.clear();
}

} // namespace pinchlab
