#include "pinchlab/toml_lite.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdlib>
#include <vector>

#include "pinchlab/errors.hpp"

namespace pinchlab {

namespace {

using nlohmann::json;

struct TomlCursor {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t line = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw schema_error("toml line " + std::to_string(line) + ": " + what);
  }

  void skip_ws_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }

  void skip_comment_to_eol() {
    while (!done() && peek() != '\n') ++pos;
  }

  // Skip whitespace, comments, newlines. Used between top-level constructs.
  void skip_blank() {
    while (!done()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '\n') {
        take();
      } else if (c == '#') {
        skip_comment_to_eol();
      } else {
        break;
      }
    }
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_basic_string(TomlCursor& cur) {
  if (cur.take() != '"') cur.fail("expected '\"'");
  std::string out;
  while (true) {
    if (cur.done()) cur.fail("unterminated string");
    char c = cur.take();
    if (c == '"') break;
    if (c == '\n') cur.fail("newline in string");
    if (c == '\\') {
      if (cur.done()) cur.fail("unterminated escape");
      char e = cur.take();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: cur.fail("unsupported escape \\" + std::string(1, e));
      }
    } else {
      out += c;
    }
  }
  return out;
}

// A key is either bare (alnum/_/-) or a quoted string. Dotted bare keys are
// rejected; quoted keys may contain dots (used for gram entries like "p1.p2").
std::string parse_key(TomlCursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) cur.fail("expected key");
  if (cur.peek() == '"') return parse_basic_string(cur);
  std::string key;
  while (!cur.done() && is_bare_key_char(cur.peek())) key += cur.take();
  if (key.empty()) cur.fail("expected key");
  if (key.find('.') != std::string::npos)
    cur.fail("dotted keys are not supported; quote the key instead");
  return key;
}

json parse_value(TomlCursor& cur);

json parse_array(TomlCursor& cur) {
  if (cur.take() != '[') cur.fail("expected '['");
  json arr = json::array();
  while (true) {
    cur.skip_blank();
    if (cur.done()) cur.fail("unterminated array");
    if (cur.peek() == ']') {
      cur.take();
      break;
    }
    arr.push_back(parse_value(cur));
    cur.skip_blank();
    if (!cur.done() && cur.peek() == ',') {
      cur.take();
      continue;
    }
    cur.skip_blank();
    if (cur.done() || cur.peek() != ']') cur.fail("expected ',' or ']' in array");
    cur.take();
    break;
  }
  return arr;
}

json parse_inline_table(TomlCursor& cur) {
  if (cur.take() != '{') cur.fail("expected '{'");
  json obj = json::object();
  cur.skip_ws_inline();
  if (!cur.done() && cur.peek() == '}') {
    cur.take();
    return obj;
  }
  while (true) {
    std::string key = parse_key(cur);
    cur.skip_ws_inline();
    if (cur.done() || cur.take() != '=') cur.fail("expected '=' in inline table");
    cur.skip_ws_inline();
    obj[key] = parse_value(cur);
    cur.skip_ws_inline();
    if (!cur.done() && cur.peek() == ',') {
      cur.take();
      cur.skip_ws_inline();
      continue;
    }
    if (cur.done() || cur.take() != '}') cur.fail("expected ',' or '}' in inline table");
    break;
  }
  return obj;
}

json parse_number_or_bool(TomlCursor& cur) {
  std::string tok;
  while (!cur.done()) {
    char c = cur.peek();
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        c == '.' || c == '_') {
      tok += cur.take();
    } else {
      break;
    }
  }
  if (tok.empty()) cur.fail("expected value");
  if (tok == "true") return json(true);
  if (tok == "false") return json(false);
  std::string digits;
  for (char c : tok)
    if (c != '_') digits += c;
  if (digits.find('.') != std::string::npos || digits.find('e') != std::string::npos ||
      digits.find('E') != std::string::npos) {
    char* end = nullptr;
    double v = std::strtod(digits.c_str(), &end);
    if (end == nullptr || *end != '\0') cur.fail("bad float '" + tok + "'");
    return json(v);
  }
  char* end = nullptr;
  long long v = std::strtoll(digits.c_str(), &end, 10);
  if (end == nullptr || *end != '\0') cur.fail("bad integer '" + tok + "'");
  return json(v);
}

json parse_value(TomlCursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) cur.fail("expected value");
  char c = cur.peek();
  if (c == '"') return json(parse_basic_string(cur));
  if (c == '[') return parse_array(cur);
  if (c == '{') return parse_inline_table(cur);
  return parse_number_or_bool(cur);
}

void expect_eol(TomlCursor& cur) {
  cur.skip_ws_inline();
  if (cur.done()) return;
  if (cur.peek() == '#') {
    cur.skip_comment_to_eol();
    return;
  }
  if (cur.peek() == '\r') {
    cur.take();
  }
  if (cur.done()) return;
  if (cur.peek() != '\n') cur.fail("trailing characters after value");
}

} // namespace

json parse_toml_lite(const std::string& text) {
  TomlCursor cur{text};
  json root = json::object();
  json* target = &root; // current table for key = value lines

  while (true) {
    cur.skip_blank();
    if (cur.done()) break;
    char c = cur.peek();
    if (c == '[') {
      cur.take();
      bool array_of_tables = !cur.done() && cur.peek() == '[';
      if (array_of_tables) cur.take();
      std::string name = parse_key(cur);
      cur.skip_ws_inline();
      if (cur.done() || cur.take() != ']') cur.fail("expected ']'");
      if (array_of_tables) {
        if (cur.done() || cur.take() != ']') cur.fail("expected ']]'");
      }
      expect_eol(cur);
      if (array_of_tables) {
        if (!root.contains(name)) root[name] = json::array();
        if (!root[name].is_array()) cur.fail("'" + name + "' is not an array of tables");
        root[name].push_back(json::object());
        target = &root[name].back();
      } else {
        // Support one nesting level "parent.child" via quoted keys is not
        // needed; plain [table] only.
        if (root.contains(name)) {
          if (!root[name].is_object()) cur.fail("'" + name + "' redefined");
        } else {
          root[name] = json::object();
        }
        target = &root[name];
      }
    } else {
      std::string key = parse_key(cur);
      cur.skip_ws_inline();
      if (cur.done() || cur.take() != '=') cur.fail("expected '=' after key");
      json value = parse_value(cur);
      expect_eol(cur);
      if (target->contains(key)) cur.fail("duplicate key '" + key + "'");
      (*target)[key] = std::move(value);
    }
  }
  return root;
}

} // namespace pinchlab
