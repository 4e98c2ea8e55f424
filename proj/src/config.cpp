#include "robin/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace robin {

namespace {

using nlohmann::json;

struct TomlParser {
  const std::string& text;
  size_t pos = 0;
  int line = 1;

  explicit TomlParser(const std::string& t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("toml parse error at line " + std::to_string(line) +
                      ": " + msg);
  }

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char get() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skip_ws(bool newlines) {
    while (!eof()) {
      const char c = peek();
      if (c == '#') {
        while (!eof() && peek() != '\n') get();
      } else if (c == ' ' || c == '\t' || c == '\r' ||
                 (newlines && c == '\n')) {
        get();
      } else {
        break;
      }
    }
  }

  std::string parse_key() {
    skip_ws(false);
    std::string key;
    while (!eof() &&
           (std::isalnum((unsigned char)peek()) || peek() == '_' || peek() == '-' ||
            peek() == '.')) {
      key += get();
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  json parse_value() {
    skip_ws(false);
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    return parse_scalar();
  }

  json parse_string() {
    get();  // opening quote
    std::string s;
    while (!eof() && peek() != '"') {
      char c = get();
      if (c == '\\' && !eof()) {
        const char e = get();
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail("unsupported escape");
        }
      }
      s += c;
    }
    if (eof()) fail("unterminated string");
    get();
    return json(s);
  }

  json parse_array() {
    get();  // '['
    json arr = json::array();
    skip_ws(true);
    if (!eof() && peek() == ']') {
      get();
      return arr;
    }
    while (true) {
      skip_ws(true);
      arr.push_back(parse_value());
      skip_ws(true);
      if (eof()) fail("unterminated array");
      const char c = get();
      if (c == ']') break;
      if (c != ',') fail("expected ',' or ']' in array");
    }
    return arr;
  }

  json parse_inline_table() {
    get();  // '{'
    json obj = json::object();
    skip_ws(false);
    if (!eof() && peek() == '}') {
      get();
      return obj;
    }
    while (true) {
      const std::string key = parse_key();
      skip_ws(false);
      if (eof() || get() != '=') fail("expected '=' in inline table");
      obj[key] = parse_value();
      skip_ws(false);
      if (eof()) fail("unterminated inline table");
      const char c = get();
      if (c == '}') break;
      if (c != ',') fail("expected ',' or '}' in inline table");
    }
    return obj;
  }

  json parse_scalar() {
    std::string tok;
    while (!eof() && peek() != '\n' && peek() != ',' && peek() != ']' &&
           peek() != '}' && peek() != '#') {
      tok += get();
    }
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' ||
                            tok.back() == '\r'))
      tok.pop_back();
    if (tok == "true") return json(true);
    if (tok == "false") return json(false);
    if (tok.empty()) fail("empty value");
    // integer?
    bool is_int = true;
    for (size_t i = 0; i < tok.size(); ++i) {
      const char c = tok[i];
      if (i == 0 && (c == '+' || c == '-')) continue;
      if (!std::isdigit((unsigned char)c)) {
        is_int = false;
        break;
      }
    }
    try {
      if (is_int) return json(std::stoll(tok));
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) fail("malformed number: " + tok);
      return json(v);
    } catch (const std::exception&) {
      fail("malformed value: " + tok);
    }
  }

  json parse_document() {
    json root = json::object();
    json* current = &root;
    while (true) {
      skip_ws(true);
      if (eof()) break;
      if (peek() == '[') {
        get();
        const bool array_table = !eof() && peek() == '[';
        if (array_table) get();
        const std::string name = parse_key();
        skip_ws(false);
        if (eof() || get() != ']') fail("unterminated table header");
        if (array_table) {
          if (eof() || get() != ']') fail("unterminated table-array header");
          if (!root.contains(name)) root[name] = json::array();
          root[name].push_back(json::object());
          current = &root[name].back();
        } else {
          root[name] = json::object();
          current = &root[name];
        }
        continue;
      }
      const std::string key = parse_key();
      skip_ws(false);
      if (eof() || get() != '=') fail("expected '=' after key '" + key + "'");
      (*current)[key] = parse_value();
      skip_ws(false);
      if (!eof() && peek() != '\n') fail("trailing characters after value");
    }
    return root;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

nlohmann::json parse_toml(const std::string& text) {
  TomlParser p(text);
  return p.parse_document();
}

nlohmann::json load_config_file(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".json")) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("json parse error: ") + e.what());
    }
  }
  return parse_toml(text);
}

DomainPtr load_domain_file(const std::string& path) {
  const json j = load_config_file(path);
  try {
    // the TOML form stores complex entries and polynomial terms the same way
    // as the JSON schema, so one decoder serves both
    json doc = j;
    if (doc.contains("term") && !doc.contains("terms")) {
      doc["terms"] = doc["term"];
      doc.erase("term");
    }
    return domain_from_json(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid domain description: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid domain description: ") + e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["domain_file"] = domain_file;
  j["backend"] = backend;
  j["seed"] = seed;
  j["threads"] = threads;
  j["out_dir"] = out_dir;
  json ov = json::object();
  for (const auto& [k, v] : overrides) ov[k] = v;
  j["overrides"] = ov;
  return j;
}

uint64_t config_hash(const nlohmann::json& config) {
  const std::string dump = config.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const nlohmann::json& config) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                (unsigned long long)config_hash(config));
  return buf;
}

}  // namespace robin
