#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bergelab {

struct TextPos {
  int line = 1;
  int column = 1;
};

namespace detail {

/** @brief Minimal JSON walker mapping JSON-pointer paths to source positions. */
class JsonLocator {
 public:
  JsonLocator(std::string_view text, std::vector<std::string> target) : s_(text), target_(std::move(target)) {}

  std::optional<TextPos> run() {
    std::vector<std::string> path;
    try {
      skip_ws();
      value(path);
    } catch (...) {
    }
    return found_;
  }

 private:
  void value(std::vector<std::string>& path) {
    skip_ws();
    if (!found_ && path == target_) found_ = pos_of(i_);
    if (i_ >= s_.size()) throw 0;
    char c = s_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      if (peek() == '}') {
        ++i_;
        return;
      }
      while (true) {
        skip_ws();
        std::string key = string_token();
        skip_ws();
        expect(':');
        path.push_back(escape(key));
        value(path);
        path.pop_back();
        skip_ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        expect('}');
        return;
      }
    }
    if (c == '[') {
      ++i_;
      skip_ws();
      if (peek() == ']') {
        ++i_;
        return;
      }
      for (int idx = 0;; ++idx) {
        path.push_back(std::to_string(idx));
        value(path);
        path.pop_back();
        skip_ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        expect(']');
        return;
      }
    }
    if (c == '"') {
      string_token();
      return;
    }
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-' || s_[i_] == '+' || s_[i_] == '.'))
      ++i_;
  }

  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out.push_back(c);
    }
    return out;
  }

  std::string string_token() {
    expect('"');
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\') ++i_;
      if (i_ < s_.size()) out.push_back(s_[i_++]);
    }
    expect('"');
    return out;
  }

  char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
  void expect(char c) {
    if (peek() != c) throw 0;
    ++i_;
  }
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  TextPos pos_of(std::size_t at) const {
    TextPos p;
    for (std::size_t k = 0; k < at && k < s_.size(); ++k) {
      if (s_[k] == '\n') {
        ++p.line;
        p.column = 1;
      } else {
        ++p.column;
      }
    }
    return p;
  }

  std::string_view s_;
  std::vector<std::string> target_;
  std::size_t i_ = 0;
  std::optional<TextPos> found_;
};

}  // namespace detail

/** @brief Source position of the value addressed by a JSON pointer such as "/objective/1". */
inline std::optional<TextPos> locate_json_pointer(std::string_view text, const std::string& pointer) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < pointer.size()) {
    if (pointer[i] != '/') return std::nullopt;
    std::size_t j = pointer.find('/', i + 1);
    if (j == std::string::npos) j = pointer.size();
    parts.push_back(pointer.substr(i + 1, j - i - 1));
    i = j;
  }
  return detail::JsonLocator(text, std::move(parts)).run();
}

}  // namespace bergelab
