#include "sexpr.hpp"

#include <cctype>

#include "modelspace/error.hpp"

namespace modelspace::detail {

std::string_view SExpr::head() const {
  if (!is_list || items.empty() || items.front().is_list) return {};
  return items.front().token;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_space();
    }
    return out;
  }

 private:
  SExpr read_one() {
    SExpr node;
    node.line = line_;
    node.column = column_;
    const char c = text_[pos_];
    if (c == ')') {
      throw ParseError(ErrorCode::kSyntaxError, "unexpected ')'", line_, column_, ")");
    }
    if (c == '(') {
      advance();
      node.is_list = true;
      skip_space();
      while (pos_ < text_.size() && text_[pos_] != ')') {
        node.items.push_back(read_one());
        skip_space();
      }
      if (pos_ >= text_.size()) {
        throw ParseError(ErrorCode::kSyntaxError, "unbalanced '('", node.line,
                         node.column, "(");
      }
      advance();  // ')'
      return node;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) advance();
    node.token = to_lower(text_.substr(start, pos_ - start));
    return node;
  }

  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == ';' ||
           std::isspace(static_cast<unsigned char>(c)) != 0;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c)) != 0) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) {
  return Reader(text).read_all();
}

}  // namespace modelspace::detail
