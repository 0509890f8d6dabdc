#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace modelspace::detail {

/// A parsed s-expression node. Tokens are lowercased on read.
struct SExpr {
  bool is_list = false;
  std::string token;
  std::vector<SExpr> items;
  int line = 1;
  int column = 1;

  bool is_token(std::string_view t) const { return !is_list && token == t; }
  /// First item's token when this is a non-empty list headed by a token.
  std::string_view head() const;
};

/// Reads every top-level expression in `text`. `;` starts a comment.
/// Throws ParseError(kSyntaxError) on unbalanced parentheses.
std::vector<SExpr> read_sexprs(std::string_view text);

std::string to_lower(std::string_view s);

}  // namespace modelspace::detail
