#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdfol/diagnostic.hpp"

namespace hdfol {

struct Token {
  enum class Kind { Word, String, Punct, End };

  Kind kind = Kind::End;
  std::string text;  // words and punctuation in canonical 7-bit spelling; strings unescaped
  SourceSpan span;

  bool is(std::string_view punct) const { return kind == Kind::Punct && text == punct; }
  bool is_word(std::string_view word) const { return kind == Kind::Word && text == word; }
};

// Unicode aliases are mapped to their ASCII spelling: the quantifier, store
// and negation symbols become keywords, the connectives become punctuation.
// Throws Error on a stray character or unterminated string.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view word);
// Starts with a letter or underscore, continues with letters, digits, '_' or '\''.
bool is_identifier(std::string_view word);

}  // namespace hdfol
