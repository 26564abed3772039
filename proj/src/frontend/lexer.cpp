#include "hdfol/frontend/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace hdfol {

namespace {

constexpr std::array<std::string_view, 16> kKeywords = {
    "nominal", "const", "op",     "rel",   "modality", "rigid", "sort", "model",
    "worlds",  "world", "forall", "exists", "store",   "next",  "not",  "true",
};

struct Alias {
  std::string_view utf8;
  Token::Kind kind;
  std::string_view ascii;
};

constexpr std::array<Alias, 7> kAliases = {{
    {"∀", Token::Kind::Word, "forall"},
    {"∃", Token::Kind::Word, "exists"},
    {"↓", Token::Kind::Word, "store"},
    {"¬", Token::Kind::Word, "not"},
    {"∧", Token::Kind::Punct, "/\\"},
    {"∨", Token::Kind::Punct, "\\/"},
    {"⇒", Token::Kind::Punct, "=>"},
}};

// Longest first.
constexpr std::array<std::string_view, 18> kPunct = {
    "/\\", "\\/", "=>", "->", "(", ")", ",", ";", ".", ":", "=", "[", "]", "{", "}", "@", "*", "+",
};

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_identifier(std::string_view word) {
  if (word.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(word[0])) && word[0] != '_') return false;
  return std::all_of(word.begin(), word.end(), word_char);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t line_start = 0;
  auto here = [&] { return SourceSpan{line, i - line_start + 1}; };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#' || text.substr(i, 2) == "//") {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const SourceSpan span = here();
    if (word_char(c)) {
      const std::size_t start = i;
      while (i < text.size() && word_char(text[i])) ++i;
      out.push_back({Token::Kind::Word, std::string(text.substr(start, i - start)), span});
      continue;
    }
    if (c == '"') {
      std::string value;
      ++i;
      while (true) {
        if (i >= text.size() || text[i] == '\n') throw Error("unterminated string", span);
        if (text[i] == '"') break;
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        value += text[i++];
      }
      ++i;
      out.push_back({Token::Kind::String, std::move(value), span});
      continue;
    }
    bool matched = false;
    for (const auto& a : kAliases) {
      if (text.substr(i, a.utf8.size()) == a.utf8) {
        out.push_back({a.kind, std::string(a.ascii), span});
        i += a.utf8.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    for (auto p : kPunct) {
      if (text.substr(i, p.size()) == p) {
        out.push_back({Token::Kind::Punct, std::string(p), span});
        i += p.size();
        matched = true;
        break;
      }
    }
    if (!matched) {
      std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + [&] {
        static const char* hex = "0123456789abcdef";
        const auto u = static_cast<unsigned char>(c);
        return std::string{hex[u >> 4], hex[u & 15]};
      }();
      throw Error("unexpected character '" + shown + "'", span);
    }
  }
  out.push_back({Token::Kind::End, "", here()});
  return out;
}

}  // namespace hdfol
