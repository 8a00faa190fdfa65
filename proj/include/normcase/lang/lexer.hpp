#pragma once

#include "normcase/lang/diagnostic.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace normcase::lang {

enum class TokenKind { Keyword, Identifier, Integer, String, Punct, End };

/// A lexical token. Two-word keywords ("Identified by", "Holds when", ...)
/// are emitted as a single Keyword token whose text contains one space.
/// String tokens carry the unescaped contents in `text`.
struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    std::int64_t int_value = 0;
    SourceSpan span;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
};

struct TokenizeResult {
    std::vector<Token> tokens; // never includes the End token
    Diagnostics diagnostics;
};

/// Reserved words of the model language, single words only.
const std::vector<std::string_view>& reserved_words();
bool is_reserved(std::string_view word);

/// Lexes a model source. Lexing continues past errors so that every
/// unterminated string or illegal character is reported.
TokenizeResult tokenize(std::string_view source);

} // namespace normcase::lang
