#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sindarin::lumen {

enum class TokenKind {
    Identifier,
    Keyword,   // identifier immediately followed by ':'
    Binary,    // operator characters, or a lone '|'
    Integer,
    String,
    Symbol,
    Assign,    // :=
    Caret,
    Colon,
    Period,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // identifier/keyword/operator text, string or symbol contents
    std::int64_t integer = 0;
    std::uint32_t start = 0;
    std::uint32_t end = 0;
};

/// Tokenizes a whole unit up front. Throws Error{SyntaxError}.
std::vector<Token> tokenize(std::string_view source);

bool is_binary_char(char c);

} // namespace sindarin::lumen
