#include "lexer.hpp"

#include "sindarin/error.hpp"

#include <cctype>
#include <limits>

namespace sindarin::lumen {

bool is_binary_char(char c) {
    switch (c) {
    case '+': case '-': case '*': case '/': case '\\': case '<': case '>':
    case '=': case '~': case ',': case '@': case '%': case '&': case '?': case '!':
        return true;
    default:
        return false;
    }
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

[[noreturn]] void fail(std::string message, std::size_t start, std::size_t end) {
    throw Error(ErrorCode::SyntaxError, message,
                ErrorSpan{static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(end)});
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            Token t = next();
            out.push_back(t);
            if (t.kind == TokenKind::End) return out;
        }
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void skip_trivia() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (peek() != '"') return;
            std::size_t start = pos_++;
            while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
            if (pos_ >= src_.size()) fail("unterminated comment", start, src_.size());
            ++pos_;
        }
    }

    Token make(TokenKind kind, std::size_t start, std::string text = {}) const {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.start = static_cast<std::uint32_t>(start);
        t.end = static_cast<std::uint32_t>(pos_);
        return t;
    }

    Token next() {
        std::size_t start = pos_;
        if (pos_ >= src_.size()) return make(TokenKind::End, start);
        char c = src_[pos_];

        if (ident_start(c)) {
            while (ident_char(peek())) ++pos_;
            if (peek() == ':' && peek(1) != '=') {
                ++pos_;
                return make(TokenKind::Keyword, start, std::string(src_.substr(start, pos_ - start)));
            }
            return make(TokenKind::Identifier, start, std::string(src_.substr(start, pos_ - start)));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::int64_t value = 0;
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                int digit = peek() - '0';
                if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10)
                    fail("integer literal out of range", start, pos_ + 1);
                value = value * 10 + digit;
                ++pos_;
            }
            if (ident_start(peek())) fail("malformed number", start, pos_ + 1);
            Token t = make(TokenKind::Integer, start, std::string(src_.substr(start, pos_ - start)));
            t.integer = value;
            return t;
        }
        if (c == '\'') {
            ++pos_;
            std::string text = read_quoted(start);
            return make(TokenKind::String, start, std::move(text));
        }
        if (c == '#') {
            ++pos_;
            if (ident_start(peek())) {
                std::size_t s = pos_;
                while (ident_char(peek()) || (peek() == ':' && peek(1) != '=')) ++pos_;
                return make(TokenKind::Symbol, start, std::string(src_.substr(s, pos_ - s)));
            }
            if (is_binary_char(peek()) || peek() == '|') {
                std::size_t s = pos_;
                while (is_binary_char(peek()) || peek() == '|') ++pos_;
                return make(TokenKind::Symbol, start, std::string(src_.substr(s, pos_ - s)));
            }
            if (peek() == '\'') {
                ++pos_;
                std::string text = read_quoted(start);
                return make(TokenKind::Symbol, start, std::move(text));
            }
            fail("malformed symbol literal", start, pos_);
        }
        if (c == ':' && peek(1) == '=') {
            pos_ += 2;
            return make(TokenKind::Assign, start);
        }
        ++pos_;
        switch (c) {
        case ':': return make(TokenKind::Colon, start);
        case '^': return make(TokenKind::Caret, start);
        case '.': return make(TokenKind::Period, start);
        case '(': return make(TokenKind::LParen, start);
        case ')': return make(TokenKind::RParen, start);
        case '[': return make(TokenKind::LBracket, start);
        case ']': return make(TokenKind::RBracket, start);
        case '{': return make(TokenKind::LBrace, start);
        case '}': return make(TokenKind::RBrace, start);
        case '|': return make(TokenKind::Binary, start, "|");
        default: break;
        }
        if (is_binary_char(c)) {
            // A '-' directly before a digit stays a lone operator so the parser
            // can fold it into a negative literal at primary position.
            while (is_binary_char(peek()) && !(peek() == '-' && std::isdigit(static_cast<unsigned char>(peek(1)))))
                ++pos_;
            return make(TokenKind::Binary, start, std::string(src_.substr(start, pos_ - start)));
        }
        fail(std::string("unexpected character '") + c + "'", start, pos_);
    }

    std::string read_quoted(std::size_t start) {
        std::string text;
        for (;;) {
            if (pos_ >= src_.size()) fail("unterminated string", start, src_.size());
            char ch = src_[pos_++];
            if (ch == '\'') {
                if (peek() == '\'') {
                    text.push_back('\'');
                    ++pos_;
                    continue;
                }
                return text;
            }
            text.push_back(ch);
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

} // namespace sindarin::lumen
