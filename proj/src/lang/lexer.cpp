#include "normcase/lang/lexer.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace normcase::lang {

std::string format(const Diagnostic& diag) {
    std::string out = std::to_string(diag.span.begin.line) + ":" +
                      std::to_string(diag.span.begin.column) + ": ";
    out += diag.severity == Severity::Error ? "error: " : "warning: ";
    out += diag.message;
    return out;
}

const std::vector<std::string_view>& reserved_words() {
    static const std::vector<std::string_view> words = {
        "Fact",     "Var",       "Bool",      "Act",       "Physical",    "Duty",
        "Event",    "Open",      "Closed",    "Identified", "by",         "Int",
        "String",   "Actor",     "Recipient", "Holder",    "Claimant",    "Syncs",
        "with",     "Extends",   "Holds",     "when",      "Conditioned", "Violated",
        "Terminated", "Creates", "Terminates", "Not",      "True",        "False",
    };
    return words;
}

bool is_reserved(std::string_view word) {
    const auto& words = reserved_words();
    return std::find(words.begin(), words.end(), word) != words.end();
}

namespace {

// Leading word -> required second word.
constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kCompound = {{
    {"Identified", "by"},
    {"Syncs", "with"},
    {"Holds", "when"},
    {"Conditioned", "by"},
    {"Violated", "when"},
    {"Terminated", "by"},
}};

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    TokenizeResult run() {
        TokenizeResult out;
        while (true) {
            skip_trivia();
            if (at_end()) break;
            lex_one(out);
        }
        return out;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;

    bool at_end() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    SourceLoc loc() const { return {line_, column_}; }

    void advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            column_ = 1;
        } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            // UTF-8 continuation bytes share the column of their lead byte.
            ++column_;
        }
    }

    void skip_trivia() {
        while (!at_end()) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    // Words may contain inner hyphens: `income-threshold`. A hyphen only joins
    // when followed by a letter or digit, so `a - b` is still subtraction.
    std::string read_word() {
        std::string word;
        while (!at_end()) {
            const char c = peek();
            if (is_ident_char(c)) {
                word.push_back(c);
                advance();
            } else if (c == '-' && is_ident_char(peek(1))) {
                word.push_back(c);
                advance();
            } else {
                break;
            }
        }
        return word;
    }

    void lex_one(TokenizeResult& out) {
        const SourceLoc start = loc();
        const char c = peek();

        if (is_ident_start(c)) {
            std::string word = read_word();
            Token tok;
            tok.kind = is_reserved(word) ? TokenKind::Keyword : TokenKind::Identifier;
            tok.text = word;
            if (tok.kind == TokenKind::Keyword) try_compound(tok);
            tok.span = {start, loc()};
            out.tokens.push_back(std::move(tok));
            return;
        }

        if (is_digit(c)) {
            std::string digits;
            while (!at_end() && is_digit(peek())) {
                digits.push_back(peek());
                advance();
            }
            Token tok;
            tok.kind = TokenKind::Integer;
            tok.text = digits;
            tok.span = {start, loc()};
            std::int64_t value = 0;
            bool overflow = false;
            for (char d : digits) {
                if (value > (std::numeric_limits<std::int64_t>::max() - (d - '0')) / 10) {
                    overflow = true;
                    break;
                }
                value = value * 10 + (d - '0');
            }
            if (overflow)
                out.diagnostics.push_back({Severity::Error, "integer literal out of range", tok.span});
            tok.int_value = value;
            out.tokens.push_back(std::move(tok));
            return;
        }

        if (c == '"') {
            lex_string(out, start);
            return;
        }

        static constexpr std::array<std::string_view, 6> kTwoChar = {"<=", ">=", "==", "!=", "&&", "||"};
        for (auto op : kTwoChar) {
            if (peek() == op[0] && peek(1) == op[1]) {
                advance();
                advance();
                out.tokens.push_back({TokenKind::Punct, std::string(op), 0, {start, loc()}});
                return;
            }
        }
        static constexpr std::string_view kOneChar = ".(),+-*<>=";
        if (kOneChar.find(c) != std::string_view::npos) {
            advance();
            out.tokens.push_back({TokenKind::Punct, std::string(1, c), 0, {start, loc()}});
            return;
        }

        // Consume one whole UTF-8 sequence so the error points at a character.
        advance();
        while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
        out.diagnostics.push_back({Severity::Error, "illegal character", {start, loc()}});
    }

    void try_compound(Token& tok) {
        for (auto [first, second] : kCompound) {
            if (tok.text != first) continue;
            // Look ahead over blanks for the partner word without committing.
            const std::size_t save_pos = pos_;
            const int save_line = line_;
            const int save_col = column_;
            skip_trivia();
            if (!at_end() && is_ident_start(peek())) {
                if (read_word() == second) {
                    tok.text = std::string(first) + " " + std::string(second);
                    return;
                }
            }
            pos_ = save_pos;
            line_ = save_line;
            column_ = save_col;
            return;
        }
    }

    void lex_string(TokenizeResult& out, SourceLoc start) {
        advance(); // opening quote
        std::string text;
        while (true) {
            if (at_end() || peek() == '\n') {
                out.diagnostics.push_back(
                    {Severity::Error, "unterminated string literal", {start, loc()}});
                return;
            }
            const char c = peek();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                if (at_end()) continue;
                const char e = peek();
                switch (e) {
                case 'n': text.push_back('\n'); break;
                case 't': text.push_back('\t'); break;
                case '"': text.push_back('"'); break;
                case '\\': text.push_back('\\'); break;
                default:
                    out.diagnostics.push_back(
                        {Severity::Error, std::string("unknown escape sequence \\") + e, {loc(), loc()}});
                    text.push_back(e);
                }
                advance();
                continue;
            }
            text.push_back(c);
            advance();
        }
        out.tokens.push_back({TokenKind::String, std::move(text), 0, {start, loc()}});
    }
};

} // namespace

TokenizeResult tokenize(std::string_view source) { return Lexer(source).run(); }

} // namespace normcase::lang
