#pragma once

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ethver {

enum class TokenKind { Identifier, Keyword, Operator, Literal, Punctuation };

struct Token {
    TokenKind kind;
    std::string text;
    int line = 1;              // 1-based
    std::size_t offset = 0;    // byte offset into the source
};

enum class CommentStyle { Line, Block };

struct Comment {
    std::string text; // raw lexeme including the // or /* */ markers
    int start_line = 1;
    int end_line = 1;
    CommentStyle style = CommentStyle::Line;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0; // one past the last byte
};

struct LexDiagnostic {
    std::string message;
    int line = 1;
};

struct TokenStream {
    std::vector<Token> tokens;
    std::vector<Comment> comments;
    std::vector<LexDiagnostic> diagnostics;
};

namespace detail {

inline bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool is_ident_part(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline bool is_solidity_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> keywords = {
        "abstract", "address",  "anonymous", "as",        "assembly", "bool",
        "break",    "calldata", "catch",     "constant",  "constructor",
        "continue", "contract", "delete",    "do",        "else",     "emit",
        "enum",     "event",    "external",  "fallback",  "for",      "function",
        "if",       "immutable","import",    "indexed",   "interface","internal",
        "is",       "library",  "mapping",   "memory",    "modifier", "new",
        "override", "payable",  "pragma",    "private",   "public",   "pure",
        "receive",  "return",   "returns",   "storage",   "string",   "struct",
        "super",    "this",     "throw",     "try",       "type",     "unchecked",
        "using",    "view",     "virtual",   "while",
        // denomination and time units
        "wei", "gwei", "szabo", "finney", "ether",
        "seconds", "minutes", "hours", "days", "weeks", "years",
    };
    if (keywords.count(word) > 0) return true;
    // sized elementary types: uint8..uint256, int*, bytes1..bytes32, (u)fixed
    for (std::string_view prefix : {"uint", "int", "bytes", "fixed", "ufixed"}) {
        if (word.size() >= prefix.size() && word.substr(0, prefix.size()) == prefix) {
            const auto rest = word.substr(prefix.size());
            if (rest.empty() && prefix != "bytes") return true;
            if (prefix == "bytes" && (rest.empty() || all_digits(rest))) return true;
            if ((prefix == "uint" || prefix == "int") && all_digits(rest)) return true;
            if ((prefix == "fixed" || prefix == "ufixed") && rest.find('x') != std::string_view::npos) {
                return true;
            }
        }
    }
    return false;
}

// longest-match operator table, 3-char entries first
inline const std::vector<std::string_view>& operator_table() {
    static const std::vector<std::string_view> ops = {
        ">>=", "<<=", "**=",
        "==", "!=", "<=", ">=", "&&", "||", "->", "=>", "+=", "-=", "*=",
        "/=", "%=", "|=", "&=", "^=", "<<", ">>", "++", "--", "**",
        "+", "-", "*", "/", "%", "=", "!", "<", ">", "&", "|", "^", "~",
        "?", ":", ".",
    };
    return ops;
}

} // namespace detail

/// Comment- and string-aware Solidity scanner. Comments and string literals
/// are isolated before anything else, so a "//" inside a string never opens
/// a comment and comment text never reaches the token list. Lexing is
/// best-effort: unterminated constructs produce a diagnostic and the scan
/// continues to end of input.
inline TokenStream tokenize(std::string_view source) {
    TokenStream out;
    std::size_t i = 0;
    int line = 1;
    const std::size_t n = source.size();

    const auto push_token = [&](TokenKind kind, std::size_t start, std::size_t end) {
        out.tokens.push_back(Token{kind, std::string(source.substr(start, end - start)), line, start});
    };

    while (i < n) {
        const char c = source[i];
        if (c == '\n') {
            ++line;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }

        // line comment
        if (c == '/' && i + 1 < n && source[i + 1] == '/') {
            const std::size_t start = i;
            while (i < n && source[i] != '\n') ++i;
            out.comments.push_back(Comment{std::string(source.substr(start, i - start)), line, line,
                                           CommentStyle::Line, start, i});
            continue;
        }

        // block comment
        if (c == '/' && i + 1 < n && source[i + 1] == '*') {
            const std::size_t start = i;
            const int start_line = line;
            i += 2;
            bool closed = false;
            while (i < n) {
                if (source[i] == '\n') ++line;
                if (source[i] == '*' && i + 1 < n && source[i + 1] == '/') {
                    i += 2;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) {
                out.diagnostics.push_back(LexDiagnostic{"unterminated block comment", start_line});
            }
            out.comments.push_back(Comment{std::string(source.substr(start, i - start)), start_line,
                                           line, CommentStyle::Block, start, i});
            continue;
        }

        // string literal, escape-aware; Solidity strings do not span lines
        if (c == '"' || c == '\'') {
            const std::size_t start = i;
            const char quote = c;
            ++i;
            bool closed = false;
            while (i < n && source[i] != '\n') {
                if (source[i] == '\\' && i + 1 < n) {
                    i += 2;
                    continue;
                }
                if (source[i] == quote) {
                    ++i;
                    closed = true;
                    break;
                }
                ++i;
            }
            if (!closed) {
                out.diagnostics.push_back(LexDiagnostic{"unterminated string literal", line});
            }
            push_token(TokenKind::Literal, start, i);
            continue;
        }

        // number literal: decimal, hex, underscores, exponent
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = i;
            if (c == '0' && i + 1 < n && (source[i + 1] == 'x' || source[i + 1] == 'X')) {
                i += 2;
                while (i < n && (std::isxdigit(static_cast<unsigned char>(source[i])) || source[i] == '_')) ++i;
            } else {
                while (i < n && (std::isdigit(static_cast<unsigned char>(source[i])) ||
                                 source[i] == '_' || source[i] == '.')) {
                    ++i;
                }
                if (i < n && (source[i] == 'e' || source[i] == 'E')) {
                    std::size_t j = i + 1;
                    if (j < n && (source[j] == '+' || source[j] == '-')) ++j;
                    if (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) {
                        i = j;
                        while (i < n && std::isdigit(static_cast<unsigned char>(source[i]))) ++i;
                    }
                }
            }
            push_token(TokenKind::Literal, start, i);
            continue;
        }

        // identifier or keyword
        if (detail::is_ident_start(c)) {
            const std::size_t start = i;
            while (i < n && detail::is_ident_part(source[i])) ++i;
            const auto word = source.substr(start, i - start);
            TokenKind kind = TokenKind::Identifier;
            if (word == "true" || word == "false") {
                kind = TokenKind::Literal;
            } else if (detail::is_solidity_keyword(word)) {
                kind = TokenKind::Keyword;
            }
            push_token(kind, start, i);
            continue;
        }

        // punctuation
        if (c == ';' || c == ',' || c == '(' || c == ')' || c == '{' || c == '}' ||
            c == '[' || c == ']') {
            push_token(TokenKind::Punctuation, i, i + 1);
            ++i;
            continue;
        }

        // operators, longest match first
        {
            bool matched = false;
            for (const auto op : detail::operator_table()) {
                if (source.substr(i, op.size()) == op) {
                    push_token(TokenKind::Operator, i, i + op.size());
                    i += op.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }

        out.diagnostics.push_back(
            LexDiagnostic{std::string("unexpected character '") + c + "'", line});
        ++i;
    }
    return out;
}

/// Token texts joined with single spaces. Re-tokenizing the result yields the
/// same kind/text sequence for comment-free sources.
inline std::string render(const TokenStream& stream) {
    std::string out;
    for (const auto& tok : stream.tokens) {
        if (!out.empty()) out += ' ';
        out += tok.text;
    }
    return out;
}

} // namespace ethver
