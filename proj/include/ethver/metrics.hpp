#pragma once

#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ethver/errors.hpp"
#include "ethver/lexer.hpp"

namespace ethver {

/// Metrics for one subject: a whole file or a single method body.
struct MetricsRecord {
    std::string subject;
    std::string level; // "file" | "method"
    long sloc = 0;
    long mccabe = 1;
    double halstead_volume = 0.0;
    double maintainability_index = 0.0;
};

namespace detail {

inline bool is_decision_point(const Token& tok) {
    if (tok.kind == TokenKind::Keyword) {
        return tok.text == "if" || tok.text == "while" || tok.text == "for" ||
               tok.text == "do" || tok.text == "catch";
    }
    return tok.kind == TokenKind::Operator && tok.text == "?";
}

// grouping-only punctuation carries no Halstead weight
inline bool is_grouping_only(const Token& tok) {
    if (tok.kind != TokenKind::Punctuation) return false;
    return tok.text == ";" || tok.text == "{" || tok.text == "}" || tok.text == "(" ||
           tok.text == ")" || tok.text == ",";
}

inline bool is_halstead_operand(const Token& tok) {
    return tok.kind == TokenKind::Identifier || tok.kind == TokenKind::Literal;
}

} // namespace detail

/// Distinct lines bearing at least one code token. Comment-only and blank
/// lines never count because comments are not tokens.
inline long sloc(const std::vector<Token>& tokens) {
    std::set<int> lines;
    for (const auto& tok : tokens) lines.insert(tok.line);
    return static_cast<long>(lines.size());
}

inline long sloc(const TokenStream& stream) { return sloc(stream.tokens); }

/// Decision points plus one. Decision points: if, while, for, do, the
/// ternary '?', and catch. Boolean short-circuit operators do not count.
inline long mccabe(const std::vector<Token>& tokens) {
    long decisions = 0;
    for (const auto& tok : tokens) {
        if (detail::is_decision_point(tok)) ++decisions;
    }
    return decisions + 1;
}

inline long mccabe(const TokenStream& stream) { return mccabe(stream.tokens); }

/// V = N * log2(n) over the operator/operand partition: identifiers and
/// literals are operands; keywords, operators and non-grouping punctuation
/// are operators. Empty token runs have volume 0.
inline double halstead_volume(const std::vector<Token>& tokens) {
    long total = 0;
    std::set<std::string_view> distinct_operators;
    std::set<std::string_view> distinct_operands;
    for (const auto& tok : tokens) {
        if (detail::is_grouping_only(tok)) continue;
        ++total;
        if (detail::is_halstead_operand(tok)) {
            distinct_operands.insert(tok.text);
        } else {
            distinct_operators.insert(tok.text);
        }
    }
    const long vocabulary = static_cast<long>(distinct_operators.size() + distinct_operands.size());
    if (total == 0 || vocabulary == 0) return 0.0;
    return static_cast<double>(total) * std::log2(static_cast<double>(vocabulary));
}

inline double halstead_volume(const TokenStream& stream) { return halstead_volume(stream.tokens); }

/// 171 - 5.2*ln(HV) - 0.23*CC - 16.2*ln(SLOC), with HV and SLOC clamped to
/// at least 1 so trivial subjects stay finite.
inline double maintainability_index(long sloc_count, long mccabe_count, double hv) {
    const double safe_hv = hv < 1.0 ? 1.0 : hv;
    const double safe_sloc = sloc_count < 1 ? 1.0 : static_cast<double>(sloc_count);
    return 171.0 - 5.2 * std::log(safe_hv) - 0.23 * static_cast<double>(mccabe_count) -
           16.2 * std::log(safe_sloc);
}

enum class MethodKind { Function, Modifier, Constructor, Fallback, Receive };

inline const char* to_string(MethodKind k) {
    switch (k) {
        case MethodKind::Function: return "function";
        case MethodKind::Modifier: return "modifier";
        case MethodKind::Constructor: return "constructor";
        case MethodKind::Fallback: return "fallback";
        case MethodKind::Receive: return "receive";
    }
    return "?";
}

struct MethodSpan {
    std::string name;
    MethodKind kind = MethodKind::Function;
    int start_line = 1;
    int end_line = 1;
    std::size_t start_offset = 0;
    std::size_t end_offset = 0; // one past the span's last token
    std::vector<Token> body_tokens; // tokens strictly inside the braces
};

/// Brace-matching method finder; no grammar, which keeps it working across
/// compiler versions. Declarations that end in ';' (interfaces, abstract
/// contracts) become empty-body spans.
inline std::vector<MethodSpan> extract_methods(const TokenStream& stream) {
    const auto& toks = stream.tokens;
    std::vector<MethodSpan> spans;

    std::size_t i = 0;
    while (i < toks.size()) {
        const Token& tok = toks[i];
        MethodKind kind;
        if (tok.kind == TokenKind::Keyword && tok.text == "function") {
            kind = MethodKind::Function;
        } else if (tok.kind == TokenKind::Keyword && tok.text == "modifier") {
            kind = MethodKind::Modifier;
        } else if (tok.kind == TokenKind::Keyword && tok.text == "constructor") {
            kind = MethodKind::Constructor;
        } else if (tok.kind == TokenKind::Keyword && tok.text == "fallback" &&
                   i + 1 < toks.size() && toks[i + 1].text == "(") {
            kind = MethodKind::Fallback;
        } else if (tok.kind == TokenKind::Keyword && tok.text == "receive" &&
                   i + 1 < toks.size() && toks[i + 1].text == "(") {
            kind = MethodKind::Receive;
        } else {
            ++i;
            continue;
        }

        MethodSpan span;
        span.kind = kind;
        span.start_line = tok.line;
        span.start_offset = tok.offset;
        switch (kind) {
            case MethodKind::Function:
            case MethodKind::Modifier:
                if (i + 1 < toks.size() && toks[i + 1].kind == TokenKind::Identifier) {
                    span.name = toks[i + 1].text;
                } else {
                    span.name = kind == MethodKind::Modifier ? "modifier" : "fallback";
                }
                break;
            case MethodKind::Constructor: span.name = "constructor"; break;
            case MethodKind::Fallback: span.name = "fallback"; break;
            case MethodKind::Receive: span.name = "receive"; break;
        }

        // scan the header for the body '{' or the terminating ';'
        std::size_t j = i + 1;
        while (j < toks.size() && toks[j].text != "{" && toks[j].text != ";") ++j;
        if (j == toks.size()) {
            throw BraceImbalance("method '" + span.name + "' has no body or terminator (line " +
                                 std::to_string(span.start_line) + ")");
        }

        if (toks[j].text == ";") {
            span.end_line = toks[j].line;
            span.end_offset = toks[j].offset + toks[j].text.size();
            spans.push_back(std::move(span));
            i = j + 1;
            continue;
        }

        int depth = 1;
        std::size_t k = j + 1;
        while (k < toks.size() && depth > 0) {
            if (toks[k].text == "{") ++depth;
            else if (toks[k].text == "}") --depth;
            if (depth > 0) span.body_tokens.push_back(toks[k]);
            ++k;
        }
        if (depth != 0) {
            throw BraceImbalance("unbalanced braces in method '" + span.name + "' (line " +
                                 std::to_string(span.start_line) + ")");
        }
        span.end_line = toks[k - 1].line;
        span.end_offset = toks[k - 1].offset + toks[k - 1].text.size();
        spans.push_back(std::move(span));
        i = k;
    }
    return spans;
}

inline std::vector<MethodSpan> extract_methods(std::string_view source) {
    return extract_methods(tokenize(source));
}

enum class AnalysisLevel { File, Method };

inline MetricsRecord measure(const std::vector<Token>& tokens, std::string subject,
                             std::string level) {
    MetricsRecord rec;
    rec.subject = std::move(subject);
    rec.level = std::move(level);
    rec.sloc = sloc(tokens);
    rec.mccabe = mccabe(tokens);
    rec.halstead_volume = halstead_volume(tokens);
    rec.maintainability_index = maintainability_index(rec.sloc, rec.mccabe, rec.halstead_volume);
    return rec;
}

/// File level: one record over the whole token stream. Method level: one
/// record per method span, measured over its body tokens only, so interface
/// stubs report zero lines.
inline std::vector<MetricsRecord> analyze(std::string_view source, AnalysisLevel level,
                                          const std::string& subject) {
    const TokenStream stream = tokenize(source);
    std::vector<MetricsRecord> records;
    if (level == AnalysisLevel::File) {
        records.push_back(measure(stream.tokens, subject, "file"));
        return records;
    }
    for (const auto& span : extract_methods(stream)) {
        records.push_back(measure(span.body_tokens, span.name, "method"));
    }
    return records;
}

} // namespace ethver
