#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ethver/errors.hpp"
#include "ethver/lexer.hpp"
#include "ethver/metrics.hpp"
#include "ethver/types.hpp"

namespace ethver {

struct KeywordList {
    std::vector<std::string> phrases;
};

inline KeywordList default_satd_keywords() {
    return KeywordList{{"todo", "fix", "fixme", "deprecated", "refactor", "temporary", "wip",
                        "work in progress", "workaround"}};
}

/// One debt admission: a keyword-bearing comment plus the code region it
/// annotates. comment_text and snippet are normalized (comments lowercased,
/// whitespace collapsed; snippets are code tokens joined by single spaces).
struct SatdInstance {
    std::string comment_text;
    std::string matched_keyword;
    std::string snippet;
    std::string location; // method name or "file-scope"
};

inline constexpr const char* kFileScope = "file-scope";

/// Lowercase + collapse all whitespace runs to single spaces + trim.
inline std::string normalize_comment(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        const unsigned char u = static_cast<unsigned char>(ch);
        if (std::isspace(u)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out += ' ';
            pending_space = false;
        }
        out += static_cast<char>(std::tolower(u));
    }
    return out;
}

namespace detail {

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Word-boundary occurrence check. The needle is already lowercase and
/// whitespace-collapsed, as is the haystack, so multi-word phrases match
/// regardless of the original spacing.
inline bool contains_word(const std::string& haystack, const std::string& needle) {
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t end = pos + needle.size();
        const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

} // namespace detail

/// Keyword scan over extracted comments. One instance per comment at most;
/// when several keywords hit, the first one in list order is recorded.
inline std::vector<SatdInstance> detect_satd(const std::vector<Comment>& comments,
                                             const KeywordList& keywords) {
    std::vector<SatdInstance> found;
    for (const auto& comment : comments) {
        const std::string text = normalize_comment(comment.text);
        for (const auto& keyword : keywords.phrases) {
            if (detail::contains_word(text, keyword)) {
                found.push_back(SatdInstance{text, keyword, "", ""});
                break;
            }
        }
    }
    return found;
}

inline std::string normalize_tokens(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& tok : tokens) {
        if (!out.empty()) out += ' ';
        out += tok.text;
    }
    return out;
}

struct LinkedSnippet {
    std::string snippet;
    std::string location;
};

/// Snippet linkage: a comment inside a method is linked to that method's
/// body; a file-scope comment is linked to the next statement or block after
/// it. A trailing comment with nothing after it links to an empty snippet.
inline LinkedSnippet link_snippet(const Comment& comment, const TokenStream& stream,
                                  const std::vector<MethodSpan>& spans) {
    for (const auto& span : spans) {
        if (comment.start_offset >= span.start_offset && comment.start_offset < span.end_offset) {
            return LinkedSnippet{normalize_tokens(span.body_tokens), span.name};
        }
    }

    const auto& toks = stream.tokens;
    std::size_t first = 0;
    while (first < toks.size() && toks[first].offset < comment.end_offset) ++first;
    if (first == toks.size()) return LinkedSnippet{"", kFileScope};

    // take everything through the end of the next block, or through the next
    // ';' if no block opens before it
    std::vector<Token> region;
    int depth = 0;
    for (std::size_t i = first; i < toks.size(); ++i) {
        region.push_back(toks[i]);
        if (toks[i].text == "{") {
            ++depth;
        } else if (toks[i].text == "}") {
            --depth;
            if (depth <= 0) break;
        } else if (toks[i].text == ";" && depth == 0) {
            break;
        }
    }
    return LinkedSnippet{normalize_tokens(region), kFileScope};
}

/// Everything the evolution tracker needs to know about one version's debt.
struct VersionDebt {
    int version_index = 0;
    std::vector<SatdInstance> instances;
    std::map<std::string, std::vector<std::string>> method_bodies; // name -> normalized bodies
    std::string normalized_file;
};

/// Full per-version scan: comments -> instances -> linked snippets.
inline VersionDebt scan_version_debt(int version_index, std::string_view source,
                                     const KeywordList& keywords) {
    VersionDebt out;
    out.version_index = version_index;
    const TokenStream stream = tokenize(source);
    std::vector<MethodSpan> spans;
    try {
        spans = extract_methods(stream);
    } catch (const BraceImbalance&) {
        // unbalanced file: every comment links at file scope
    }
    out.normalized_file = normalize_tokens(stream.tokens);
    for (const auto& span : spans) {
        out.method_bodies[span.name].push_back(normalize_tokens(span.body_tokens));
    }

    for (const auto& comment : stream.comments) {
        const std::string text = normalize_comment(comment.text);
        for (const auto& keyword : keywords.phrases) {
            if (detail::contains_word(text, keyword)) {
                const LinkedSnippet linked = link_snippet(comment, stream, spans);
                out.instances.push_back(SatdInstance{text, keyword, linked.snippet, linked.location});
                break;
            }
        }
    }
    return out;
}

enum class DebtEventKind { Introduced, Resolved, InconsistentCommentRemoval, PersistsDespiteCodeChange };

inline const char* to_string(DebtEventKind k) {
    switch (k) {
        case DebtEventKind::Introduced: return "introduced";
        case DebtEventKind::Resolved: return "resolved";
        case DebtEventKind::InconsistentCommentRemoval: return "inconsistent_comment_removal";
        case DebtEventKind::PersistsDespiteCodeChange: return "persists_despite_code_change";
    }
    return "?";
}

struct DebtEvent {
    DebtEventKind kind;
    std::string comment_text;
    std::string matched_keyword;
};

struct TimelineStep {
    int version_index = 0;
    std::vector<SatdInstance> instances;
    std::vector<DebtEvent> events; // transitions arriving at this version
};

struct DebtTimeline {
    ContractIdentity family;
    std::vector<TimelineStep> per_version;

    long resolved_count() const {
        long n = 0;
        for (const auto& step : per_version) {
            for (const auto& ev : step.events) {
                if (ev.kind == DebtEventKind::Resolved) ++n;
            }
        }
        return n;
    }
};

namespace detail {

/// Did the code a vanished comment pointed at change between versions? For a
/// method-scoped snippet: unchanged iff the same-named method still has an
/// identical normalized body. For a file-scope snippet: unchanged iff the
/// snippet text still occurs in the newer file.
inline bool snippet_survives(const SatdInstance& inst, const VersionDebt& next) {
    if (inst.location == kFileScope) {
        return next.normalized_file.find(inst.snippet) != std::string::npos;
    }
    const auto it = next.method_bodies.find(inst.location);
    if (it == next.method_bodies.end()) return false;
    return std::find(it->second.begin(), it->second.end(), inst.snippet) != it->second.end();
}

} // namespace detail

/// Matches instances across adjacent versions by normalized comment text
/// (nth occurrence to nth occurrence) and classifies each transition:
///   comment gone,  code changed   -> Resolved
///   comment gone,  code unchanged -> InconsistentCommentRemoval
///   comment kept,  code changed   -> PersistsDespiteCodeChange
///   comment kept,  code unchanged -> (no event)
///   text unseen before            -> Introduced
inline DebtTimeline track_evolution(const ContractIdentity& family,
                                    const std::vector<VersionDebt>& versions) {
    DebtTimeline timeline;
    timeline.family = family;
    for (const auto& v : versions) {
        timeline.per_version.push_back(TimelineStep{v.version_index, v.instances, {}});
    }

    for (std::size_t step = 1; step < versions.size(); ++step) {
        const VersionDebt& prev = versions[step - 1];
        const VersionDebt& next = versions[step];
        auto& events = timeline.per_version[step].events;

        std::map<std::string, std::vector<const SatdInstance*>> prev_by_text;
        std::map<std::string, std::vector<const SatdInstance*>> next_by_text;
        for (const auto& inst : prev.instances) prev_by_text[inst.comment_text].push_back(&inst);
        for (const auto& inst : next.instances) next_by_text[inst.comment_text].push_back(&inst);

        for (const auto& inst : prev.instances) {
            const auto& olds = prev_by_text[inst.comment_text];
            const auto nth = static_cast<std::size_t>(
                std::find(olds.begin(), olds.end(), &inst) - olds.begin());
            const auto it = next_by_text.find(inst.comment_text);
            const SatdInstance* match =
                (it != next_by_text.end() && nth < it->second.size()) ? it->second[nth] : nullptr;

            if (match != nullptr) {
                if (match->snippet != inst.snippet) {
                    events.push_back(DebtEvent{DebtEventKind::PersistsDespiteCodeChange,
                                               inst.comment_text, inst.matched_keyword});
                }
            } else if (detail::snippet_survives(inst, next)) {
                events.push_back(DebtEvent{DebtEventKind::InconsistentCommentRemoval,
                                           inst.comment_text, inst.matched_keyword});
            } else {
                events.push_back(
                    DebtEvent{DebtEventKind::Resolved, inst.comment_text, inst.matched_keyword});
            }
        }

        for (const auto& inst : next.instances) {
            const auto& news = next_by_text[inst.comment_text];
            const auto nth = static_cast<std::size_t>(
                std::find(news.begin(), news.end(), &inst) - news.begin());
            const auto it = prev_by_text.find(inst.comment_text);
            const bool matched = it != prev_by_text.end() && nth < it->second.size();
            if (!matched) {
                events.push_back(
                    DebtEvent{DebtEventKind::Introduced, inst.comment_text, inst.matched_keyword});
            }
        }
    }
    return timeline;
}

struct DebtStats {
    double mean_initial_debt = 0.0;
    double median_initial_debt = 0.0;
    double pct_with_removal = 0.0;
    bool pct_defined = false; // false when no family carries initial debt
    long families = 0;
    long debt_bearing_families = 0;
    long families_with_removal = 0;
};

/// Initial-debt statistics over all families plus the share of debt-bearing
/// families that ever resolved an instance.
inline DebtStats debt_stats(const std::vector<DebtTimeline>& timelines) {
    if (timelines.empty()) throw EmptyInput("debt_stats needs at least one timeline");

    DebtStats stats;
    stats.families = static_cast<long>(timelines.size());
    std::vector<long> initial_counts;
    for (const auto& tl : timelines) {
        const long initial =
            tl.per_version.empty() ? 0 : static_cast<long>(tl.per_version.front().instances.size());
        initial_counts.push_back(initial);
        if (initial > 0) {
            ++stats.debt_bearing_families;
            if (tl.resolved_count() > 0) ++stats.families_with_removal;
        }
    }

    double sum = 0.0;
    for (long c : initial_counts) sum += static_cast<double>(c);
    stats.mean_initial_debt = sum / static_cast<double>(initial_counts.size());

    std::sort(initial_counts.begin(), initial_counts.end());
    const std::size_t mid = initial_counts.size() / 2;
    stats.median_initial_debt =
        initial_counts.size() % 2 == 1
            ? static_cast<double>(initial_counts[mid])
            : (static_cast<double>(initial_counts[mid - 1]) + static_cast<double>(initial_counts[mid])) / 2.0;

    if (stats.debt_bearing_families > 0) {
        stats.pct_defined = true;
        stats.pct_with_removal = 100.0 * static_cast<double>(stats.families_with_removal) /
                                 static_cast<double>(stats.debt_bearing_families);
    }
    return stats;
}

} // namespace ethver
