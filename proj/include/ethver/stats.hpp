#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "ethver/errors.hpp"

namespace ethver {

struct Series {
    std::string label;
    std::vector<double> values;
};

namespace detail {

inline void require_pair(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DegenerateSeries("series lengths differ");
    if (x.size() < 2) throw DegenerateSeries("correlation needs at least two points");
    for (const auto& v : x) {
        if (!std::isfinite(v)) throw DegenerateSeries("non-finite value in series");
    }
    for (const auto& v : y) {
        if (!std::isfinite(v)) throw DegenerateSeries("non-finite value in series");
    }
}

/// Merge-sort inversion count: pairs (i < j) with values[i] > values[j].
inline std::int64_t count_inversions(std::vector<double>& values, std::vector<double>& scratch,
                                     std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t swaps = count_inversions(values, scratch, lo, mid) +
                         count_inversions(values, scratch, mid, hi);
    std::size_t l = lo, r = mid, w = lo;
    while (l < mid && r < hi) {
        if (values[l] <= values[r]) {
            scratch[w++] = values[l++];
        } else {
            swaps += static_cast<std::int64_t>(mid - l);
            scratch[w++] = values[r++];
        }
    }
    while (l < mid) scratch[w++] = values[l++];
    while (r < hi) scratch[w++] = values[r++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              values.begin() + static_cast<std::ptrdiff_t>(lo));
    return swaps;
}

inline std::int64_t tie_pair_sum(const std::vector<double>& sorted) {
    std::int64_t sum = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= sorted.size(); ++i) {
        if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
            ++run;
        } else {
            sum += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
            run = 1;
        }
    }
    return sum;
}

} // namespace detail

/// Sample Pearson product-moment coefficient, single-pass Welford update.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair(x, y);
    double mean_x = 0.0, mean_y = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double n = static_cast<double>(k + 1);
        const double dx = x[k] - mean_x;
        mean_x += dx / n;
        const double dy = y[k] - mean_y;
        mean_y += dy / n;
        sxx += dx * (x[k] - mean_x);
        syy += dy * (y[k] - mean_y);
        sxy += dx * (y[k] - mean_y);
    }
    if (sxx == 0.0 || syy == 0.0) throw DegenerateSeries("constant series has no correlation");
    return sxy / std::sqrt(sxx * syy);
}

/// Average ranks, 1-based; tied values share the mean of their rank range.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rho: Pearson over average-ranked data.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair(x, y);
    return pearson(average_ranks(x), average_ranks(y));
}

/// Kendall tau-b via Knight's O(n log n) scheme: sort by (x, y), count
/// discordant pairs as y-inversions, correct the denominator with the
/// standard tie terms.
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_pair(x, y);
    const std::size_t n = x.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    std::int64_t ties_x = 0, ties_both = 0;
    {
        std::size_t run_x = 1, run_xy = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            const bool same_x = i < n && x[order[i]] == x[order[i - 1]];
            const bool same_xy = same_x && y[order[i]] == y[order[i - 1]];
            if (same_x) {
                ++run_x;
            } else {
                ties_x += static_cast<std::int64_t>(run_x) * static_cast<std::int64_t>(run_x - 1) / 2;
                run_x = 1;
            }
            if (same_xy) {
                ++run_xy;
            } else {
                ties_both += static_cast<std::int64_t>(run_xy) * static_cast<std::int64_t>(run_xy - 1) / 2;
                run_xy = 1;
            }
        }
    }

    std::vector<double> y_sorted_by_x(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted_by_x[i] = y[order[i]];
    std::vector<double> merged = y_sorted_by_x;
    std::vector<double> scratch(n);
    const std::int64_t discordant = detail::count_inversions(merged, scratch, 0, n);

    std::sort(y_sorted_by_x.begin(), y_sorted_by_x.end());
    const std::int64_t ties_y = detail::tie_pair_sum(y_sorted_by_x);

    const std::int64_t n0 =
        static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
    const double denominator = std::sqrt(static_cast<double>(n0 - ties_x)) *
                               std::sqrt(static_cast<double>(n0 - ties_y));
    if (denominator == 0.0) throw DegenerateSeries("all-tied series has no tau");
    const std::int64_t concordant_minus_discordant =
        n0 - ties_x - ties_y + ties_both - 2 * discordant;
    return static_cast<double>(concordant_minus_discordant) / denominator;
}

// -- correlation strength ---------------------------------------------------

enum class Strength { Strong, Moderate, Weak };

inline const char* to_string(Strength s) {
    switch (s) {
        case Strength::Strong: return "strong";
        case Strength::Moderate: return "moderate";
        case Strength::Weak: return "weak";
    }
    return "?";
}

/// Strong above 0.8 in absolute value, moderate above 0.5, weak otherwise.
inline Strength classify_strength(double coefficient) {
    const double r = std::fabs(coefficient);
    if (r > 0.8) return Strength::Strong;
    if (r > 0.5) return Strength::Moderate;
    return Strength::Weak;
}

struct CorrelationResult {
    std::string pair_label;
    std::optional<double> pearson;
    std::optional<double> spearman;
    std::optional<double> kendall_tau;

    std::optional<Strength> pearson_strength() const {
        return pearson ? std::optional(classify_strength(*pearson)) : std::nullopt;
    }
    std::optional<Strength> spearman_strength() const {
        return spearman ? std::optional(classify_strength(*spearman)) : std::nullopt;
    }
    std::optional<Strength> kendall_strength() const {
        return kendall_tau ? std::optional(classify_strength(*kendall_tau)) : std::nullopt;
    }
};

/// All three coefficients for one labelled pair. A degenerate column (for
/// example a constant metric) leaves the affected coefficients unset rather
/// than failing the whole matrix.
inline CorrelationResult correlate_pair(const std::string& label, const std::vector<double>& x,
                                        const std::vector<double>& y) {
    CorrelationResult result;
    result.pair_label = label;
    try {
        result.pearson = pearson(x, y);
    } catch (const DegenerateSeries&) {
    }
    try {
        result.spearman = spearman(x, y);
    } catch (const DegenerateSeries&) {
    }
    try {
        result.kendall_tau = kendall_tau(x, y);
    } catch (const DegenerateSeries&) {
    }
    return result;
}

/// One joined observation: file-level metrics plus the ingested
/// vulnerability total for the same contract.
struct JoinedRow {
    double sloc = 0.0;
    double mccabe = 0.0;
    double halstead_volume = 0.0;
    double maintainability_index = 0.0;
    double vulnerabilities = 0.0;
};

/// The six metric-metric pairs followed by the four metric-vulnerability
/// pairs, in fixed order.
inline std::vector<CorrelationResult> correlation_matrix(const std::vector<JoinedRow>& rows) {
    if (rows.size() < 2) {
        throw InsufficientData("correlation matrix needs at least two joined rows, got " +
                               std::to_string(rows.size()));
    }
    std::vector<double> sloc_v, cc_v, hv_v, mi_v, vuln_v;
    for (const auto& row : rows) {
        sloc_v.push_back(row.sloc);
        cc_v.push_back(row.mccabe);
        hv_v.push_back(row.halstead_volume);
        mi_v.push_back(row.maintainability_index);
        vuln_v.push_back(row.vulnerabilities);
    }
    return {
        correlate_pair("SLOC-McCabe", sloc_v, cc_v),
        correlate_pair("SLOC-HV", sloc_v, hv_v),
        correlate_pair("SLOC-MI", sloc_v, mi_v),
        correlate_pair("McCabe-HV", cc_v, hv_v),
        correlate_pair("McCabe-MI", cc_v, mi_v),
        correlate_pair("HV-MI", hv_v, mi_v),
        correlate_pair("SLOC-Vulnerability", sloc_v, vuln_v),
        correlate_pair("HV-Vulnerability", hv_v, vuln_v),
        correlate_pair("McCabe-Vulnerability", cc_v, vuln_v),
        correlate_pair("MI-Vulnerability", mi_v, vuln_v),
    };
}

// -- vulnerability timeline & version histogram ------------------------------

struct VulnerabilityTimeline {
    std::string family_label;
    std::vector<long> totals; // one per version, version order
    bool changed = false;
};

/// Change flag is false iff every version reports the same total (single
/// version included).
inline VulnerabilityTimeline vulnerability_timeline(const std::string& family_label,
                                                    const std::vector<long>& totals) {
    VulnerabilityTimeline tl;
    tl.family_label = family_label;
    tl.totals = totals;
    for (const long t : totals) {
        if (t != totals.front()) {
            tl.changed = true;
            break;
        }
    }
    return tl;
}

struct VersionHistogram {
    long families = 0;
    long single_version = 0;  // exactly 1
    long two_to_ten = 0;      // 2..10
    long more_than_ten = 0;   // > 10

    double percent(long bucket) const {
        return families == 0 ? 0.0 : 100.0 * static_cast<double>(bucket) / static_cast<double>(families);
    }
};

inline VersionHistogram version_histogram(const std::vector<long>& versions_per_family) {
    VersionHistogram h;
    for (const long count : versions_per_family) {
        if (count < 1) continue;
        ++h.families;
        if (count == 1) ++h.single_version;
        else if (count <= 10) ++h.two_to_ten;
        else ++h.more_than_ten;
    }
    return h;
}

} // namespace ethver
