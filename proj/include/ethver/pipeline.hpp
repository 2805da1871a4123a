#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ethver/client.hpp"
#include "ethver/dataset.hpp"
#include "ethver/linker.hpp"
#include "ethver/log.hpp"
#include "ethver/metrics.hpp"
#include "ethver/satd.hpp"
#include "ethver/stats.hpp"
#include "ethver/vulns.hpp"

namespace ethver {

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path keys_file;
    std::filesystem::path fixtures_dir; // non-empty selects replay mode
    std::filesystem::path keywords_file;
    std::filesystem::path vulns_file;
    int workers = 3;
    int max_versions = 100;
    int page_size = 50'000;
    std::string level = "file"; // file | method
};

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << body;
}

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

inline std::string fixed5(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return buf;
}

} // namespace detail

// -- extract -----------------------------------------------------------------

struct ExtractSummary {
    long families = 0;
    long versions_written = 0;
    long excluded_anomalous = 0;
    long failed_seeds = 0;
};

/// Walks a Sanctuary-style input directory, assembles a version family per
/// seed contract, drops anomalously versioned families, and writes the rest
/// into the dataset layout. Seeds are partitioned across `workers` threads;
/// results are committed in input order so the artifacts do not depend on
/// the partitioning.
inline ExtractSummary run_extract(const RunConfig& cfg, Gateway& gateway, JsonLogger& log) {
    if (!std::filesystem::exists(cfg.input)) {
        throw IoError("input dataset does not exist: " + cfg.input.string());
    }

    std::vector<std::pair<Address, std::string>> seeds; // (address, input name)
    {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::recursive_directory_iterator(cfg.input)) {
            if (entry.is_regular_file() && entry.path().extension() == ".sol") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        std::set<Address> seen;
        for (const auto& file : files) {
            try {
                auto [address, name] = parse_sanctuary_name(file.filename().string());
                if (seen.insert(address).second) seeds.emplace_back(address, name);
            } catch (const MalformedName& e) {
                log.warn("skip_input_file", {{"file", file.string()}, {"reason", e.what()}});
            }
        }
    }

    struct SeedOutcome {
        std::optional<ContractFamily> family;
        std::string error;
    };
    std::vector<SeedOutcome> outcomes(seeds.size());

    const int workers = std::max(1, cfg.workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < seeds.size();
                 i += static_cast<std::size_t>(workers)) {
                try {
                    outcomes[i].family = collect_versions(seeds[i].first, gateway, cfg.page_size);
                } catch (const std::exception& e) {
                    outcomes[i].error = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    DatasetStore store(cfg.output / "dataset");
    ExtractSummary summary;
    std::map<ContractIdentity, long> family_versions;
    std::set<ContractIdentity> excluded;
    std::set<std::string> written_paths;

    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const auto& outcome = outcomes[i];
        if (!outcome.family) {
            ++summary.failed_seeds;
            log.warn("seed_failed", {{"address", seeds[i].first}, {"reason", outcome.error}});
            continue;
        }
        const ContractFamily& family = *outcome.family;
        if (filter_anomalous(family, cfg.max_versions)) {
            if (excluded.insert(family.identity).second) ++summary.excluded_anomalous;
            log.event("family_excluded",
                      {{"name", family.identity.name},
                       {"deployer", family.identity.deployer},
                       {"versions", std::to_string(family.versions.size())}});
            continue;
        }
        if (family_versions.count(family.identity) > 0) continue; // re-seeded family
        family_versions[family.identity] = static_cast<long>(family.versions.size());
        for (const auto& version : family.versions) {
            if (!version.source || !version.source->has_source()) continue; // retained, source-less
            const auto path = store.write_version(version);
            if (written_paths.insert(path.string()).second) ++summary.versions_written;
        }
    }
    summary.families = static_cast<long>(family_versions.size());

    nlohmann::json manifest;
    manifest["families"] = summary.families;
    manifest["versions"] = summary.versions_written;
    manifest["excluded_anomalous"] = summary.excluded_anomalous;
    manifest["failed_seeds"] = summary.failed_seeds;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [identity, count] : family_versions) {
        entries.push_back({{"name", identity.name},
                           {"deployer", identity.deployer},
                           {"versions", count}});
    }
    manifest["entries"] = entries;
    detail::write_json_file(cfg.output / "manifest.json", manifest);
    return summary;
}

// -- analyze -----------------------------------------------------------------

struct AnalyzeResult {
    std::vector<MetricsRecord> records;
    long skipped_files = 0;
};

/// Metrics for every stored version at the requested level. Subjects are
/// dataset-relative paths (method rows append "#<method>") so runs from
/// different roots produce identical artifacts.
inline AnalyzeResult run_analyze(const RunConfig& cfg, JsonLogger& log) {
    DatasetStore store(cfg.input);
    const auto read = store.read_families();
    for (const auto& skip : read.skipped) log.warn("skip_dataset_entry", {{"entry", skip}});

    const AnalysisLevel level =
        cfg.level == "method" ? AnalysisLevel::Method : AnalysisLevel::File;

    AnalyzeResult result;
    std::vector<MetricsRecord>& records = result.records;
    for (const auto& family : read.families) {
        for (const auto& version : family.versions) {
            if (!version.source || !version.source->has_source()) continue;
            const auto rel =
                std::filesystem::relative(store.version_path(version), store.root()).generic_string();
            try {
                for (auto rec : analyze(version.source->source_text, level, rel)) {
                    if (level == AnalysisLevel::Method) rec.subject = rel + "#" + rec.subject;
                    records.push_back(std::move(rec));
                }
            } catch (const BraceImbalance& e) {
                ++result.skipped_files;
                log.warn("skip_unbalanced_file", {{"file", rel}, {"reason", e.what()}});
            }
        }
    }

    std::string csv = "subject,level,sloc,mccabe,halstead_volume,maintainability_index\n";
    nlohmann::json json_rows = nlohmann::json::array();
    for (const auto& rec : records) {
        csv += rec.subject + "," + rec.level + "," + std::to_string(rec.sloc) + "," +
               std::to_string(rec.mccabe) + "," + detail::fixed5(rec.halstead_volume) + "," +
               detail::fixed5(rec.maintainability_index) + "\n";
        json_rows.push_back({{"subject", rec.subject},
                             {"level", rec.level},
                             {"sloc", rec.sloc},
                             {"mccabe", rec.mccabe},
                             {"halstead_volume", rec.halstead_volume},
                             {"maintainability_index", rec.maintainability_index}});
    }
    detail::write_text_file(cfg.output / "metrics.csv", csv);
    detail::write_json_file(cfg.output / "metrics.json", json_rows);
    return result;
}

// -- satd --------------------------------------------------------------------

inline KeywordList load_keywords(const RunConfig& cfg) {
    if (cfg.keywords_file.empty()) return default_satd_keywords();
    std::ifstream in(cfg.keywords_file);
    if (!in) throw IoError("cannot read keyword list " + cfg.keywords_file.string());
    KeywordList list;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t");
        line = line.substr(first, last - first + 1);
        if (line.empty() || line[0] == '#') continue;
        list.phrases.push_back(to_lower(line));
    }
    if (list.phrases.empty()) throw ParseError("keyword list is empty");
    return list;
}

inline nlohmann::json timeline_to_json(const DebtTimeline& timeline) {
    nlohmann::json doc;
    doc["family"] = {{"name", timeline.family.name}, {"deployer", timeline.family.deployer}};
    nlohmann::json versions = nlohmann::json::array();
    for (const auto& step : timeline.per_version) {
        nlohmann::json instances = nlohmann::json::array();
        for (const auto& inst : step.instances) {
            instances.push_back({{"comment", inst.comment_text},
                                 {"keyword", inst.matched_keyword},
                                 {"snippet", inst.snippet},
                                 {"location", inst.location}});
        }
        nlohmann::json events = nlohmann::json::array();
        for (const auto& ev : step.events) {
            events.push_back({{"kind", to_string(ev.kind)},
                              {"comment", ev.comment_text},
                              {"keyword", ev.matched_keyword}});
        }
        versions.push_back({{"version", step.version_index},
                            {"instances", instances},
                            {"events", events}});
    }
    doc["versions"] = versions;
    return doc;
}

inline nlohmann::json stats_to_json(const DebtStats& stats) {
    return {{"mean_initial_debt", stats.mean_initial_debt},
            {"median_initial_debt", stats.median_initial_debt},
            {"pct_with_removal", stats.pct_with_removal},
            {"pct_defined", stats.pct_defined},
            {"families", stats.families},
            {"debt_bearing_families", stats.debt_bearing_families},
            {"families_with_removal", stats.families_with_removal}};
}

inline std::vector<DebtTimeline> build_debt_timelines(const std::vector<ContractFamily>& families,
                                                      const KeywordList& keywords) {
    std::vector<DebtTimeline> timelines;
    for (const auto& family : families) {
        std::vector<VersionDebt> versions;
        for (const auto& version : family.versions) {
            if (!version.source || !version.source->has_source()) continue;
            versions.push_back(scan_version_debt(version.version_index,
                                                 version.source->source_text, keywords));
        }
        if (!versions.empty()) timelines.push_back(track_evolution(family.identity, versions));
    }
    return timelines;
}

inline std::vector<DebtTimeline> run_satd(const RunConfig& cfg, JsonLogger& log) {
    DatasetStore store(cfg.input);
    const auto read = store.read_families();
    for (const auto& skip : read.skipped) log.warn("skip_dataset_entry", {{"entry", skip}});

    const KeywordList keywords = load_keywords(cfg);
    const auto timelines = build_debt_timelines(read.families, keywords);

    nlohmann::json timeline_doc = nlohmann::json::array();
    for (const auto& tl : timelines) timeline_doc.push_back(timeline_to_json(tl));
    detail::write_json_file(cfg.output / "satd_timeline.json", timeline_doc);

    DebtStats stats;
    if (!timelines.empty()) stats = debt_stats(timelines);
    detail::write_json_file(cfg.output / "satd_stats.json", stats_to_json(stats));
    return timelines;
}

// -- correlate -----------------------------------------------------------------

struct MetricsRow {
    std::string subject;
    std::string level;
    double sloc = 0, mccabe = 0, halstead_volume = 0, maintainability_index = 0;
};

inline std::vector<MetricsRow> load_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read metrics table " + path.string());
    std::vector<MetricsRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cols.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cols.size() != 6) throw ParseError("bad metrics row: " + line);
        MetricsRow row;
        row.subject = cols[0];
        row.level = cols[1];
        row.sloc = std::stod(cols[2]);
        row.mccabe = std::stod(cols[3]);
        row.halstead_volume = std::stod(cols[4]);
        row.maintainability_index = std::stod(cols[5]);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Joins file-level metrics rows with detector totals by contract address
/// (parsed out of the dataset-layout subject path) and writes the 10-pair
/// correlation matrix.
inline std::vector<CorrelationResult> run_correlate(const RunConfig& cfg, JsonLogger& log) {
    const auto rows = load_metrics_csv(cfg.input);
    if (cfg.vulns_file.empty()) throw IoError("correlate needs a detector report (--vulns)");
    std::map<Address, long> totals;
    for (const auto& report : load_detector_reports(cfg.vulns_file.string())) {
        totals[report.address] = total_of(report);
    }

    std::vector<JoinedRow> joined;
    long dropped = 0;
    for (const auto& row : rows) {
        if (row.level != "file") continue;
        const auto slash = row.subject.find_last_of('/');
        const std::string filename =
            slash == std::string::npos ? row.subject : row.subject.substr(slash + 1);
        const auto parsed = parse_version_filename(filename);
        if (!parsed) {
            ++dropped;
            continue;
        }
        const auto it = totals.find(parsed->address);
        if (it == totals.end()) {
            ++dropped;
            continue;
        }
        joined.push_back(JoinedRow{row.sloc, row.mccabe, row.halstead_volume,
                                   row.maintainability_index, static_cast<double>(it->second)});
    }
    if (dropped > 0) {
        log.event("correlate_dropped_rows", {{"count", std::to_string(dropped)}});
    }

    const auto matrix = correlation_matrix(joined);

    std::string csv =
        "pair,pearson,spearman,kendall_tau,pearson_strength,spearman_strength,kendall_tau_strength\n";
    const auto cell = [](const std::optional<double>& v) {
        return v ? detail::fixed5(*v) : std::string();
    };
    const auto strength_cell = [](const std::optional<Strength>& s) {
        return s ? std::string(to_string(*s)) : std::string();
    };
    for (const auto& res : matrix) {
        csv += res.pair_label + "," + cell(res.pearson) + "," + cell(res.spearman) + "," +
               cell(res.kendall_tau) + "," + strength_cell(res.pearson_strength()) + "," +
               strength_cell(res.spearman_strength()) + "," +
               strength_cell(res.kendall_strength()) + "\n";
    }
    detail::write_text_file(cfg.output / "correlations.csv", csv);
    return matrix;
}

// -- report --------------------------------------------------------------------

struct ReportSummary {
    VersionHistogram histogram;
    std::vector<VulnerabilityTimeline> timelines;
    DebtStats debt;
};

inline nlohmann::json histogram_to_json(const VersionHistogram& h) {
    return {{"families", h.families},
            {"buckets",
             {{{"label", "1"}, {"count", h.single_version}, {"percent", h.percent(h.single_version)}},
              {{"label", "2-10"}, {"count", h.two_to_ten}, {"percent", h.percent(h.two_to_ten)}},
              {{"label", ">10"},
               {"count", h.more_than_ten},
               {"percent", h.percent(h.more_than_ten)}}}}};
}

/// Version histogram, per-family vulnerability timelines (when a detector
/// report is supplied) and recomputed debt statistics in one summary.
inline ReportSummary run_report(const RunConfig& cfg, JsonLogger& log) {
    DatasetStore store(cfg.input);
    const auto read = store.read_families();
    for (const auto& skip : read.skipped) log.warn("skip_dataset_entry", {{"entry", skip}});

    ReportSummary summary;

    std::vector<long> version_counts;
    for (const auto& family : read.families) {
        version_counts.push_back(static_cast<long>(family.versions.size()));
    }
    summary.histogram = version_histogram(version_counts);

    std::map<Address, long> totals;
    if (!cfg.vulns_file.empty()) {
        for (const auto& report : load_detector_reports(cfg.vulns_file.string())) {
            totals[report.address] = total_of(report);
        }
    }
    long versions_without_totals = 0;
    for (const auto& family : read.families) {
        std::vector<long> family_totals;
        for (const auto& version : family.versions) {
            const auto it = totals.find(version.address);
            if (it == totals.end()) {
                ++versions_without_totals;
                continue;
            }
            family_totals.push_back(it->second);
        }
        if (family_totals.empty()) continue;
        summary.timelines.push_back(vulnerability_timeline(
            family.identity.name + "@" + family.identity.deployer, family_totals));
    }
    if (versions_without_totals > 0 && !totals.empty()) {
        log.event("report_versions_without_totals",
                  {{"count", std::to_string(versions_without_totals)}});
    }

    const auto timelines = build_debt_timelines(read.families, load_keywords(cfg));
    if (!timelines.empty()) summary.debt = debt_stats(timelines);

    detail::write_json_file(cfg.output / "histogram.json", histogram_to_json(summary.histogram));

    nlohmann::json tl_doc = nlohmann::json::array();
    for (const auto& tl : summary.timelines) {
        tl_doc.push_back(
            {{"family", tl.family_label}, {"totals", tl.totals}, {"changed", tl.changed}});
    }
    detail::write_json_file(cfg.output / "timelines.json", tl_doc);

    nlohmann::json summary_doc;
    summary_doc["families"] = summary.histogram.families;
    summary_doc["histogram"] = histogram_to_json(summary.histogram);
    summary_doc["debt"] = stats_to_json(summary.debt);
    detail::write_json_file(cfg.output / "summary.json", summary_doc);
    return summary;
}

} // namespace ethver
