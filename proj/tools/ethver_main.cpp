// ethver: extract versioned smart contracts through an Etherscan-compatible
// API, compute code metrics and technical-debt timelines per version, and
// emit correlation and summary artifacts.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "ethver/net.hpp"
#include "ethver/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;

struct GatewayBundle {
    std::unique_ptr<ethver::Clock> clock;
    std::unique_ptr<ethver::Transport> transport;
    std::unique_ptr<ethver::EtherscanClient> client;
};

GatewayBundle make_gateway(const ethver::RunConfig& cfg) {
    GatewayBundle bundle;
    ethver::ClientConfig client_cfg;
    client_cfg.page_size = cfg.page_size;

    if (!cfg.fixtures_dir.empty()) {
        // replay mode: simulated clock, one synthetic key, no wall sleeps
        bundle.clock = std::make_unique<ethver::SimClock>();
        std::vector<ethver::ApiKeyConfig> keys{
            ethver::ApiKeyConfig{"offline", 5, 1'000'000'000L, 0}};
        bundle.client = std::make_unique<ethver::EtherscanClient>(
            *bundle.clock, std::move(keys), ethver::FixtureStore(cfg.fixtures_dir), client_cfg);
        return bundle;
    }

    std::vector<ethver::ApiKeyConfig> keys;
    if (!cfg.keys_file.empty()) {
        std::ifstream in(cfg.keys_file);
        if (!in) throw ethver::IoError("cannot read key file " + cfg.keys_file.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        keys = ethver::parse_key_lines(buf.str());
    }
    bundle.clock = std::make_unique<ethver::SystemClock>();
    bundle.transport = std::make_unique<ethver::HttplibTransport>();
    bundle.client = std::make_unique<ethver::EtherscanClient>(
        *bundle.clock, std::move(keys), *bundle.transport, std::nullopt, client_cfg);
    return bundle;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"versioned smart contract extraction and analysis"};
    app.require_subcommand(1);

    ethver::RunConfig cfg;
    std::string input, output, keys, fixtures, keywords, vulns;

    const auto add_common = [&](CLI::App* sub, bool needs_output) {
        sub->add_option("--input", input, "input path")->required();
        if (needs_output) sub->add_option("--output", output, "output directory")->required();
    };

    auto* extract = app.add_subcommand("extract", "collect version families into a dataset");
    add_common(extract, true);
    extract->add_option("--keys", keys, "API key file, one key per line");
    extract->add_option("--fixtures", fixtures, "fixture directory (replay mode, offline)");
    extract->add_option("--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
    extract->add_option("--max-versions", cfg.max_versions, "anomaly threshold")
        ->check(CLI::PositiveNumber);

    auto* analyze = app.add_subcommand("analyze", "compute code metrics over a dataset");
    add_common(analyze, true);
    analyze->add_option("--level", cfg.level, "file or method")
        ->check(CLI::IsMember({"file", "method"}));

    auto* satd = app.add_subcommand("satd", "track self-admitted technical debt per family");
    add_common(satd, true);
    satd->add_option("--keywords", keywords, "keyword list file, one phrase per line");

    auto* correlate = app.add_subcommand("correlate", "correlate metrics with detector totals");
    add_common(correlate, true);
    correlate->add_option("--vulns", vulns, "detector report JSON")->required();

    auto* report = app.add_subcommand("report", "histogram, timelines and debt summary");
    add_common(report, true);
    report->add_option("--vulns", vulns, "detector report JSON");
    report->add_option("--keywords", keywords, "keyword list file");

    CLI11_PARSE(app, argc, argv);

    cfg.input = input;
    cfg.output = output;
    cfg.keys_file = keys;
    cfg.fixtures_dir = fixtures;
    cfg.keywords_file = keywords;
    cfg.vulns_file = vulns;

    ethver::JsonLogger log(&std::cerr);
    try {
        if (extract->parsed()) {
            if (cfg.fixtures_dir.empty() && cfg.keys_file.empty()) {
                log.warn("no_api_keys", {{"effect", "keyless rate limit, one request per 5s"}});
            }
            auto gateway = make_gateway(cfg);
            const auto summary = run_extract(cfg, *gateway.client, log);
            log.event("extract_done",
                      {{"families", std::to_string(summary.families)},
                       {"versions", std::to_string(summary.versions_written)},
                       {"excluded_anomalous", std::to_string(summary.excluded_anomalous)},
                       {"failed_seeds", std::to_string(summary.failed_seeds)}});
            return summary.failed_seeds > 0 ? kExitPartial : kExitOk;
        }
        if (analyze->parsed()) {
            const auto result = run_analyze(cfg, log);
            log.event("analyze_done",
                      {{"records", std::to_string(result.records.size())},
                       {"skipped_files", std::to_string(result.skipped_files)}});
            return result.skipped_files > 0 ? kExitPartial : kExitOk;
        }
        if (satd->parsed()) {
            const auto timelines = run_satd(cfg, log);
            log.event("satd_done", {{"families", std::to_string(timelines.size())}});
            return kExitOk;
        }
        if (correlate->parsed()) {
            const auto matrix = run_correlate(cfg, log);
            log.event("correlate_done", {{"pairs", std::to_string(matrix.size())}});
            return kExitOk;
        }
        if (report->parsed()) {
            const auto summary = run_report(cfg, log);
            log.event("report_done",
                      {{"families", std::to_string(summary.histogram.families)},
                       {"timelines", std::to_string(summary.timelines.size())}});
            return kExitOk;
        }
    } catch (const ethver::Error& e) {
        log.error("fatal", {{"reason", e.what()}});
        return kExitFailure;
    } catch (const std::exception& e) {
        log.error("fatal", {{"reason", e.what()}});
        return kExitFailure;
    }
    return kExitFailure;
}
