#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ethver/errors.hpp"
#include "ethver/types.hpp"

namespace ethver {

struct Finding {
    std::string detector_id;
    std::string severity;
    long count = 0;
};

/// Ingested detector output for one contract address. The per-finding threat
/// weight is fixed to 1, so the contract's score is simply the finding sum.
struct VulnerabilityReport {
    Address address;
    std::string name;
    Address deployer;
    std::vector<Finding> findings;
};

inline long aggregate_vulnerabilities(const std::vector<Finding>& findings) {
    long total = 0;
    for (const auto& f : findings) {
        if (f.count < 0) throw ParseError("negative finding count for " + f.detector_id);
        total += f.count;
    }
    return total;
}

inline long total_of(const VulnerabilityReport& report) {
    return aggregate_vulnerabilities(report.findings);
}

/// Adapter for raw Slither output: {"results": {"detectors": [...]}} with one
/// element per finding. Each element becomes a count-1 finding keyed by its
/// "check" id.
inline std::vector<Finding> findings_from_slither(const nlohmann::json& slither) {
    std::vector<Finding> findings;
    const auto results = slither.value("results", nlohmann::json::object());
    for (const auto& det : results.value("detectors", nlohmann::json::array())) {
        Finding f;
        f.detector_id = det.value("check", "unknown");
        f.severity = det.value("impact", "unknown");
        f.count = 1;
        findings.push_back(std::move(f));
    }
    return findings;
}

/// Detector report file: a JSON array of entries, each carrying either the
/// native "findings" list or an embedded raw "slither" run.
inline std::vector<VulnerabilityReport> parse_detector_reports(const nlohmann::json& doc) {
    if (!doc.is_array()) throw ParseError("detector report must be a JSON array");
    std::vector<VulnerabilityReport> reports;
    for (const auto& entry : doc) {
        VulnerabilityReport report;
        report.address = normalize_address(entry.at("address").get<std::string>());
        report.name = entry.value("name", "");
        const std::string deployer = entry.value("deployer", "");
        if (!deployer.empty()) report.deployer = normalize_address(deployer);
        if (entry.contains("findings")) {
            for (const auto& f : entry.at("findings")) {
                Finding finding;
                finding.detector_id = f.value("detector_id", "unknown");
                finding.severity = f.value("severity", "unknown");
                finding.count = f.value("count", 0L);
                report.findings.push_back(std::move(finding));
            }
        } else if (entry.contains("slither")) {
            report.findings = findings_from_slither(entry.at("slither"));
        } else {
            throw ParseError("detector report entry for " + report.address +
                             " has neither findings nor slither output");
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

inline std::vector<VulnerabilityReport> load_detector_reports(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read detector report " + path);
    nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ParseError("detector report " + path + " is not valid JSON");
    return parse_detector_reports(doc);
}

} // namespace ethver
