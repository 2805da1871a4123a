#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "ethver/errors.hpp"
#include "ethver/keccak.hpp"

namespace ethver {

using Params = std::map<std::string, std::string>; // sorted by construction

/// Stable request identity: sorted "k=v" pairs joined with '&', with the
/// apikey parameter dropped so recordings replay under any key.
inline std::string canonical_request(const Params& params) {
    std::string out;
    for (const auto& [k, v] : params) {
        if (k == "apikey") continue;
        if (!out.empty()) out += "&";
        out += k + "=" + v;
    }
    return out;
}

/// One JSON file per canonicalized request under a fixtures directory.
///
/// File name: keccak256(canonical request) in hex, ".json" suffix.
/// File body: {"canonical": <string>, "request": {<param>: <value>, ...},
///             "payload": <raw response body as a string>}
class FixtureStore {
public:
    explicit FixtureStore(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path path_for(const Params& params) const {
        const std::string canon = canonical_request(params);
        return root_ / (bytes_to_hex(keccak256(canon)) + ".json");
    }

    std::optional<std::string> lookup(const Params& params) const {
        const auto file = path_for(params);
        std::ifstream in(file, std::ios::binary);
        if (!in) return std::nullopt;
        nlohmann::json doc;
        try {
            in >> doc;
            return doc.at("payload").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("corrupt fixture " + file.string() + ": " + e.what());
        }
    }

    void record(const Params& params, const std::string& payload) const {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        nlohmann::json doc;
        doc["canonical"] = canonical_request(params);
        nlohmann::json req = nlohmann::json::object();
        for (const auto& [k, v] : params) {
            if (k != "apikey") req[k] = v;
        }
        doc["request"] = req;
        doc["payload"] = payload;
        const auto file = path_for(params);
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write fixture " + file.string());
        out << doc.dump(2) << "\n";
    }

private:
    std::filesystem::path root_;
};

} // namespace ethver
