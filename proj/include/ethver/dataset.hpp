#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ethver/errors.hpp"
#include "ethver/hex.hpp"
#include "ethver/types.hpp"

namespace ethver {

/// "0x<40 hex>_<name>.sol" -> (address, name). The name keeps any
/// underscores of its own; the split happens at the first '_' after the
/// 42-character address.
inline std::pair<Address, std::string> parse_sanctuary_name(const std::string& filename) {
    const std::string suffix = ".sol";
    if (filename.size() < suffix.size() ||
        filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0) {
        throw MalformedName(filename + ": not a .sol file");
    }
    if (filename.size() < 42 + 1 + 1 + suffix.size()) {
        throw MalformedName(filename + ": too short for address_name.sol");
    }
    const auto addr = normalize_hex(filename.substr(0, 42), 40);
    if (!addr) throw MalformedName(filename + ": does not start with a 0x address");
    if (filename[42] != '_') throw MalformedName(filename + ": missing '_' after address");
    const std::string name = filename.substr(43, filename.size() - 43 - suffix.size());
    if (name.empty()) throw MalformedName(filename + ": empty contract name");
    return {*addr, name};
}

/// "{address}_{name}_V{index}.sol"
inline std::string version_filename(const Address& address, const std::string& name, int index) {
    return address + "_" + name + "_V" + std::to_string(index) + ".sol";
}

struct ParsedVersionName {
    Address address;
    std::string name;
    int index = 0;
};

/// Inverse of version_filename. Names may themselves contain "_V", so the
/// version marker is the last "_V<digits>" before the extension.
inline std::optional<ParsedVersionName> parse_version_filename(const std::string& filename) {
    const std::string suffix = ".sol";
    if (filename.size() < suffix.size() ||
        filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0) {
        return std::nullopt;
    }
    const std::string stem = filename.substr(0, filename.size() - suffix.size());
    if (stem.size() < 43 || stem[42] != '_') return std::nullopt;
    const auto addr = normalize_hex(stem.substr(0, 42), 40);
    if (!addr) return std::nullopt;

    const auto marker = stem.rfind("_V");
    if (marker == std::string::npos || marker < 43) return std::nullopt;
    const std::string digits = stem.substr(marker + 2);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) {
            return c >= '0' && c <= '9';
        })) {
        return std::nullopt;
    }
    ParsedVersionName parsed;
    parsed.address = *addr;
    parsed.name = stem.substr(43, marker - 43);
    if (parsed.name.empty()) return std::nullopt;
    try {
        parsed.index = std::stoi(digits);
    } catch (const std::out_of_range&) {
        return std::nullopt;
    }
    if (parsed.index < 1) return std::nullopt;
    return parsed;
}

/// Versioned dataset on disk: root / contract_name / deployer_address /
/// {address}_{name}_V{index}.sol. Addresses are lowercased in paths; writes
/// are atomic (temp file + rename) and idempotent per address.
class DatasetStore {
public:
    explicit DatasetStore(std::filesystem::path root) : root_(std::move(root)) {}

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path version_path(const ContractVersion& version) const {
        const std::string& name = version.identity.name;
        if (name.empty() || name.find('/') != std::string::npos ||
            name.find('\\') != std::string::npos || name.find("..") != std::string::npos) {
            throw MalformedName("unusable contract name: " + name);
        }
        // addresses lowercased in paths; case-insensitive filesystems exist
        return root_ / name / to_lower(version.identity.deployer) /
               version_filename(to_lower(version.address), name, version.version_index);
    }

    std::filesystem::path write_version(const ContractVersion& version) const {
        if (!version.source || !version.source->has_source()) {
            throw IoError("version " + version.address + " has no source text to write");
        }
        const auto path = version_path(version);
        const std::string& body = version.source->source_text;

        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());

        if (std::filesystem::exists(path)) {
            if (read_file(path) == body) return path; // idempotent re-write
            throw ConflictError(path.string() + " already exists with different content");
        }

        const auto tmp = std::filesystem::path(path.string() + ".tmp");
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot write " + tmp.string());
            out << body;
        }
        std::filesystem::rename(tmp, path, ec);
        if (ec) throw IoError("cannot finalize " + path.string() + ": " + ec.message());
        return path;
    }

    struct ReadResult {
        std::vector<ContractFamily> families; // sorted by (name, deployer)
        std::vector<std::string> skipped;     // non-conforming entries, with reason
    };

    ReadResult read_families() const {
        ReadResult result;
        if (!std::filesystem::exists(root_)) {
            throw IoError("dataset root does not exist: " + root_.string());
        }
        for (const auto& name_dir : sorted_dirs(root_)) {
            for (const auto& deployer_dir : sorted_dirs(name_dir)) {
                ContractFamily family;
                family.identity.name = name_dir.filename().string();
                family.identity.deployer = deployer_dir.filename().string();

                std::vector<std::pair<int, std::filesystem::path>> files;
                for (const auto& entry : sorted_files(deployer_dir)) {
                    const auto parsed = parse_version_filename(entry.filename().string());
                    if (!parsed || parsed->name != family.identity.name) {
                        result.skipped.push_back(entry.string() + ": not a version file");
                        continue;
                    }
                    files.emplace_back(parsed->index, entry);
                }
                std::sort(files.begin(), files.end());

                for (const auto& [index, path] : files) {
                    const auto parsed = *parse_version_filename(path.filename().string());
                    ContractVersion version;
                    version.identity = family.identity;
                    version.address = parsed.address;
                    version.version_index = index;
                    VerifiedSource src;
                    src.contract_name = family.identity.name;
                    src.source_text = read_file(path);
                    version.source = std::move(src);
                    family.versions.push_back(std::move(version));
                }
                if (!family.versions.empty()) result.families.push_back(std::move(family));
            }
        }
        std::sort(result.families.begin(), result.families.end(),
                  [](const ContractFamily& a, const ContractFamily& b) {
                      return a.identity < b.identity;
                  });
        return result;
    }

    static std::string read_file(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot read " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

private:
    static std::vector<std::filesystem::path> sorted_dirs(const std::filesystem::path& parent) {
        std::vector<std::filesystem::path> dirs;
        for (const auto& entry : std::filesystem::directory_iterator(parent)) {
            if (entry.is_directory()) dirs.push_back(entry.path());
        }
        std::sort(dirs.begin(), dirs.end());
        return dirs;
    }

    static std::vector<std::filesystem::path> sorted_files(const std::filesystem::path& parent) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(parent)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        return files;
    }

    std::filesystem::path root_;
};

} // namespace ethver
