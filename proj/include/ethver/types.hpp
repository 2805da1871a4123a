#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ethver/hex.hpp"
#include "ethver/keccak.hpp"

namespace ethver {

/// Lowercase 0x-prefixed 20-byte address.
using Address = std::string;

/// One chain transaction as returned by the account endpoints. Addresses and
/// hashes are normalized to lowercase; `input` keeps its raw hex form.
struct Transaction {
    std::string hash;                        // 0x + 64 hex chars
    Address from_addr;                       // 0x + 40 hex chars
    std::optional<Address> to_addr;          // absent for creations
    std::string input;                       // "0x" when empty
    std::optional<Address> contract_address; // set once a creation is mined
    std::uint64_t block_number = 0;
    std::uint64_t tx_index = 0;
    std::int64_t timestamp = 0; // unix seconds

    bool input_empty() const { return strip_0x(input).empty(); }

    /// Chain position; creation order is total over (block_number, tx_index).
    std::pair<std::uint64_t, std::uint64_t> position() const {
        return {block_number, tx_index};
    }

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

inline bool position_less(const Transaction& a, const Transaction& b) {
    return a.position() < b.position();
}

/// ABI surface reduced to what selector matching needs: method names and
/// their canonical parameter type lists.
struct AbiEntry {
    std::string method_name;
    std::vector<std::string> parameter_types;

    std::string canonical_signature() const {
        std::string sig = method_name + "(";
        for (std::size_t i = 0; i < parameter_types.size(); ++i) {
            if (i > 0) sig += ",";
            sig += parameter_types[i];
        }
        sig += ")";
        return sig;
    }

    friend bool operator==(const AbiEntry&, const AbiEntry&) = default;
};

struct AbiSpec {
    std::vector<AbiEntry> entries;

    const AbiEntry* find_by_selector(const Selector& sel) const {
        for (const auto& e : entries) {
            if (selector_of(e.canonical_signature()) == sel) return &e;
        }
        return nullptr;
    }

    friend bool operator==(const AbiSpec&, const AbiSpec&) = default;
};

/// Result of a getsourcecode lookup. `source_text` may be empty when the
/// explorer knows the name but holds no source body; fully unverified
/// addresses never produce a VerifiedSource at all.
struct VerifiedSource {
    std::string contract_name;
    std::string source_text;
    std::string compiler_version;
    AbiSpec abi;
    bool is_proxy = false;

    bool has_source() const { return !source_text.empty(); }
};

/// Family key: contracts are the same family iff name and deployer match.
struct ContractIdentity {
    std::string name;
    Address deployer;

    friend bool operator==(const ContractIdentity&, const ContractIdentity&) = default;
    friend auto operator<=>(const ContractIdentity&, const ContractIdentity&) = default;
};

struct ContractVersion {
    ContractIdentity identity;
    Address address;
    int version_index = 0; // 1-based, ascending creation order
    Transaction creation_tx;
    std::optional<VerifiedSource> source; // nullopt: retained but source-less
};

struct ContractFamily {
    ContractIdentity identity;
    std::vector<ContractVersion> versions;
};

/// How the true deployer of a creation transaction was established.
struct DeployerResolution {
    enum class Route { Direct, Factory, ProxyObserved };

    Address deployer;
    Route route = Route::Direct;
    Address intermediary;    // factory or proxy address, empty for Direct
    std::string method_name; // factory method that carried the bytecode
};

} // namespace ethver
