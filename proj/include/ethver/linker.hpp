#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ethver/client.hpp"
#include "ethver/errors.hpp"
#include "ethver/keccak.hpp"
#include "ethver/types.hpp"

namespace ethver {

enum class TransactionKind { Transfer, Creation, Interaction };

inline const char* to_string(TransactionKind k) {
    switch (k) {
        case TransactionKind::Transfer: return "transfer";
        case TransactionKind::Creation: return "creation";
        case TransactionKind::Interaction: return "interaction";
    }
    return "?";
}

/// Total and exclusive: a creation has no recipient, carries bytecode and a
/// mined contract address; an interaction calls into an existing address;
/// everything else is a plain value transfer.
inline TransactionKind classify_transaction(const Transaction& tx) {
    if (!tx.to_addr.has_value() && !tx.input_empty() && tx.contract_address.has_value()) {
        return TransactionKind::Creation;
    }
    if (tx.to_addr.has_value() && !tx.input_empty()) {
        return TransactionKind::Interaction;
    }
    return TransactionKind::Transfer;
}

namespace detail {

/// Solidity 0.4/0.5 compilers append a 43-byte CBOR trailer
/// (a1 65 "bzzr0" 58 20 <swarm hash> 00 29) to the runtime bytecode. Two
/// deployments of the same source differ only there, so matching ignores it.
inline std::span<const std::uint8_t> strip_metadata_trailer(std::span<const std::uint8_t> code) {
    constexpr std::size_t trailer = 43;
    if (code.size() > trailer && code[code.size() - trailer] == 0xa1 &&
        code[code.size() - trailer + 1] == 0x65) {
        return code.first(code.size() - trailer);
    }
    return code;
}

inline bool contains_bytes(std::span<const std::uint8_t> haystack,
                           std::span<const std::uint8_t> needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

inline bool name_passes_deploy_rule(const std::string& method_name) {
    const std::string lower = to_lower(method_name);
    return lower.find("deploy") != std::string::npos || lower.find("create") != std::string::npos;
}

inline std::optional<Selector> input_selector(const Transaction& tx) {
    const auto body = strip_0x(tx.input);
    if (body.size() < 8) return std::nullopt;
    const auto bytes = hex_to_bytes(body.substr(0, 8));
    return Selector{bytes[0], bytes[1], bytes[2], bytes[3]};
}

} // namespace detail

/// True when the submitted bytecode occurs in the transaction input,
/// comparing without the compiler metadata trailer.
inline bool input_embeds_bytecode(const Transaction& tx, std::span<const std::uint8_t> bytecode) {
    if (tx.input_empty()) return false;
    const auto haystack = hex_to_bytes(tx.input);
    return detail::contains_bytes(haystack, detail::strip_metadata_trailer(bytecode));
}

/// Finds the factory call that carried a contract's bytecode. A transaction
/// resolves only when both conditions hold: the deployed bytecode is embedded
/// in its input, and the selector maps to a factory method whose name
/// contains "deploy" or "create". The sender of that call is the deployer.
inline DeployerResolution resolve_factory_deployment(const Address& factory,
                                                     std::span<const std::uint8_t> target_bytecode,
                                                     const AbiSpec& factory_abi,
                                                     std::vector<Transaction> factory_txs) {
    if (target_bytecode.empty()) throw ParseError("factory resolution needs target bytecode");
    std::sort(factory_txs.begin(), factory_txs.end(), position_less);

    bool unknown_selector_seen = false;
    for (const auto& tx : factory_txs) {
        if (!tx.to_addr.has_value() || *tx.to_addr != factory) continue;
        if (!input_embeds_bytecode(tx, target_bytecode)) continue;
        const auto sel = detail::input_selector(tx);
        if (!sel) continue;
        const AbiEntry* entry = factory_abi.find_by_selector(*sel);
        if (entry == nullptr) {
            unknown_selector_seen = true;
            continue;
        }
        if (!detail::name_passes_deploy_rule(entry->method_name)) continue;
        DeployerResolution res;
        res.deployer = tx.from_addr;
        res.route = DeployerResolution::Route::Factory;
        res.intermediary = factory;
        res.method_name = entry->method_name;
        return res;
    }
    if (unknown_selector_seen) {
        throw AbiMismatch("bytecode-bearing call to " + factory + " has a selector missing from its ABI");
    }
    throw NoMatch("no deploy/create call to " + factory + " embeds the target bytecode");
}

/// Direct deployment when the sender is an externally owned account;
/// otherwise the sender is an intermediary contract and the real deployer is
/// whoever invoked its deploy/create method with this bytecode.
inline DeployerResolution resolve_deployer(const Transaction& creation_tx, Gateway& gateway,
                                           int page_size = 50'000) {
    if (classify_transaction(creation_tx) != TransactionKind::Creation) {
        throw ParseError("resolve_deployer expects a creation transaction");
    }
    const Address& sender = creation_tx.from_addr;
    auto sender_source = gateway.try_verified_source(sender);
    if (!sender_source) {
        return DeployerResolution{sender, DeployerResolution::Route::Direct, "", ""};
    }

    AbiSpec abi = sender_source->abi;
    if (abi.entries.empty()) {
        if (auto fetched = gateway.try_contract_abi(sender)) abi = *fetched;
    }
    const auto target = hex_to_bytes(creation_tx.input);
    try {
        return resolve_factory_deployment(sender, target, abi,
                                          all_transactions(gateway, sender, TxScope::Normal, page_size));
    } catch (const NoMatch& e) {
        throw UnresolvedDeployer(e.what());
    } catch (const AbiMismatch& e) {
        throw UnresolvedDeployer(e.what());
    }
}

/// True when the family trips the anomaly rule: strictly more versions than
/// the threshold (LockToken-style mass redeployments).
inline bool filter_anomalous(const ContractFamily& family, int max_versions = 100) {
    return static_cast<int>(family.versions.size()) > max_versions;
}

namespace detail {

/// Per-call lookup cache so family assembly does not re-query the gateway
/// for the same address.
struct LinkScratch {
    Gateway& gateway;
    int page_size;
    std::map<Address, std::optional<VerifiedSource>> sources;
    std::map<Address, std::vector<Transaction>> internal_lists;

    const std::optional<VerifiedSource>& source_of(const Address& addr) {
        auto it = sources.find(addr);
        if (it == sources.end()) {
            it = sources.emplace(addr, gateway.try_verified_source(addr)).first;
        }
        return it->second;
    }

    const std::vector<Transaction>& internal_of(const Address& addr) {
        auto it = internal_lists.find(addr);
        if (it == internal_lists.end()) {
            it = internal_lists.emplace(addr, all_transactions(gateway, addr, TxScope::Internal, page_size)).first;
        }
        return it->second;
    }
};

inline std::optional<Transaction> find_creation_tx(Gateway& gateway, const Address& address,
                                                   int page_size) {
    for (const TxScope scope : {TxScope::Normal, TxScope::Internal}) {
        for (const auto& tx : all_transactions(gateway, address, scope, page_size)) {
            if (classify_transaction(tx) == TransactionKind::Creation &&
                tx.contract_address == address) {
                return tx;
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

/// Assembles the version family seeded by one verified contract: resolve the
/// seed's deployer, then walk the deployer's transaction list collecting
/// every creation — direct, or performed by a factory on the deployer's
/// behalf — whose verified contract name matches the seed's.
inline ContractFamily collect_versions(const Address& seed_address, Gateway& gateway,
                                       int page_size = 50'000) {
    detail::LinkScratch scratch{gateway, page_size, {}, {}};
    const Address seed = normalize_address(seed_address);

    const auto& seed_source = scratch.source_of(seed);
    if (!seed_source || seed_source->contract_name.empty()) throw NotVerified(seed);
    const std::string family_name = seed_source->contract_name;

    const auto creation = detail::find_creation_tx(gateway, seed, page_size);
    if (!creation) throw UnresolvedDeployer("no creation transaction found for " + seed);
    const DeployerResolution resolution = resolve_deployer(*creation, gateway, page_size);
    const Address deployer = resolution.deployer;

    // candidate creations discovered from the deployer's transaction list
    std::vector<Transaction> candidates;
    for (const auto& tx : all_transactions(gateway, deployer, TxScope::Normal, page_size)) {
        switch (classify_transaction(tx)) {
            case TransactionKind::Creation:
                candidates.push_back(tx);
                break;
            case TransactionKind::Interaction: {
                const Address& callee = *tx.to_addr;
                const auto& callee_source = scratch.source_of(callee);
                if (!callee_source) break;
                AbiSpec abi = callee_source->abi;
                if (abi.entries.empty()) {
                    if (auto fetched = gateway.try_contract_abi(callee)) abi = *fetched;
                }
                const auto sel = detail::input_selector(tx);
                if (!sel) break;
                const AbiEntry* entry = abi.find_by_selector(*sel);
                if (entry == nullptr || !detail::name_passes_deploy_rule(entry->method_name)) break;
                // the factory's own creations reveal what this call deployed
                const auto call_input = hex_to_bytes(tx.input);
                for (const auto& child : scratch.internal_of(callee)) {
                    if (classify_transaction(child) != TransactionKind::Creation) continue;
                    const auto child_code = hex_to_bytes(child.input);
                    if (detail::contains_bytes(call_input,
                                               detail::strip_metadata_trailer(child_code))) {
                        candidates.push_back(child);
                    }
                }
                break;
            }
            case TransactionKind::Transfer:
                break;
        }
    }
    std::sort(candidates.begin(), candidates.end(), position_less);

    ContractFamily family;
    family.identity = ContractIdentity{family_name, deployer};
    std::set<Address> seen;
    for (const auto& tx : candidates) {
        const Address& addr = *tx.contract_address;
        if (!seen.insert(addr).second) continue;
        const auto& src = scratch.source_of(addr);
        if (!src || src->contract_name != family_name) continue;
        ContractVersion version;
        version.identity = family.identity;
        version.address = addr;
        version.creation_tx = tx;
        if (src->has_source()) version.source = *src;
        family.versions.push_back(std::move(version));
    }
    for (std::size_t i = 0; i < family.versions.size(); ++i) {
        family.versions[i].version_index = static_cast<int>(i + 1);
    }
    return family;
}

/// Scans a proxy's incoming calls for upgrade methods and lists the
/// implementation addresses they installed, first-seen order, deduplicated.
inline std::vector<Address> enumerate_proxy_implementations(const Address& proxy, Gateway& gateway,
                                                            int page_size = 50'000) {
    const Address addr = normalize_address(proxy);
    AbiSpec abi;
    if (auto src = gateway.try_verified_source(addr); src && !src->abi.entries.empty()) {
        abi = src->abi;
    } else if (auto fetched = gateway.try_contract_abi(addr)) {
        abi = *fetched;
    }
    if (abi.entries.empty()) return {};

    auto txs = all_transactions(gateway, addr, TxScope::Normal, page_size);
    std::sort(txs.begin(), txs.end(), position_less);

    std::vector<Address> implementations;
    std::set<Address> seen;
    for (const auto& tx : txs) {
        if (classify_transaction(tx) != TransactionKind::Interaction || *tx.to_addr != addr) continue;
        const auto sel = detail::input_selector(tx);
        if (!sel) continue;
        const AbiEntry* entry = abi.find_by_selector(*sel);
        if (entry == nullptr) continue;
        if (to_lower(entry->method_name).find("upgrade") == std::string::npos) continue;

        // first address-typed argument, ABI head encoding: 32-byte words after
        // the 4-byte selector, address right-aligned in its word
        std::size_t arg_index = entry->parameter_types.size();
        for (std::size_t i = 0; i < entry->parameter_types.size(); ++i) {
            if (entry->parameter_types[i] == "address") {
                arg_index = i;
                break;
            }
        }
        if (arg_index == entry->parameter_types.size()) continue;
        const auto bytes = hex_to_bytes(tx.input);
        const std::size_t word_off = 4 + 32 * arg_index;
        if (bytes.size() < word_off + 32) continue;
        const Address impl = "0x" + bytes_to_hex(bytes.data() + word_off + 12, 20);
        if (seen.insert(impl).second) implementations.push_back(impl);
    }
    return implementations;
}

} // namespace ethver
