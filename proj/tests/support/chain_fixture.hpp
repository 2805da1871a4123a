#pragma once

// Synthetic chain model rendered as replayable Etherscan-shaped fixtures.
// Tests plant contracts, factories and distractor traffic, write the fixture
// directory, and run the real replay client against it.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ethver/fixtures.hpp"
#include "ethver/keccak.hpp"
#include "ethver/types.hpp"

namespace chainfix {

using ethver::AbiEntry;
using ethver::AbiSpec;
using ethver::Address;
using ethver::Transaction;

struct ChainContract {
    Address address;
    std::string name;   // empty: explorer knows nothing about this address
    std::string source; // may be empty while the name is known (source-less)
    AbiSpec abi;
    bool is_proxy = false;
};

inline std::string hex_of_width(std::uint64_t value, std::size_t width) {
    std::string out(width, '0');
    for (std::size_t i = 0; i < width && value > 0; ++i) {
        static const char* digits = "0123456789abcdef";
        out[width - 1 - i] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

class ChainBuilder {
public:
    explicit ChainBuilder(std::uint64_t id_space = 1) : id_space_(id_space) {}

    Address fresh_address() { return "0x" + hex_of_width(id_space_ * 1'000'000 + next_id_++, 40); }

    std::string fresh_hash() { return "0x" + hex_of_width(id_space_ * 1'000'000 + next_id_++, 64); }

    /// Registers what the explorer knows about an address.
    void register_contract(ChainContract contract) { contracts_[contract.address] = contract; }

    ChainContract& contract(const Address& a) { return contracts_.at(a); }

    Transaction& add_transfer(const Address& from, const Address& to) {
        return push(normal_, make_tx(from, to, "0x", {}));
    }

    Transaction& add_interaction(const Address& from, const Address& to, const std::string& input) {
        return push(normal_, make_tx(from, to, input, {}));
    }

    Transaction& add_direct_creation(const Address& deployer, const Address& created,
                                     const std::string& bytecode_hex) {
        return push(normal_, make_tx(deployer, {}, bytecode_hex, created));
    }

    /// Factory deployment: the deployer's call to the factory carries the
    /// child bytecode; the creation itself lands in the internal lists.
    struct FactoryDeployment {
        Transaction call;
        Transaction creation;
    };
    FactoryDeployment add_factory_creation(const Address& deployer, const Address& factory,
                                           const std::string& method_signature,
                                           const Address& created, const std::string& bytecode_hex,
                                           const std::string& embedded_bytecode_hex = "") {
        const std::string embedded =
            embedded_bytecode_hex.empty() ? bytecode_hex : embedded_bytecode_hex;
        const std::string selector = ethver::selector_hex(ethver::selector_of(method_signature));
        std::string head(64, '0'); // stand-in for the bytes argument head words
        head[63] = '4';
        const std::string call_input =
            "0x" + selector + head + std::string(ethver::strip_0x(embedded));
        const Transaction call = push(normal_, make_tx(deployer, factory, call_input, {}));
        const Transaction creation = push(internal_, make_tx(factory, {}, bytecode_hex, created));
        return {call, creation};
    }

    /// Bumps to a fresh block so later transactions order after earlier ones.
    void next_block() {
        ++block_;
        index_ = 0;
    }

    std::uint64_t current_block() const { return block_; }

    // -- fixture rendering ---------------------------------------------------

    void write_fixtures(const ethver::FixtureStore& store, int page_size = 50'000) const {
        std::set<Address> everyone;
        for (const auto& [addr, _] : contracts_) everyone.insert(addr);
        for (const auto& tx : normal_) collect(tx, everyone);
        for (const auto& tx : internal_) collect(tx, everyone);

        for (const auto& addr : everyone) {
            write_tx_pages(store, addr, "txlist", involved(normal_, addr), page_size);
            write_tx_pages(store, addr, "txlistinternal", involved(internal_, addr), page_size);
            write_source(store, addr);
            write_abi(store, addr);
        }
    }

    const std::vector<Transaction>& normal_txs() const { return normal_; }
    const std::vector<Transaction>& internal_txs() const { return internal_; }

    static std::string abi_json_text(const AbiSpec& abi) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& entry : abi.entries) {
            nlohmann::json inputs = nlohmann::json::array();
            for (std::size_t i = 0; i < entry.parameter_types.size(); ++i) {
                inputs.push_back({{"name", "arg" + std::to_string(i)},
                                  {"type", entry.parameter_types[i]}});
            }
            arr.push_back({{"type", "function"},
                           {"name", entry.method_name},
                           {"inputs", inputs},
                           {"outputs", nlohmann::json::array()},
                           {"stateMutability", "nonpayable"}});
        }
        return arr.dump();
    }

private:
    Transaction make_tx(const Address& from, const std::optional<Address>& to,
                        const std::string& input, const std::optional<Address>& created) {
        Transaction tx;
        tx.hash = fresh_hash();
        tx.from_addr = from;
        tx.to_addr = to;
        tx.input = input.empty() ? "0x" : input;
        tx.contract_address = created;
        tx.block_number = block_;
        tx.tx_index = index_++;
        tx.timestamp = static_cast<std::int64_t>(block_ * 13 + tx.tx_index);
        return tx;
    }

    static Transaction& push(std::vector<Transaction>& into, Transaction tx) {
        into.push_back(std::move(tx));
        return into.back();
    }

    static void collect(const Transaction& tx, std::set<Address>& everyone) {
        everyone.insert(tx.from_addr);
        if (tx.to_addr) everyone.insert(*tx.to_addr);
        if (tx.contract_address) everyone.insert(*tx.contract_address);
    }

    static std::vector<Transaction> involved(const std::vector<Transaction>& txs,
                                             const Address& addr) {
        std::vector<Transaction> out;
        for (const auto& tx : txs) {
            if (tx.from_addr == addr || tx.to_addr == addr || tx.contract_address == addr) {
                out.push_back(tx);
            }
        }
        std::sort(out.begin(), out.end(), ethver::position_less);
        return out;
    }

    static nlohmann::json tx_to_json(const Transaction& tx) {
        return {{"blockNumber", std::to_string(tx.block_number)},
                {"timeStamp", std::to_string(tx.timestamp)},
                {"hash", tx.hash},
                {"transactionIndex", std::to_string(tx.tx_index)},
                {"from", tx.from_addr},
                {"to", tx.to_addr.value_or("")},
                {"value", "0"},
                {"input", tx.input},
                {"contractAddress", tx.contract_address.value_or("")},
                {"isError", "0"}};
    }

    static void write_tx_pages(const ethver::FixtureStore& store, const Address& addr,
                               const std::string& action, const std::vector<Transaction>& txs,
                               int page_size) {
        const std::size_t pages = txs.size() / static_cast<std::size_t>(page_size) + 1;
        for (std::size_t page = 1; page <= pages + 1; ++page) {
            const std::size_t begin = (page - 1) * static_cast<std::size_t>(page_size);
            nlohmann::json result = nlohmann::json::array();
            for (std::size_t i = begin; i < txs.size() && i < begin + static_cast<std::size_t>(page_size); ++i) {
                result.push_back(tx_to_json(txs[i]));
            }
            nlohmann::json payload;
            if (result.empty()) {
                payload = {{"status", "0"}, {"message", "No transactions found"}, {"result", result}};
            } else {
                payload = {{"status", "1"}, {"message", "OK"}, {"result", result}};
            }
            store.record({{"module", "account"},
                          {"action", action},
                          {"address", addr},
                          {"page", std::to_string(page)},
                          {"offset", std::to_string(page_size)},
                          {"sort", "asc"}},
                         payload.dump());
        }
    }

    void write_source(const ethver::FixtureStore& store, const Address& addr) const {
        nlohmann::json entry;
        const auto it = contracts_.find(addr);
        if (it == contracts_.end() || it->second.name.empty()) {
            entry = {{"SourceCode", ""},
                     {"ABI", "Contract source code not verified"},
                     {"ContractName", ""},
                     {"CompilerVersion", ""},
                     {"Proxy", "0"},
                     {"Implementation", ""}};
        } else {
            const ChainContract& c = it->second;
            entry = {{"SourceCode", c.source},
                     {"ABI", abi_json_text(c.abi)},
                     {"ContractName", c.name},
                     {"CompilerVersion", "v0.8.19+commit.7dd6d404"},
                     {"Proxy", c.is_proxy ? "1" : "0"},
                     {"Implementation", ""}};
        }
        nlohmann::json payload = {{"status", "1"},
                                  {"message", "OK"},
                                  {"result", nlohmann::json::array({entry})}};
        store.record({{"module", "contract"}, {"action", "getsourcecode"}, {"address", addr}},
                     payload.dump());
    }

    void write_abi(const ethver::FixtureStore& store, const Address& addr) const {
        nlohmann::json payload;
        const auto it = contracts_.find(addr);
        if (it == contracts_.end() || it->second.name.empty()) {
            payload = {{"status", "0"},
                       {"message", "NOTOK"},
                       {"result", "Contract source code not verified"}};
        } else {
            payload = {{"status", "1"}, {"message", "OK"}, {"result", abi_json_text(it->second.abi)}};
        }
        store.record({{"module", "contract"}, {"action", "getabi"}, {"address", addr}}, payload.dump());
    }

    std::uint64_t id_space_;
    std::uint64_t next_id_ = 1;
    std::uint64_t block_ = 1;
    std::uint64_t index_ = 0;
    std::map<Address, ChainContract> contracts_;
    std::vector<Transaction> normal_;
    std::vector<Transaction> internal_;
};

// -- random bytecode & planted families ---------------------------------------

/// Random creation bytecode; optionally carries the 43-byte bzzr0 metadata
/// trailer so trailer-stripping paths get exercised.
inline std::string random_bytecode(std::mt19937_64& rng, bool with_trailer) {
    std::uniform_int_distribution<int> len_dist(40, 120);
    std::uniform_int_distribution<int> byte_dist(0, 255);
    const int len = len_dist(rng);
    std::vector<std::uint8_t> code;
    code.reserve(static_cast<std::size_t>(len) + 43);
    for (int i = 0; i < len; ++i) code.push_back(static_cast<std::uint8_t>(byte_dist(rng)));
    if (with_trailer) {
        const std::uint8_t head[9] = {0xa1, 0x65, 0x62, 0x7a, 0x7a, 0x72, 0x30, 0x58, 0x20};
        code.insert(code.end(), head, head + 9);
        for (int i = 0; i < 32; ++i) code.push_back(static_cast<std::uint8_t>(byte_dist(rng)));
        code.push_back(0x00);
        code.push_back(0x29);
    }
    return "0x" + ethver::bytes_to_hex(code);
}

struct PlantedFamily {
    std::string name;
    Address deployer;
    std::vector<Address> versions; // creation order
    Address seed;                  // one of the versions
};

/// Plants a family of `version_count` contracts for one deployer, mixing
/// direct and factory deployments, surrounded by distractor traffic:
/// transfers, token calls, unrelated creations, an unverified creation, and
/// same-name deployments by a different deployer.
inline PlantedFamily plant_family(ChainBuilder& chain, std::mt19937_64& rng, int version_count) {
    PlantedFamily planted;
    planted.deployer = chain.fresh_address();
    planted.name = "Vault" + std::to_string(rng() % 100000);

    // a factory with both deploy-style and decoy methods
    const Address factory = chain.fresh_address();
    chain.register_contract(
        {factory,
         "Deployer",
         "contract Deployer { function deployContract(bytes memory code) public {} }",
         AbiSpec{{AbiEntry{"deployContract", {"bytes"}},
                  AbiEntry{"createClone", {"bytes"}},
                  AbiEntry{"transfer", {"address", "uint256"}},
                  AbiEntry{"setOwner", {"address"}}}},
         false});

    // a verified token used for decoy interactions
    const Address token = chain.fresh_address();
    chain.register_contract({token,
                             "Coin",
                             "contract Coin { function transfer(address to, uint256 v) public {} }",
                             AbiSpec{{AbiEntry{"transfer", {"address", "uint256"}}}},
                             false});

    const Address rival = chain.fresh_address(); // different deployer, same name

    std::uniform_int_distribution<int> coin(0, 1);
    for (int v = 0; v < version_count; ++v) {
        chain.next_block();

        // distractor traffic ahead of the real creation
        if (coin(rng)) chain.add_transfer(planted.deployer, chain.fresh_address());
        if (coin(rng)) {
            chain.add_interaction(
                planted.deployer, token,
                "0x" + ethver::selector_hex(ethver::selector_of("transfer(address,uint256)")) +
                    std::string(128, '0'));
        }
        if (coin(rng)) {
            // unrelated contract by the same deployer
            const Address other = chain.fresh_address();
            chain.register_contract({other, "Helper" + std::to_string(rng() % 1000),
                                     "contract Helper {}", AbiSpec{}, false});
            chain.add_direct_creation(planted.deployer, other, random_bytecode(rng, coin(rng) == 1));
        }
        if (coin(rng)) {
            // unverified creation: name unknown, never joins the family
            chain.add_direct_creation(planted.deployer, chain.fresh_address(),
                                      random_bytecode(rng, false));
        }
        if (coin(rng)) {
            // call with data to a plain EOA; contract-ness probe must reject it
            chain.add_interaction(planted.deployer, chain.fresh_address(), "0xdeadbeef");
        }
        if (coin(rng)) {
            // non-deploy factory method with an address argument
            chain.add_interaction(
                planted.deployer, factory,
                "0x" + ethver::selector_hex(ethver::selector_of("setOwner(address)")) +
                    std::string(64, '0'));
        }

        const Address version_addr = chain.fresh_address();
        chain.register_contract({version_addr, planted.name,
                                 "contract " + planted.name + " { uint256 public rev = " +
                                     std::to_string(v + 1) + "; }",
                                 AbiSpec{{AbiEntry{"rev", {}}}}, false});
        const bool trailer = coin(rng) == 1;
        const std::string code = random_bytecode(rng, trailer);
        if (coin(rng)) {
            chain.add_direct_creation(planted.deployer, version_addr, code);
        } else {
            const std::string method =
                coin(rng) ? "deployContract(bytes)" : "createClone(bytes)";
            chain.add_factory_creation(planted.deployer, factory, method, version_addr, code);
        }
        planted.versions.push_back(version_addr);

        // rival deployer ships a same-name contract through the same factory
        if (coin(rng)) {
            const Address rival_version = chain.fresh_address();
            chain.register_contract({rival_version, planted.name,
                                     "contract " + planted.name + " { uint256 public rev = 900; }",
                                     AbiSpec{}, false});
            chain.add_factory_creation(rival, factory, "deployContract(bytes)", rival_version,
                                       random_bytecode(rng, false));
        }
    }

    planted.seed = planted.versions[rng() % planted.versions.size()];
    return planted;
}

} // namespace chainfix
