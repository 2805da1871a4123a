#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ethver/clock.hpp"
#include "ethver/errors.hpp"
#include "ethver/fixtures.hpp"
#include "ethver/rate_limit.hpp"
#include "ethver/types.hpp"

namespace ethver {

enum class TxScope { Normal, Internal };

/// What the version linker needs from the chain. The optional-returning
/// lookups treat "unverified" as absence instead of an error so callers can
/// probe addresses freely.
class Gateway {
public:
    virtual ~Gateway() = default;
    virtual std::vector<Transaction> transaction_page(const Address& address, int page,
                                                      int page_size, TxScope scope) = 0;
    virtual std::optional<VerifiedSource> try_verified_source(const Address& address) = 0;
    virtual std::optional<AbiSpec> try_contract_abi(const Address& address) = 0;

    /// Verified source + ABI presence is the contract-ness test.
    bool is_contract(const Address& address) { return try_verified_source(address).has_value(); }
};

/// Drains all pages of an address's transaction list, ascending
/// (block_number, tx_index). Stops at the first short or empty page.
inline std::vector<Transaction> all_transactions(Gateway& gw, const Address& address,
                                                 TxScope scope, int page_size) {
    std::vector<Transaction> out;
    for (int page = 1;; ++page) {
        auto chunk = gw.transaction_page(address, page, page_size, scope);
        const bool last = static_cast<int>(chunk.size()) < page_size;
        out.insert(out.end(), chunk.begin(), chunk.end());
        if (last) break;
    }
    return out;
}

/// Raw HTTP hook so live traffic can be swapped out in tests.
class Transport {
public:
    virtual ~Transport() = default;
    /// GET the URL, return the response body. Throws ApiError on a non-OK
    /// status and TransportError when the request itself failed.
    virtual std::string get(const std::string& url) = 0;
};

struct ClientConfig {
    std::string base_url = "https://api.etherscan.io/api";
    int page_size = 50'000; // response length limit of the explorer API
    int max_retries = 3;
    TimeMs backoff_start = 1 * kMsPerSecond;
};

/// Etherscan-compatible JSON API client.
///
/// Two modes share all parsing and rate accounting:
///   - replay: every request must hit the fixture store, misses throw;
///   - live:   requests go through the Transport, and are recorded into the
///             store when one is attached.
class EtherscanClient : public Gateway {
public:
    /// Replay mode.
    EtherscanClient(Clock& clock, std::vector<ApiKeyConfig> keys, FixtureStore store,
                    ClientConfig config = {})
        : config_(std::move(config)),
          rotator_(clock, std::move(keys)),
          clock_(clock),
          store_(std::move(store)),
          replay_(true) {}

    /// Live mode; pass a store to record traffic as replayable fixtures.
    EtherscanClient(Clock& clock, std::vector<ApiKeyConfig> keys, Transport& transport,
                    std::optional<FixtureStore> record_store = std::nullopt,
                    ClientConfig config = {})
        : config_(std::move(config)),
          rotator_(clock, std::move(keys)),
          clock_(clock),
          store_(std::move(record_store)),
          transport_(&transport),
          replay_(false) {}

    const ClientConfig& config() const { return config_; }
    int page_size() const { return config_.page_size; }

    /// Single transport primitive every operation routes through.
    std::string fetch(Params params) {
        const RequestSlot slot = rotator_.acquire_request_slot();
        if (replay_) {
            auto payload = store_->lookup(params);
            if (!payload) {
                throw FixtureMiss("no fixture for request: " + canonical_request(params));
            }
            return *payload;
        }
        if (!slot.key_id.empty()) params["apikey"] = slot.key_id;
        const std::string url = config_.base_url + "?" + url_encode(params);
        std::string payload = get_with_retries(url);
        if (store_) store_->record(params, payload);
        return payload;
    }

    std::vector<Transaction> get_transaction_list(const Address& address, int page,
                                                  int page_size, TxScope scope) {
        if (page < 1) throw ParseError("page must be positive");
        if (page_size < 1 || page_size > 50'000) throw ParseError("page_size out of range");
        const Address addr = normalize_address(address);
        Params params{{"module", "account"},
                      {"action", scope == TxScope::Normal ? "txlist" : "txlistinternal"},
                      {"address", addr},
                      {"page", std::to_string(page)},
                      {"offset", std::to_string(page_size)},
                      {"sort", "asc"}};
        const nlohmann::json doc = parse_envelope(fetch(params));
        if (is_empty_result(doc)) return {};
        require_ok(doc);
        if (!doc.at("result").is_array()) throw ParseError("txlist result is not an array");

        std::vector<Transaction> txs;
        for (const auto& item : doc.at("result")) txs.push_back(parse_transaction(item));
        std::sort(txs.begin(), txs.end(), position_less);
        for (std::size_t i = 1; i < txs.size(); ++i) {
            if (txs[i].position() == txs[i - 1].position()) {
                throw ParseError("tied (block_number, tx_index) positions in transaction list");
            }
        }
        return txs;
    }

    VerifiedSource get_verified_source(const Address& address) {
        const Address addr = normalize_address(address);
        Params params{{"module", "contract"}, {"action", "getsourcecode"}, {"address", addr}};
        const nlohmann::json doc = parse_envelope(fetch(params));
        require_ok(doc);
        const auto& result = doc.at("result");
        if (!result.is_array() || result.empty()) throw ParseError("getsourcecode result malformed");
        const auto& entry = result.at(0);

        VerifiedSource src;
        src.contract_name = entry.value("ContractName", "");
        src.source_text = entry.value("SourceCode", "");
        src.compiler_version = entry.value("CompilerVersion", "");
        src.is_proxy = entry.value("Proxy", "0") == "1";
        if (src.contract_name.empty() && src.source_text.empty()) throw NotVerified(addr);
        const std::string abi_text = entry.value("ABI", "");
        if (!abi_text.empty() && abi_text.front() == '[') src.abi = parse_abi_json(abi_text);
        return src;
    }

    AbiSpec get_abi(const Address& address) {
        const Address addr = normalize_address(address);
        Params params{{"module", "contract"}, {"action", "getabi"}, {"address", addr}};
        const nlohmann::json doc = parse_envelope(fetch(params));
        if (doc.value("status", "") == "0") throw NotVerified(addr);
        return parse_abi_json(doc.at("result").get<std::string>());
    }

    // Gateway interface ----------------------------------------------------

    std::vector<Transaction> transaction_page(const Address& address, int page, int page_size,
                                              TxScope scope) override {
        return get_transaction_list(address, page, page_size, scope);
    }

    std::optional<VerifiedSource> try_verified_source(const Address& address) override {
        try {
            return get_verified_source(address);
        } catch (const NotVerified&) {
            return std::nullopt;
        }
    }

    std::optional<AbiSpec> try_contract_abi(const Address& address) override {
        try {
            return get_abi(address);
        } catch (const NotVerified&) {
            return std::nullopt;
        }
    }

    // Parsing helpers (static so fixtures and tests can reuse them) --------

    static nlohmann::json parse_envelope(const std::string& payload) {
        nlohmann::json doc = nlohmann::json::parse(payload, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) throw ParseError("malformed API payload");
        if (!doc.contains("result")) throw ParseError("API payload missing result");
        return doc;
    }

    static bool is_empty_result(const nlohmann::json& doc) {
        if (doc.value("status", "") != "0") return false;
        const auto& result = doc.at("result");
        return result.is_array() && result.empty();
    }

    static void require_ok(const nlohmann::json& doc) {
        const std::string status = doc.value("status", "1");
        if (status != "1") {
            throw ApiError(0, doc.value("message", "NOTOK") + ": " +
                                  (doc.at("result").is_string()
                                       ? doc.at("result").get<std::string>()
                                       : doc.at("result").dump()));
        }
    }

    static Transaction parse_transaction(const nlohmann::json& item) {
        try {
            Transaction tx;
            tx.hash = normalize_tx_hash(item.at("hash").get<std::string>());
            tx.from_addr = normalize_address(item.at("from").get<std::string>());
            const std::string to = item.value("to", "");
            if (!to.empty()) tx.to_addr = normalize_address(to);
            const std::string created = item.value("contractAddress", "");
            if (!created.empty()) tx.contract_address = normalize_address(created);
            std::string input = item.value("input", "0x");
            if (input.empty()) input = "0x";
            if (!normalize_hex(strip_0x(input), strip_0x(input).size()) &&
                !strip_0x(input).empty()) {
                throw ParseError("malformed input hex");
            }
            tx.input = "0x" + to_lower(strip_0x(input));
            tx.block_number = std::stoull(item.at("blockNumber").get<std::string>());
            tx.tx_index = std::stoull(item.value("transactionIndex", "0"));
            tx.timestamp = std::stoll(item.value("timeStamp", "0"));
            return tx;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("malformed transaction record: ") + e.what());
        } catch (const std::logic_error& e) {
            throw ParseError(std::string("malformed transaction record: ") + e.what());
        }
    }

    static AbiSpec parse_abi_json(const std::string& text) {
        nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.is_array()) throw ParseError("malformed ABI JSON");
        AbiSpec abi;
        for (const auto& item : doc) {
            if (!item.is_object()) continue;
            if (item.value("type", "function") != "function") continue;
            AbiEntry entry;
            entry.method_name = item.value("name", "");
            if (entry.method_name.empty()) continue;
            for (const auto& input : item.value("inputs", nlohmann::json::array())) {
                entry.parameter_types.push_back(input.value("type", ""));
            }
            abi.entries.push_back(std::move(entry));
        }
        return abi;
    }

    static std::string url_encode(const Params& params) {
        static const char* hexd = "0123456789ABCDEF";
        std::string out;
        for (const auto& [k, v] : params) {
            if (!out.empty()) out += "&";
            for (const std::string* part : {&k, &v}) {
                for (unsigned char c : *part) {
                    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
                        out += static_cast<char>(c);
                    } else {
                        out += '%';
                        out += hexd[c >> 4];
                        out += hexd[c & 0x0f];
                    }
                }
                if (part == &k) out += "=";
            }
        }
        return out;
    }

private:
    std::string get_with_retries(const std::string& url) {
        TimeMs backoff = config_.backoff_start;
        for (int attempt = 0;; ++attempt) {
            try {
                return transport_->get(url);
            } catch (const TransportError&) {
                if (attempt >= config_.max_retries) throw;
                clock_.sleep_until(clock_.now() + backoff);
                backoff *= 2;
            }
        }
    }

    ClientConfig config_;
    KeyRotator rotator_;
    Clock& clock_;
    std::optional<FixtureStore> store_;
    Transport* transport_ = nullptr;
    bool replay_;
};

} // namespace ethver
