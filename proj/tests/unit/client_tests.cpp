#include <doctest.h>

#include <set>

#include "chain_fixture.hpp"
#include "ethver/client.hpp"
#include "temp_dir.hpp"

using namespace ethver;

namespace {

/// Replay client over a small three-address chain:
///   deployer -> creation of "Foo", transfer, and a call to Foo
struct SmallWorld {
    testutil::TempDir dir{"client"};
    SimClock clock{0};
    Address deployer, foo, stub;

    SmallWorld() {
        chainfix::ChainBuilder chain(42);
        deployer = chain.fresh_address();
        foo = chain.fresh_address();
        stub = chain.fresh_address();
        chain.register_contract({foo, "Foo", "contract Foo { uint256 public x; }",
                                 AbiSpec{{AbiEntry{"poke", {}}}}, false});
        chain.register_contract({stub, "MultiSigStub", "contract MultiSigStub {}",
                                 AbiSpec{}, false});
        chain.next_block();
        chain.add_direct_creation(deployer, foo, "0x6080604052");
        chain.next_block();
        chain.add_transfer(deployer, stub);
        chain.next_block();
        chain.add_interaction(deployer, foo,
                              "0x" + selector_hex(selector_of("poke()")));
        chain.write_fixtures(FixtureStore(dir.path()), 50'000);
        chain.write_fixtures(FixtureStore(dir.path()), 2); // small pages too
    }

    EtherscanClient client(int page_size = 50'000) {
        ClientConfig cfg;
        cfg.page_size = page_size;
        return EtherscanClient(clock, {ApiKeyConfig{"test", 5, 1'000'000, 0}},
                               FixtureStore(dir.path()), cfg);
    }
};

} // namespace

TEST_CASE("transaction list comes back parsed and ordered") {
    SmallWorld world;
    auto client = world.client();
    const auto txs = client.get_transaction_list(world.deployer, 1, 50'000, TxScope::Normal);
    REQUIRE(txs.size() == 3);
    CHECK(txs[0].contract_address == world.foo);
    CHECK(!txs[0].to_addr.has_value());
    CHECK(txs[1].input == "0x");
    CHECK(txs[2].to_addr == world.foo);
    for (std::size_t i = 1; i < txs.size(); ++i) {
        CHECK(txs[i - 1].position() < txs[i].position());
    }
}

TEST_CASE("pagination: second page of size two holds the remainder") {
    SmallWorld world;
    auto client = world.client(2);
    const auto page1 = client.get_transaction_list(world.deployer, 1, 2, TxScope::Normal);
    const auto page2 = client.get_transaction_list(world.deployer, 2, 2, TxScope::Normal);
    const auto page3 = client.get_transaction_list(world.deployer, 3, 2, TxScope::Normal);
    CHECK(page1.size() == 2);
    CHECK(page2.size() == 1);
    CHECK(page3.empty());

    SUBCASE("pages union to the full list without duplicates") {
        const auto all = all_transactions(client, world.deployer, TxScope::Normal, 2);
        const auto whole = world.client().get_transaction_list(world.deployer, 1, 50'000,
                                                               TxScope::Normal);
        REQUIRE(all.size() == whole.size());
        std::set<std::string> hashes;
        for (const auto& tx : all) hashes.insert(tx.hash);
        CHECK(hashes.size() == all.size());
        for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i].hash == whole[i].hash);
    }
}

TEST_CASE("address with no transactions yields an empty list") {
    SmallWorld world;
    auto client = world.client();
    CHECK(client.get_transaction_list(world.foo, 2, 50'000, TxScope::Normal).empty());
    // stub only ever receives a transfer; its page 1 exists and has one entry
    CHECK(client.get_transaction_list(world.stub, 1, 50'000, TxScope::Normal).size() == 1);
    // and it has no internal transactions at all
    CHECK(client.get_transaction_list(world.stub, 1, 50'000, TxScope::Internal).empty());
}

TEST_CASE("seven transactions, page two of size five holds two") {
    testutil::TempDir dir("seven");
    chainfix::ChainBuilder chain(77);
    const Address busy = chain.fresh_address();
    for (int i = 0; i < 7; ++i) {
        chain.next_block();
        chain.add_transfer(busy, chain.fresh_address());
    }
    chain.write_fixtures(FixtureStore(dir.path()), 5);

    SimClock clock(0);
    ClientConfig cfg;
    cfg.page_size = 5;
    EtherscanClient client(clock, {ApiKeyConfig{"k", 5, 1'000'000, 0}}, FixtureStore(dir.path()),
                           cfg);
    CHECK(client.get_transaction_list(busy, 1, 5, TxScope::Normal).size() == 5);
    CHECK(client.get_transaction_list(busy, 2, 5, TxScope::Normal).size() == 2);
    CHECK(client.get_transaction_list(busy, 3, 5, TxScope::Normal).empty());
}

TEST_CASE("verified source round trip") {
    SmallWorld world;
    auto client = world.client();
    const auto src = client.get_verified_source(world.foo);
    CHECK(src.contract_name == "Foo");
    CHECK(src.has_source());
    CHECK(src.abi.entries.size() == 1);
    CHECK(src.abi.entries[0].method_name == "poke");

    SUBCASE("the name field is reported verbatim") {
        CHECK(client.get_verified_source(world.stub).contract_name == "MultiSigStub");
    }
    SUBCASE("unverified addresses raise NotVerified") {
        CHECK_THROWS_AS(client.get_verified_source(world.deployer), NotVerified);
        CHECK(!client.try_verified_source(world.deployer).has_value());
        CHECK(client.is_contract(world.foo));
        CHECK(!client.is_contract(world.deployer));
    }
}

TEST_CASE("fixture misses and determinism") {
    SmallWorld world;
    auto client = world.client();
    SUBCASE("unknown parameter set raises FixtureMiss") {
        CHECK_THROWS_AS(client.fetch({{"module", "account"},
                                      {"action", "balance"},
                                      {"address", world.foo}}),
                        FixtureMiss);
    }
    SUBCASE("identical requests replay identical payloads") {
        Params params{{"module", "contract"}, {"action", "getsourcecode"}, {"address", world.foo}};
        CHECK(client.fetch(params) == client.fetch(params));
    }
    SUBCASE("the fixture key ignores the api key parameter") {
        FixtureStore store(world.dir.path());
        Params with{{"module", "m"}, {"apikey", "SECRET"}, {"action", "a"}};
        Params without{{"module", "m"}, {"action", "a"}};
        CHECK(store.path_for(with) == store.path_for(without));
        CHECK(canonical_request(with) == "action=a&module=m");
    }
}

TEST_CASE("malformed payloads raise ParseError") {
    testutil::TempDir dir("badfix");
    FixtureStore store(dir.path());
    Params params{{"module", "account"}, {"action", "txlist"}, {"address", "0x" + std::string(40, 'a')},
                  {"page", "1"}, {"offset", "50000"}, {"sort", "asc"}};
    store.record(params, "this is not json");
    SimClock clock(0);
    EtherscanClient client(clock, {ApiKeyConfig{"k", 5, 1000, 0}}, FixtureStore(dir.path()));
    CHECK_THROWS_AS(client.get_transaction_list("0x" + std::string(40, 'a'), 1, 50'000,
                                                TxScope::Normal),
                    ParseError);
}

TEST_CASE("api level NOTOK raises ApiError") {
    testutil::TempDir dir("apierr");
    FixtureStore store(dir.path());
    const Address addr = "0x" + std::string(40, 'b');
    Params params{{"module", "account"}, {"action", "txlist"}, {"address", addr},
                  {"page", "1"}, {"offset", "50000"}, {"sort", "asc"}};
    store.record(params, R"({"status":"0","message":"NOTOK","result":"Max rate limit reached"})");
    SimClock clock(0);
    EtherscanClient client(clock, {ApiKeyConfig{"k", 5, 1000, 0}}, FixtureStore(dir.path()));
    CHECK_THROWS_AS(client.get_transaction_list(addr, 1, 50'000, TxScope::Normal), ApiError);
}

namespace {

struct FlakyTransport final : Transport {
    int failures_left;
    int calls = 0;
    explicit FlakyTransport(int failures) : failures_left(failures) {}
    std::string get(const std::string&) override {
        ++calls;
        if (failures_left-- > 0) throw TransportError("connection reset");
        return R"({"status":"1","message":"OK","result":[]})";
    }
};

} // namespace

TEST_CASE("transient transport errors retry with backoff, then give up") {
    SUBCASE("two failures then success") {
        SimClock clock(0);
        FlakyTransport transport(2);
        EtherscanClient client(clock, {ApiKeyConfig{"k", 5, 1000, 0}}, transport);
        const auto payload = client.fetch({{"module", "m"}, {"action", "a"}});
        CHECK(payload.find("OK") != std::string::npos);
        CHECK(transport.calls == 3);
        CHECK(clock.now() >= 1000 + 2000); // 1s then 2s of backoff
    }
    SUBCASE("persistent failure surfaces TransportError after 3 retries") {
        SimClock clock(0);
        FlakyTransport transport(100);
        EtherscanClient client(clock, {ApiKeyConfig{"k", 5, 1000, 0}}, transport);
        CHECK_THROWS_AS(client.fetch({{"module", "m"}, {"action", "a"}}), TransportError);
        CHECK(transport.calls == 4); // initial try + 3 retries
    }
}

TEST_CASE("live mode records replayable fixtures") {
    testutil::TempDir dir("record");
    SimClock clock(0);
    FlakyTransport transport(0);
    EtherscanClient live(clock, {ApiKeyConfig{"k", 5, 1000, 0}}, transport,
                         FixtureStore(dir.path()));
    const auto payload = live.fetch({{"module", "m"}, {"action", "a"}});

    EtherscanClient replay(clock, {ApiKeyConfig{"other-key", 5, 1000, 0}},
                           FixtureStore(dir.path()));
    CHECK(replay.fetch({{"module", "m"}, {"action", "a"}}) == payload);
}
