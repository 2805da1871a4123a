#include <doctest.h>

#include <fstream>
#include <map>
#include <random>

#include "ethver/dataset.hpp"
#include "temp_dir.hpp"

using namespace ethver;

namespace {

ContractVersion make_version(const std::string& name, const Address& deployer,
                             const Address& address, int index, const std::string& source) {
    ContractVersion v;
    v.identity = {name, deployer};
    v.address = address;
    v.version_index = index;
    VerifiedSource src;
    src.contract_name = name;
    src.source_text = source;
    v.source = src;
    return v;
}

const Address kDeployerA = "0x" + std::string(40, '1');
const Address kDeployerB = "0x" + std::string(40, '2');

Address addr_of(int i) {
    std::string hex = std::to_string(1000 + i);
    return "0x" + std::string(40 - hex.size(), '0') + hex;
}

} // namespace

TEST_CASE("sanctuary filename parsing") {
    SUBCASE("address and name split at the first underscore after the address") {
        const auto [address, name] =
            parse_sanctuary_name("0x004de0313fd383c166b6f4390f1ba6c476c505d1_MultiSigStub.sol");
        CHECK(address == "0x004de0313fd383c166b6f4390f1ba6c476c505d1");
        CHECK(name == "MultiSigStub");
    }
    SUBCASE("names keep their own underscores") {
        const auto [address, name] =
            parse_sanctuary_name("0x" + std::string(40, 'a') + "_My_Token.sol");
        CHECK(name == "My_Token");
        (void)address;
    }
    SUBCASE("uppercase addresses normalize to lowercase") {
        const auto [address, name] =
            parse_sanctuary_name("0x" + std::string(40, 'A') + "_Coin.sol");
        CHECK(address == "0x" + std::string(40, 'a'));
        (void)name;
    }
    SUBCASE("malformed names are rejected") {
        CHECK_THROWS_AS(parse_sanctuary_name("Foo.sol"), MalformedName);
        CHECK_THROWS_AS(parse_sanctuary_name("0x1234_Foo.sol"), MalformedName);
        CHECK_THROWS_AS(parse_sanctuary_name("0x" + std::string(40, 'a') + "_.sol"), MalformedName);
        CHECK_THROWS_AS(parse_sanctuary_name("0x" + std::string(40, 'a') + "_Foo.txt"), MalformedName);
        CHECK_THROWS_AS(parse_sanctuary_name("0x" + std::string(40, 'g') + "_Foo.sol"), MalformedName);
    }
}

TEST_CASE("version filename round trip") {
    const Address addr = addr_of(1);
    CHECK(version_filename(addr, "Foo", 3) == addr + "_Foo_V3.sol");

    const auto parsed = parse_version_filename(addr + "_My_V2_Thing_V41.sol");
    REQUIRE(parsed.has_value());
    CHECK(parsed->name == "My_V2_Thing");
    CHECK(parsed->index == 41);

    CHECK(!parse_version_filename("README.md").has_value());
    CHECK(!parse_version_filename(addr + "_NoIndex.sol").has_value());
    CHECK(!parse_version_filename(addr + "_Foo_V0.sol").has_value());
}

TEST_CASE("writes land in the name/deployer layout") {
    testutil::TempDir dir("store");
    DatasetStore store(dir.path());
    const auto path =
        store.write_version(make_version("Foo", kDeployerA, addr_of(1), 1, "contract Foo {}"));
    CHECK(path == dir.path() / "Foo" / kDeployerA / (addr_of(1) + "_Foo_V1.sol"));
    CHECK(DatasetStore::read_file(path) == "contract Foo {}");

    SUBCASE("same write twice is a no-op") {
        const auto again =
            store.write_version(make_version("Foo", kDeployerA, addr_of(1), 1, "contract Foo {}"));
        CHECK(again == path);
    }
    SUBCASE("diverging content for the same address is a conflict") {
        CHECK_THROWS_AS(
            store.write_version(make_version("Foo", kDeployerA, addr_of(1), 1, "contract Bar {}")),
            ConflictError);
    }
    SUBCASE("two deployers of the same name sit in sibling directories") {
        store.write_version(make_version("Foo", kDeployerB, addr_of(2), 1, "contract Foo {}"));
        CHECK(std::filesystem::exists(dir.path() / "Foo" / kDeployerA));
        CHECK(std::filesystem::exists(dir.path() / "Foo" / kDeployerB));
    }
    SUBCASE("a version without source cannot be written") {
        ContractVersion empty = make_version("Foo", kDeployerA, addr_of(3), 2, "");
        empty.source.reset();
        CHECK_THROWS_AS(store.write_version(empty), IoError);
    }
}

TEST_CASE("reading families back") {
    testutil::TempDir dir("read");
    DatasetStore store(dir.path());
    // write out of order; reader sorts by index
    store.write_version(make_version("Foo", kDeployerA, addr_of(3), 3, "contract Foo { // v3\n}"));
    store.write_version(make_version("Foo", kDeployerA, addr_of(1), 1, "contract Foo { // v1\n}"));
    store.write_version(make_version("Foo", kDeployerA, addr_of(2), 2, "contract Foo { // v2\n}"));

    SUBCASE("one family, three versions in index order") {
        const auto result = store.read_families();
        REQUIRE(result.families.size() == 1);
        const auto& family = result.families[0];
        CHECK(family.identity.name == "Foo");
        CHECK(family.identity.deployer == kDeployerA);
        REQUIRE(family.versions.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(family.versions[static_cast<std::size_t>(i)].version_index == i + 1);
            CHECK(family.versions[static_cast<std::size_t>(i)].address == addr_of(i + 1));
        }
        CHECK(result.skipped.empty());
    }
    SUBCASE("stray files are skipped with a diagnostic") {
        std::ofstream(dir.path() / "Foo" / kDeployerA / "README.md") << "notes\n";
        const auto result = store.read_families();
        REQUIRE(result.families.size() == 1);
        CHECK(result.families[0].versions.size() == 3);
        REQUIRE(result.skipped.size() == 1);
        CHECK(result.skipped[0].find("README.md") != std::string::npos);
    }
    SUBCASE("empty root yields no families") {
        testutil::TempDir empty("empty");
        CHECK(DatasetStore(empty.path()).read_families().families.empty());
    }
}

TEST_CASE("random write/read round trip") {
    std::mt19937_64 rng(515);
    for (int trial = 0; trial < 10; ++trial) {
        testutil::TempDir dir("rt");
        DatasetStore store(dir.path());
        const int families = 1 + static_cast<int>(rng() % 4);
        std::map<std::pair<std::string, Address>, std::vector<std::string>> written;
        int next_addr = 0;
        for (int f = 0; f < families; ++f) {
            const std::string name = "Fam" + std::to_string(f);
            const Address deployer = rng() % 2 == 0 ? kDeployerA : kDeployerB;
            const int versions = 1 + static_cast<int>(rng() % 6);
            for (int v = 1; v <= versions; ++v) {
                const std::string body =
                    "contract " + name + " { uint256 v = " + std::to_string(rng() % 100) + "; }";
                store.write_version(make_version(name, deployer, addr_of(next_addr++), v, body));
                written[{name, deployer}].push_back(body);
            }
        }
        const auto result = store.read_families();
        REQUIRE(result.families.size() == written.size());
        for (const auto& family : result.families) {
            const auto& expected = written.at({family.identity.name, family.identity.deployer});
            REQUIRE(family.versions.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(family.versions[i].version_index == static_cast<int>(i) + 1);
                CHECK(family.versions[i].source->source_text == expected[i]);
            }
        }
    }
}
