#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "semev/events.hpp"
#include "semev/manifest.hpp"

using namespace semev::pipeline;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path, std::ios::trunc);
    out << content;
    return path;
}

}  // namespace

TEST_SUITE("decimal") {

TEST_CASE("exact parse and render") {
    CHECK(UsdMicros::parse("0")->micros == 0);
    CHECK(UsdMicros::parse("1")->micros == 1'000'000);
    CHECK(UsdMicros::parse("1234.567890")->micros == 1'234'567'890);
    CHECK(UsdMicros::parse("0.000001")->micros == 1);
    CHECK(UsdMicros::parse("-2.5")->micros == -2'500'000);
    CHECK(UsdMicros::parse("1000000000.123456")->micros == 1'000'000'000'123'456);

    CHECK_FALSE(UsdMicros::parse(""));
    CHECK_FALSE(UsdMicros::parse("abc"));
    CHECK_FALSE(UsdMicros::parse("1."));
    CHECK_FALSE(UsdMicros::parse("1.0000001"));  // seventh fractional digit
    CHECK_FALSE(UsdMicros::parse("1e6"));

    CHECK(UsdMicros{1'234'567'890}.str() == "1234.567890");
    CHECK(UsdMicros{-500}.str() == "-0.000500");
    CHECK(UsdMicros{0}.str() == "0.000000");
}

TEST_CASE("string round trip is the identity") {
    for (std::int64_t m : {0LL, 1LL, 999'999LL, 1'000'000LL, 123'456'789'012LL, -42LL}) {
        const UsdMicros a{m};
        CHECK(UsdMicros::parse(a.str())->micros == m);
    }
}

TEST_CASE("double ingestion is exact at token precision") {
    CHECK(UsdMicros::from_usd(123.45).micros == 123'450'000);
    CHECK(UsdMicros::from_usd(0.000001).micros == 1);
    CHECK_THROWS_AS(UsdMicros::from_usd(1e13), std::invalid_argument);
}

}  // TEST_SUITE

TEST_SUITE("events") {

TEST_CASE("transfer jsonl round trip") {
    const TransferEvent e{"USDX", "tx-1", 1600000100, "0xaaa", "0xbbb",
                          *UsdMicros::parse("1500.25"), false};
    const TransferEvent r{"USDX", "tx-2", 1600000200, "0xaaa", "0xccc",
                          *UsdMicros::parse("10"), true};
    const auto path = write_temp("semev_transfers.jsonl",
                                 transfer_line(e) + "\n" + transfer_line(r) + "\n");
    const auto events = read_transfers_jsonl(path);
    REQUIRE(events.size() == 2);
    CHECK(events[0].tx_id == "tx-1");
    CHECK(events[0].amount.micros == 1'500'250'000);
    CHECK_FALSE(events[0].reverted);
    CHECK(events[1].reverted);
}

TEST_CASE("malformed transfer rows carry their line number") {
    const auto path = write_temp("semev_bad.jsonl",
                                 R"({"token":"USDX","tx_id":"a","block_time":5,"from_addr":"x","to_addr":"y","amount":1.0,"reverted":false})"
                                 "\nnot json\n");
    try {
        read_transfers_jsonl(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    const auto neg = write_temp("semev_neg.jsonl",
                                R"({"token":"USDX","tx_id":"a","block_time":5,"from_addr":"x","to_addr":"y","amount":-3,"reverted":false})"
                                "\n");
    CHECK_THROWS_AS(read_transfers_jsonl(neg), ParseError);

    const auto missing = write_temp("semev_missing.jsonl",
                                    R"({"token":"USDX","tx_id":"a","block_time":5,"from_addr":"x","amount":3,"reverted":false})"
                                    "\n");
    CHECK_THROWS_AS(read_transfers_jsonl(missing), ParseError);
}

TEST_CASE("sanction jsonl honors the submit/exec ordering") {
    const SanctionEvent s{"USDX", "0xaaa", SanctionKind::Blacklist, 1600000000, 1600000500};
    const SanctionEvent n{"USDX", "0xbbb", SanctionKind::Unblacklist, std::nullopt, 1600000900};
    const auto path = write_temp("semev_sanctions.jsonl",
                                 sanction_line(s) + "\n" + sanction_line(n) + "\n");
    const auto events = read_sanctions_jsonl(path);
    REQUIRE(events.size() == 2);
    CHECK(events[0].t_submit.value() == 1600000000);
    CHECK_FALSE(events[1].t_submit.has_value());

    const auto bad = write_temp("semev_badsub.jsonl",
                                R"({"token":"USDX","address":"0xa","kind":"Blacklist","t_submit":100,"t_exec":50})"
                                "\n");
    CHECK_THROWS_AS(read_sanctions_jsonl(bad), ParseError);
}

TEST_CASE("labels csv") {
    const auto path = write_temp("semev_labels.csv",
                                 "address,category\n0xmix,MixerCore\n0xexch,ExchangeDepositCluster\n");
    const auto labels = read_labels_csv(path);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].category == AddressCategory::MixerCore);

    const auto bad = write_temp("semev_badlabels.csv", "address,category\n0xmix,Nope\n");
    CHECK_THROWS_AS(read_labels_csv(bad), ParseError);
    const auto badheader = write_temp("semev_badheader.csv", "addr,cat\n");
    CHECK_THROWS_AS(read_labels_csv(badheader), ParseError);
}

TEST_CASE("missing files are parse errors, not crashes") {
    CHECK_THROWS_AS(read_transfers_jsonl("/nonexistent/nope.jsonl"), ParseError);
    CHECK_THROWS_AS(read_sanctions_jsonl("/nonexistent/nope.jsonl"), ParseError);
    CHECK_THROWS_AS(read_labels_csv("/nonexistent/nope.csv"), ParseError);
}

}  // TEST_SUITE

TEST_SUITE("manifest") {

TEST_CASE("canonicalization folds integral floats") {
    nlohmann::json a = {{"v", 1.0}, {"psi", 2.0}, {"r", 1.5}};
    nlohmann::json b = {{"psi", 2}, {"r", 1.5}, {"v", 1}};
    CHECK(semev::canonical_dump(a) == semev::canonical_dump(b));
    CHECK(semev::config_hash(a) == semev::config_hash(b));
    nlohmann::json c = {{"v", 1.0}, {"psi", 2.0}, {"r", 2.5}};
    CHECK(semev::config_hash(a) != semev::config_hash(c));
}

TEST_CASE("atomic writes land complete") {
    const auto dir = std::filesystem::temp_directory_path() / "semev_atomic";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "f.txt").string();
    semev::write_file_atomic(path, "hello\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "hello\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

}  // TEST_SUITE
