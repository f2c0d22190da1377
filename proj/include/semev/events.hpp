#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semev/decimal.hpp"

namespace semev::pipeline {

struct TransferEvent {
    std::string token;
    std::string tx_id;
    std::int64_t block_time;  // epoch seconds
    std::string from_addr;
    std::string to_addr;
    UsdMicros amount;
    bool reverted = false;
};

enum class SanctionKind { Blacklist, Unblacklist, DestroyFunds, Reissue };

struct SanctionEvent {
    std::string token;
    std::string address;
    SanctionKind kind;
    std::optional<std::int64_t> t_submit;  // multisig commitment time, when present
    std::int64_t t_exec;                   // effectiveness time; all labels anchor here
};

enum class AddressCategory { Intermediary, ExchangeDepositCluster, MixerCore, Other, Unknown };

struct AddressLabel {
    std::string address;
    AddressCategory category;
};

// Parse failure with the offending location; the CLI surfaces this as "file:line: reason".
struct ParseError : std::runtime_error {
    std::string file;
    std::size_t line;
    ParseError(std::string file_, std::size_t line_, const std::string& reason);
};

std::string to_string(SanctionKind k);
std::string to_string(AddressCategory c);
SanctionKind sanction_kind_from(const std::string& s, const std::string& file, std::size_t line);
AddressCategory category_from(const std::string& s, const std::string& file, std::size_t line);

// JSONL readers; one event per line, blank lines ignored.
std::vector<TransferEvent> read_transfers_jsonl(const std::string& path);
std::vector<SanctionEvent> read_sanctions_jsonl(const std::string& path);
// CSV with header "address,category".
std::vector<AddressLabel> read_labels_csv(const std::string& path);

// Writers emit keys in a fixed order so identical inputs give identical bytes.
std::string transfer_line(const TransferEvent& e);
std::string sanction_line(const SanctionEvent& e);
std::string labels_csv(const std::vector<AddressLabel>& labels);

}  // namespace semev::pipeline
