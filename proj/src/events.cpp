#include "semev/events.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace semev::pipeline {

using nlohmann::json;

ParseError::ParseError(std::string file_, std::size_t line_, const std::string& reason)
    : std::runtime_error(file_ + ":" + std::to_string(line_) + ": " + reason),
      file(std::move(file_)),
      line(line_) {}

std::string to_string(SanctionKind k) {
    switch (k) {
        case SanctionKind::Blacklist: return "Blacklist";
        case SanctionKind::Unblacklist: return "Unblacklist";
        case SanctionKind::DestroyFunds: return "DestroyFunds";
        case SanctionKind::Reissue: return "Reissue";
    }
    return "?";
}

std::string to_string(AddressCategory c) {
    switch (c) {
        case AddressCategory::Intermediary: return "Intermediary";
        case AddressCategory::ExchangeDepositCluster: return "ExchangeDepositCluster";
        case AddressCategory::MixerCore: return "MixerCore";
        case AddressCategory::Other: return "Other";
        case AddressCategory::Unknown: return "Unknown";
    }
    return "?";
}

SanctionKind sanction_kind_from(const std::string& s, const std::string& file, std::size_t line) {
    if (s == "Blacklist") return SanctionKind::Blacklist;
    if (s == "Unblacklist") return SanctionKind::Unblacklist;
    if (s == "DestroyFunds") return SanctionKind::DestroyFunds;
    if (s == "Reissue") return SanctionKind::Reissue;
    throw ParseError(file, line, "unknown sanction kind '" + s + "'");
}

AddressCategory category_from(const std::string& s, const std::string& file, std::size_t line) {
    if (s == "Intermediary") return AddressCategory::Intermediary;
    if (s == "ExchangeDepositCluster") return AddressCategory::ExchangeDepositCluster;
    if (s == "MixerCore") return AddressCategory::MixerCore;
    if (s == "Other") return AddressCategory::Other;
    if (s == "Unknown") return AddressCategory::Unknown;
    throw ParseError(file, line, "unknown address category '" + s + "'");
}

namespace {

json parse_line(const std::string& line, const std::string& file, std::size_t lineno) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(file, lineno, "not a JSON object");
    return j;
}

const json& field(const json& j, const char* key, const std::string& file, std::size_t lineno) {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(file, lineno, std::string("missing key '") + key + "'");
    return *it;
}

std::string str_field(const json& j, const char* key, const std::string& file, std::size_t lineno) {
    const json& v = field(j, key, file, lineno);
    if (!v.is_string()) throw ParseError(file, lineno, std::string("key '") + key + "' must be a string");
    return v.get<std::string>();
}

std::int64_t int_field(const json& j, const char* key, const std::string& file, std::size_t lineno) {
    const json& v = field(j, key, file, lineno);
    if (!v.is_number_integer()) throw ParseError(file, lineno, std::string("key '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

UsdMicros amount_field(const json& j, const char* key, const std::string& file, std::size_t lineno) {
    const json& v = field(j, key, file, lineno);
    std::optional<UsdMicros> a;
    if (v.is_string())
        a = UsdMicros::parse(v.get<std::string>());
    else if (v.is_number())
        try {
            a = UsdMicros::from_usd(v.get<double>());
        } catch (const std::invalid_argument&) {
            a = std::nullopt;
        }
    if (!a || a->negative()) throw ParseError(file, lineno, "amount must be a nonnegative decimal");
    return *a;
}

}  // namespace

std::vector<TransferEvent> read_transfers_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<TransferEvent> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json j = parse_line(line, path, lineno);
        TransferEvent e;
        e.token = str_field(j, "token", path, lineno);
        e.tx_id = str_field(j, "tx_id", path, lineno);
        e.block_time = int_field(j, "block_time", path, lineno);
        if (e.block_time <= 0) throw ParseError(path, lineno, "block_time must be positive");
        e.from_addr = str_field(j, "from_addr", path, lineno);
        e.to_addr = str_field(j, "to_addr", path, lineno);
        e.amount = amount_field(j, "amount", path, lineno);
        const json& rv = field(j, "reverted", path, lineno);
        if (!rv.is_boolean()) throw ParseError(path, lineno, "reverted must be a boolean");
        e.reverted = rv.get<bool>();
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<SanctionEvent> read_sanctions_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<SanctionEvent> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json j = parse_line(line, path, lineno);
        SanctionEvent e;
        e.token = str_field(j, "token", path, lineno);
        e.address = str_field(j, "address", path, lineno);
        e.kind = sanction_kind_from(str_field(j, "kind", path, lineno), path, lineno);
        const json& ts = field(j, "t_submit", path, lineno);
        if (ts.is_null())
            e.t_submit = std::nullopt;
        else if (ts.is_number_integer())
            e.t_submit = ts.get<std::int64_t>();
        else
            throw ParseError(path, lineno, "t_submit must be an integer or null");
        e.t_exec = int_field(j, "t_exec", path, lineno);
        if (e.t_submit && *e.t_submit > e.t_exec)
            throw ParseError(path, lineno, "t_submit must not exceed t_exec");
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<AddressLabel> read_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::vector<AddressLabel> out;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) return out;
    ++lineno;
    if (line != "address,category") throw ParseError(path, 1, "expected header 'address,category'");
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path, lineno, "expected 'address,category'");
        AddressLabel l;
        l.address = line.substr(0, comma);
        l.category = category_from(line.substr(comma + 1), path, lineno);
        out.push_back(std::move(l));
    }
    return out;
}

std::string transfer_line(const TransferEvent& e) {
    std::ostringstream os;
    os << "{\"token\":" << json(e.token) << ",\"tx_id\":" << json(e.tx_id)
       << ",\"block_time\":" << e.block_time << ",\"from_addr\":" << json(e.from_addr)
       << ",\"to_addr\":" << json(e.to_addr) << ",\"amount\":" << e.amount.str()
       << ",\"reverted\":" << (e.reverted ? "true" : "false") << "}";
    return os.str();
}

std::string sanction_line(const SanctionEvent& e) {
    std::ostringstream os;
    os << "{\"token\":" << json(e.token) << ",\"address\":" << json(e.address)
       << ",\"kind\":\"" << to_string(e.kind) << "\",\"t_submit\":";
    if (e.t_submit)
        os << *e.t_submit;
    else
        os << "null";
    os << ",\"t_exec\":" << e.t_exec << "}";
    return os.str();
}

std::string labels_csv(const std::vector<AddressLabel>& labels) {
    std::string out = "address,category\n";
    for (const auto& l : labels) out += l.address + "," + to_string(l.category) + "\n";
    return out;
}

}  // namespace semev::pipeline
