#include "semev/decimal.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace semev::pipeline {

UsdMicros UsdMicros::from_usd(double usd) {
    if (!std::isfinite(usd) || std::abs(usd) > 9.0e12)
        throw std::invalid_argument("amount out of representable range");
    return {static_cast<std::int64_t>(std::llround(usd * 1e6))};
}

std::optional<UsdMicros> UsdMicros::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;

    std::int64_t whole = 0;
    for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        if (whole > 9'000'000'000'000 / 10) return std::nullopt;
        whole = whole * 10 + (text[i] - '0');
    }
    std::int64_t frac = 0;
    int frac_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        if (i >= text.size()) return std::nullopt;
        for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
            if (++frac_digits > 6) return std::nullopt;  // beyond token precision
            frac = frac * 10 + (text[i] - '0');
        }
    }
    if (i != text.size()) return std::nullopt;
    for (int k = frac_digits; k < 6; ++k) frac *= 10;
    const std::int64_t m = whole * 1'000'000 + frac;
    return UsdMicros{neg ? -m : m};
}

std::string UsdMicros::str() const {
    const std::int64_t a = micros < 0 ? -micros : micros;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s%lld.%06lld", micros < 0 ? "-" : "",
                  static_cast<long long>(a / 1'000'000), static_cast<long long>(a % 1'000'000));
    return buf;
}

}  // namespace semev::pipeline
