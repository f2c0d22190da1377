#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace semev::pipeline {

// Exact USD amount at six fractional digits (stablecoin token precision).
// Balance identities are computed in integer micro-units, never in floating point.
struct UsdMicros {
    std::int64_t micros = 0;

    friend auto operator<=>(const UsdMicros&, const UsdMicros&) = default;

    UsdMicros operator+(UsdMicros o) const { return {micros + o.micros}; }
    UsdMicros operator-(UsdMicros o) const { return {micros - o.micros}; }
    UsdMicros& operator+=(UsdMicros o) { micros += o.micros; return *this; }
    UsdMicros& operator-=(UsdMicros o) { micros -= o.micros; return *this; }

    bool negative() const { return micros < 0; }
    bool zero() const { return micros == 0; }
    double to_double() const { return static_cast<double>(micros) * 1e-6; }

    static UsdMicros from_usd(double usd);  // rounds to the nearest micro; throws on overflow

    // Exact decimal parse, at most six fractional digits. Returns nullopt on malformed text.
    static std::optional<UsdMicros> parse(std::string_view text);

    std::string str() const;  // fixed "d.dddddd" rendering
};

}  // namespace semev::pipeline
