#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace adtmas {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// Accepts "12", "3/4" and "1.25". No sign, no exponent.
std::optional<Rational> parse_rational(std::string_view text);

// "5", "3/4", "-7/2".
std::string to_string(const Rational& r);

std::size_t hash_value(const Rational& r);

inline bool is_integer(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

}  // namespace adtmas
