#include "adtmas/rational.hpp"

#include <boost/container_hash/hash.hpp>

#include <cctype>

namespace adtmas {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash), den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        Integer d{std::string(den)};
        if (d == 0) return std::nullopt;
        return Rational(Integer(std::string(num)), d);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot), frac = text.substr(dot + 1);
        if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        return Rational(Integer(std::string(whole)) * scale + Integer(std::string(frac)), scale);
    }
    if (!all_digits(text)) return std::nullopt;
    return Rational(Integer(std::string(text)));
}

std::string to_string(const Rational& r) {
    const auto& num = boost::multiprecision::numerator(r);
    const auto& den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::size_t hash_value(const Rational& r) {
    const auto& num = boost::multiprecision::numerator(r);
    const auto& den = boost::multiprecision::denominator(r);
    std::size_t seed = 0;
    if (num >= INT64_MIN && num <= INT64_MAX && den <= INT64_MAX) {
        boost::hash_combine(seed, num.convert_to<std::int64_t>());
        boost::hash_combine(seed, den.convert_to<std::int64_t>());
    } else {
        boost::hash_combine(seed, num.str());
        boost::hash_combine(seed, den.str());
    }
    return seed;
}

}  // namespace adtmas
