#include "cgmcts/units.hpp"

#include <charconv>
#include <sstream>

namespace cgmcts {

UnitSignature::UnitSignature(std::map<std::string, int> exponents) : exponents_(std::move(exponents)) {
    normalize();
}

UnitSignature UnitSignature::base(std::string dimension, int exponent) {
    return UnitSignature({{std::move(dimension), exponent}});
}

int UnitSignature::exponent(const std::string& dimension) const {
    auto it = exponents_.find(dimension);
    return it == exponents_.end() ? 0 : it->second;
}

UnitSignature UnitSignature::times(const UnitSignature& other) const {
    auto result = exponents_;
    for (const auto& [dim, e] : other.exponents_) result[dim] += e;
    return UnitSignature(std::move(result));
}

UnitSignature UnitSignature::over(const UnitSignature& other) const {
    auto result = exponents_;
    for (const auto& [dim, e] : other.exponents_) result[dim] -= e;
    return UnitSignature(std::move(result));
}

UnitSignature UnitSignature::shifted(const std::string& dimension, int delta) const {
    auto result = exponents_;
    result[dimension] += delta;
    return UnitSignature(std::move(result));
}

std::string UnitSignature::to_string() const {
    if (exponents_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [dim, e] : exponents_) {
        if (!first) os << '*';
        first = false;
        os << dim;
        if (e != 1) os << '^' << e;
    }
    return os.str();
}

void UnitSignature::normalize() {
    std::erase_if(exponents_, [](const auto& kv) { return kv.second == 0; });
}

namespace {

bool parse_size(std::string_view text, std::size_t& out) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size() && out > 0;
}

}  // namespace

std::optional<Shape> Shape::parse(std::string_view text) {
    if (text == "scalar") return Shape::scalar();
    auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
    auto head = text.substr(0, open);
    auto body = text.substr(open + 1, text.size() - open - 2);
    if (head == "vector") {
        std::size_t n = 0;
        if (!parse_size(body, n)) return std::nullopt;
        return Shape::vector(n);
    }
    if (head == "matrix") {
        auto comma = body.find(',');
        if (comma == std::string_view::npos) return std::nullopt;
        std::size_t m = 0, n = 0;
        if (!parse_size(body.substr(0, comma), m) || !parse_size(body.substr(comma + 1), n)) return std::nullopt;
        return Shape::matrix(m, n);
    }
    return std::nullopt;
}

std::string Shape::to_string() const {
    switch (kind) {
        case Kind::scalar: return "scalar";
        case Kind::vector: return "vector(" + std::to_string(rows) + ")";
        case Kind::matrix: return "matrix(" + std::to_string(rows) + "," + std::to_string(cols) + ")";
    }
    return "scalar";
}

}  // namespace cgmcts
