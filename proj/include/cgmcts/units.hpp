#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace cgmcts {

/// Integer exponents over named base dimensions. Zero exponents are never stored,
/// so the empty signature is "dimensionless" and equality is plain map equality.
class UnitSignature {
public:
    UnitSignature() = default;
    explicit UnitSignature(std::map<std::string, int> exponents);

    static UnitSignature dimensionless() { return {}; }
    static UnitSignature base(std::string dimension, int exponent = 1);

    [[nodiscard]] const std::map<std::string, int>& exponents() const noexcept { return exponents_; }
    [[nodiscard]] bool is_dimensionless() const noexcept { return exponents_.empty(); }
    [[nodiscard]] int exponent(const std::string& dimension) const;

    [[nodiscard]] UnitSignature times(const UnitSignature& other) const;
    [[nodiscard]] UnitSignature over(const UnitSignature& other) const;
    /// Shift one dimension's exponent (differentiation -1, integration +1).
    [[nodiscard]] UnitSignature shifted(const std::string& dimension, int delta) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const UnitSignature&, const UnitSignature&) = default;

private:
    void normalize();
    std::map<std::string, int> exponents_;
};

/// Linear-algebra shape tag: scalar, vector(n) or matrix(m,n).
struct Shape {
    enum class Kind { scalar, vector, matrix };

    Kind kind = Kind::scalar;
    std::size_t rows = 1;
    std::size_t cols = 1;

    static Shape scalar() { return {}; }
    static Shape vector(std::size_t n) { return {Kind::vector, n, 1}; }
    static Shape matrix(std::size_t m, std::size_t n) { return {Kind::matrix, m, n}; }

    /// Parses "scalar", "vector(3)", "matrix(2,3)"; nullopt when malformed.
    static std::optional<Shape> parse(std::string_view text);
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

}  // namespace cgmcts
