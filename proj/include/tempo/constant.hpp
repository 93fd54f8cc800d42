#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tempo {

enum class ConstantKind : std::uint8_t { None, Boolean, Number, Symbol, Vector, Path, Lazy };

namespace detail {
struct ConstantData;
}

// Atomic value used as function argument or function value.
//
// None, Boolean, Number and Symbol compare by value (symbols are interned).
// Vector, Path and Lazy compare by identity: two samples with equal
// coordinates are still different constants.
class Constant {
public:
    Constant() = default;  // None

    static Constant none() { return {}; }
    static Constant boolean(bool value);
    static Constant number(double value);
    static Constant symbol(std::string_view name);
    static Constant vector(std::vector<double> values, std::string tag = {}, std::string name = {});
    static Constant path(std::vector<std::vector<double>> waypoints, std::string tag = {},
                         std::string name = {});
    // Placeholder constant; `name` must start with '@'. `origin` describes the
    // stream instance that owes it a value.
    static Constant lazy(std::string name, std::string origin);

    ConstantKind kind() const { return kind_; }
    bool is_none() const { return kind_ == ConstantKind::None; }
    bool is_lazy() const { return kind_ == ConstantKind::Lazy; }
    bool is_identity() const {
        return kind_ == ConstantKind::Vector || kind_ == ConstantKind::Path || kind_ == ConstantKind::Lazy;
    }

    bool as_bool() const;
    double as_number() const;
    const std::string& name() const;  // symbol, lazy, or display name of vector/path
    const std::string& tag() const;
    const std::string& origin() const;
    const std::vector<double>& values() const;
    const std::vector<std::vector<double>>& waypoints() const;
    std::uint64_t serial() const;

    std::string str() const;

    friend bool operator==(const Constant& a, const Constant& b);
    friend std::strong_ordering operator<=>(const Constant& a, const Constant& b);

    std::size_t hash() const;

private:
    ConstantKind kind_ = ConstantKind::None;
    double number_ = 0.0;
    std::shared_ptr<const detail::ConstantData> data_;
};

std::ostream& operator<<(std::ostream& os, const Constant& c);

struct ConstantHash {
    std::size_t operator()(const Constant& c) const { return c.hash(); }
};

struct ConstantsHash {
    std::size_t operator()(const std::vector<Constant>& cs) const;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t value) {
    return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

bool any_lazy(std::span<const Constant> args);

std::string join_constants(std::span<const Constant> args, std::string_view sep = ",");

}  // namespace tempo
