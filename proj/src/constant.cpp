#include "tempo/constant.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace tempo {

namespace detail {
struct ConstantData {
    std::uint64_t serial = 0;
    std::string name;
    std::string tag;
    std::string origin;
    std::vector<double> values;
    std::vector<std::vector<double>> waypoints;
};
}  // namespace detail

namespace {

std::atomic<std::uint64_t> g_serial{1};

std::uint64_t next_serial() { return g_serial.fetch_add(1, std::memory_order_relaxed); }

const std::string& empty_string() {
    static const std::string empty;
    return empty;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

Constant Constant::boolean(bool value) {
    Constant c;
    c.kind_ = ConstantKind::Boolean;
    c.number_ = value ? 1.0 : 0.0;
    return c;
}

Constant Constant::number(double value) {
    Constant c;
    c.kind_ = ConstantKind::Number;
    c.number_ = value;
    return c;
}

Constant Constant::symbol(std::string_view name) {
    static std::mutex mutex;
    static std::unordered_map<std::string, std::shared_ptr<const detail::ConstantData>> table;
    std::lock_guard lock(mutex);
    auto it = table.find(std::string(name));
    if (it == table.end()) {
        auto data = std::make_shared<detail::ConstantData>();
        data->serial = next_serial();
        data->name = std::string(name);
        it = table.emplace(std::string(name), std::move(data)).first;
    }
    Constant c;
    c.kind_ = ConstantKind::Symbol;
    c.data_ = it->second;
    return c;
}

Constant Constant::vector(std::vector<double> values, std::string tag, std::string name) {
    auto data = std::make_shared<detail::ConstantData>();
    data->serial = next_serial();
    data->values = std::move(values);
    data->tag = std::move(tag);
    data->name = name.empty() ? "v" + std::to_string(data->serial) : std::move(name);
    Constant c;
    c.kind_ = ConstantKind::Vector;
    c.data_ = std::move(data);
    return c;
}

Constant Constant::path(std::vector<std::vector<double>> waypoints, std::string tag, std::string name) {
    auto data = std::make_shared<detail::ConstantData>();
    data->serial = next_serial();
    data->waypoints = std::move(waypoints);
    data->tag = std::move(tag);
    data->name = name.empty() ? "t" + std::to_string(data->serial) : std::move(name);
    Constant c;
    c.kind_ = ConstantKind::Path;
    c.data_ = std::move(data);
    return c;
}

Constant Constant::lazy(std::string name, std::string origin) {
    if (name.empty() || name.front() != '@') {
        throw std::invalid_argument("lazy constant names must start with '@': " + name);
    }
    auto data = std::make_shared<detail::ConstantData>();
    data->serial = next_serial();
    data->name = std::move(name);
    data->origin = std::move(origin);
    Constant c;
    c.kind_ = ConstantKind::Lazy;
    c.data_ = std::move(data);
    return c;
}

bool Constant::as_bool() const {
    if (kind_ != ConstantKind::Boolean) throw std::logic_error("constant is not boolean: " + str());
    return number_ != 0.0;
}

double Constant::as_number() const {
    if (kind_ != ConstantKind::Number) throw std::logic_error("constant is not a number: " + str());
    return number_;
}

const std::string& Constant::name() const { return data_ ? data_->name : empty_string(); }
const std::string& Constant::tag() const { return data_ ? data_->tag : empty_string(); }
const std::string& Constant::origin() const { return data_ ? data_->origin : empty_string(); }

const std::vector<double>& Constant::values() const {
    static const std::vector<double> empty;
    return data_ ? data_->values : empty;
}

const std::vector<std::vector<double>>& Constant::waypoints() const {
    static const std::vector<std::vector<double>> empty;
    return data_ ? data_->waypoints : empty;
}

std::uint64_t Constant::serial() const { return data_ ? data_->serial : 0; }

std::string Constant::str() const {
    switch (kind_) {
        case ConstantKind::None: return "None";
        case ConstantKind::Boolean: return number_ != 0.0 ? "True" : "False";
        case ConstantKind::Number: return format_number(number_);
        default: return data_->name;
    }
}

bool operator==(const Constant& a, const Constant& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
        case ConstantKind::None: return true;
        case ConstantKind::Boolean:
        case ConstantKind::Number: return a.number_ == b.number_;
        default: return a.data_ == b.data_;
    }
}

std::strong_ordering operator<=>(const Constant& a, const Constant& b) {
    if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
    switch (a.kind_) {
        case ConstantKind::None: return std::strong_ordering::equal;
        case ConstantKind::Boolean:
        case ConstantKind::Number: {
            if (a.number_ < b.number_) return std::strong_ordering::less;
            if (b.number_ < a.number_) return std::strong_ordering::greater;
            return std::strong_ordering::equal;
        }
        case ConstantKind::Symbol:
            if (a.data_ == b.data_) return std::strong_ordering::equal;
            return a.data_->name.compare(b.data_->name) <=> 0;
        default: return a.data_->serial <=> b.data_->serial;
    }
}

std::size_t Constant::hash() const {
    std::size_t h = static_cast<std::size_t>(kind_);
    switch (kind_) {
        case ConstantKind::None: return h;
        case ConstantKind::Boolean:
        case ConstantKind::Number: return hash_combine(h, std::hash<double>{}(number_));
        default: return hash_combine(h, std::hash<std::uint64_t>{}(data_->serial));
    }
}

std::ostream& operator<<(std::ostream& os, const Constant& c) { return os << c.str(); }

std::size_t ConstantsHash::operator()(const std::vector<Constant>& cs) const {
    std::size_t h = cs.size();
    for (const auto& c : cs) h = hash_combine(h, c.hash());
    return h;
}

bool any_lazy(std::span<const Constant> args) {
    for (const auto& a : args) {
        if (a.is_lazy()) return true;
    }
    return false;
}

std::string join_constants(std::span<const Constant> args, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += sep;
        out += args[i].str();
    }
    return out;
}

}  // namespace tempo
