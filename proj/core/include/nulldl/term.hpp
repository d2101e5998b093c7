#pragma once

#include <compare>
#include <map>
#include <string>

namespace nulldl {

enum class term_kind { constant, variable, null_value };

// A term is a constant symbol, a variable, or the null value (printed ⊥).
// Constants and variables carry non-empty names; null is a singleton kind.
class term {
public:
    term() : kind_(term_kind::null_value) {}

    static term constant(std::string symbol) {
        return term(term_kind::constant, std::move(symbol));
    }
    static term variable(std::string name) {
        return term(term_kind::variable, std::move(name));
    }
    static term null() { return term(); }

    term_kind kind() const { return kind_; }
    const std::string& text() const { return text_; }

    bool is_constant() const { return kind_ == term_kind::constant; }
    bool is_variable() const { return kind_ == term_kind::variable; }
    bool is_null() const { return kind_ == term_kind::null_value; }
    bool is_ground() const { return kind_ != term_kind::variable; }

    // Constants sort by symbol; ⊥ sorts after every constant.
    auto operator<=>(const term&) const = default;
    bool operator==(const term&) const = default;

    std::string to_string() const {
        switch (kind_) {
        case term_kind::null_value: return "⊥";
        default: return text_;
        }
    }

private:
    term(term_kind k, std::string t) : kind_(k), text_(std::move(t)) {}

    term_kind kind_;
    std::string text_;
};

// Finite mapping from variable names to ground terms (constants or ⊥).
using substitution = std::map<std::string, term>;

inline term apply(const substitution& theta, const term& t) {
    if (t.is_variable()) {
        auto it = theta.find(t.text());
        if (it != theta.end()) return it->second;
    }
    return t;
}

} // namespace nulldl
