#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nulldl/term.hpp"

namespace nulldl {

struct query;

// p(t1,...,tn). A ground predicate atom doubles as a fact.
struct predicate_atom {
    std::string name;
    std::vector<term> args;

    bool is_ground() const {
        for (const auto& t : args)
            if (!t.is_ground()) return false;
        return true;
    }

    auto operator<=>(const predicate_atom&) const = default;
    bool operator==(const predicate_atom&) const = default;
};

// filter(t1 = t2). Inequality is represented as the negated literal.
struct filter_atom {
    term lhs, rhs;
    auto operator<=>(const filter_atom&) const = default;
    bool operator==(const filter_atom&) const = default;
};

// let(X = t): sugar for a fresh predicate l(X) plus the fact l(t).
struct let_atom {
    std::string var;
    term value; // ground: constant or ⊥
    auto operator<=>(const let_atom&) const = default;
    bool operator==(const let_atom&) const = default;
};

// A nested query used as a built-in body atom.
struct nested_atom {
    std::shared_ptr<const query> q;
    bool operator==(const nested_atom& other) const; // deep structural compare
};

using atom = std::variant<predicate_atom, filter_atom, let_atom, nested_atom>;

struct literal {
    atom a;
    bool positive = true;
    bool operator==(const literal&) const = default;
};

enum class mode { box, diamond };

struct rule {
    std::optional<mode> m; // absent in plain programs
    predicate_atom head;
    std::vector<literal> body;
    bool operator==(const rule&) const = default;
};

using fact = predicate_atom;
using database = std::set<fact>; // the extensional database E

struct program {
    std::vector<rule> rules;
    std::set<fact> facts;
    bool operator==(const program&) const = default;
};

// A query is a goal predicate formula paired with a program.
struct query {
    predicate_atom goal;
    program prog;
    bool operator==(const query&) const = default;
};

inline bool nested_atom::operator==(const nested_atom& other) const {
    if (q == other.q) return true;
    if (!q || !other.q) return false;
    return *q == *other.q;
}

inline bool is_predicate(const atom& a) { return std::holds_alternative<predicate_atom>(a); }
inline bool is_filter(const atom& a) { return std::holds_alternative<filter_atom>(a); }
inline bool is_let(const atom& a) { return std::holds_alternative<let_atom>(a); }
inline bool is_nested(const atom& a) { return std::holds_alternative<nested_atom>(a); }

// Monotone counter for fresh predicate/variable names. User names may not
// start with '_', so generated names can never collide with them.
class fresh_name_gen {
public:
    explicit fresh_name_gen(std::string prefix = "_g") : prefix_(std::move(prefix)) {}
    std::string next() { return prefix_ + std::to_string(counter_++); }

private:
    std::string prefix_;
    std::size_t counter_ = 0;
};

// --- textual substitution -------------------------------------------------

// Plain textual replacement of mapped variables. For queries this is NOT the
// semantic θ(Q) of nested substitution; it recurses into nested programs and
// is used internally by the nesting machinery only.
predicate_atom apply_substitution(const substitution& theta, const predicate_atom& a);
atom apply_substitution(const substitution& theta, const atom& a);
literal apply_substitution(const substitution& theta, const literal& l);
rule apply_substitution(const substitution& theta, const rule& r);
query apply_substitution(const substitution& theta, const query& q);

// Renames variables everywhere (including nested queries); internal utility.
term rename_variables(const std::map<std::string, std::string>& renaming, const term& t);
rule rename_variables(const std::map<std::string, std::string>& renaming, const rule& r);
query rename_variables(const std::map<std::string, std::string>& renaming, const query& q);

// --- let desugaring -------------------------------------------------------

// Replaces the first let literal of `r` by a fresh positive predicate literal
// and adds the corresponding fact to a copy of `prog`. Rules without lets are
// returned unchanged.
std::pair<rule, program> desugar_let(const rule& r, const program& prog, fresh_name_gen& gen);

// Desugars every let in every rule. Evaluators call this lazily on their own
// working copy so substitution machinery can still see and relocate lets.
program desugar_all_lets(const program& prog, fresh_name_gen& gen);

// --- misc helpers ----------------------------------------------------------

// Variables of the rule itself; nested-query internals are excluded.
std::set<std::string> rule_variables(const rule& r);

// Variables occurring positively: in a positive predicate literal or as the
// bound side of a let (predicate sugar).
std::set<std::string> positive_variables(const rule& r);

std::set<std::string> atom_variables(const atom& a); // non-recursive for nested
std::set<std::string> goal_variables(const query& q);

program erase_modes(const program& p);
program attach_mode(const program& p, mode m);
bool is_modal(const program& p);     // all rules carry a mode
bool is_plain(const program& p);     // no rule carries a mode
void check_mode_consistency(const program& p); // throws mixed_modes_error

// Set of predicate names defined by rule heads.
std::set<std::string> intensional_predicates(const program& p);

} // namespace nulldl
