#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nulldl/ast.hpp"

namespace nulldl {

struct safety_report {
    bool ok = true;
    std::vector<std::string> unsafe_variables; // sorted

    explicit operator bool() const { return ok; }
};

// A variable occurs positively iff it appears in a positive predicate literal
// or a let of the body. Variables living only inside nested-query atoms are
// exempt: nested queries are built-ins with their own scope.
safety_report check_safety(const rule& r);

struct dependency_arc {
    std::string from, to;
    bool negative = false;
    auto operator<=>(const dependency_arc&) const = default;
};

struct dependency_graph_t {
    std::set<std::string> nodes;
    std::set<dependency_arc> arcs;

    bool has_arc(const std::string& from, const std::string& to) const {
        return arcs.contains({from, to, false}) || arcs.contains({from, to, true});
    }
};

// Arc p1 -> p2 for every rule with p1 in the body and head predicate p2.
// Nested-query atoms contribute no arcs.
dependency_graph_t dependency_graph(const program& p);

// Stratum index per predicate: extensional predicates at 0, every arc strictly
// increases the level. Throws recursive_program_error on cycles.
std::map<std::string, std::size_t> predicate_levels(const program& p);

// Rule indices grouped by head level, ascending. Evaluation follows this
// order so negative literals never see a half-computed predicate.
std::vector<std::vector<std::size_t>> stratify(const program& p);

// Free variables per rule index: X is free in R when it does not occur
// positively in R and occurs in a filter of R or in a nested query of R where
// X is recursively free.
std::map<std::size_t, std::set<std::string>> free_variables(const query& q);

// Union of the per-rule free sets.
std::set<std::string> all_free_variables(const query& q);

// Validates the shared-arity invariant and the all-variable head invariant.
// Throws nulldl::error with a description on violation.
void validate_query(const query& q);

} // namespace nulldl
