#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nulldl/ast.hpp"
#include "nulldl/nesting.hpp"

namespace nulldl {

// Positional chain tracking: a goal variable is logically connected to the
// argument positions it reaches by following head-to-body occurrences through
// positive predicate literals. Negation and projection break the chain.

struct occurrence_key {
    std::size_t rule_index = 0;
    std::size_t literal_index = 0;
    auto operator<=>(const occurrence_key&) const = default;
};

struct chain_map {
    // occurrence -> position -> goal variable name reaching it
    std::map<occurrence_key, std::map<std::size_t, std::string>> positions;
    // occurrence predicates that have defining rules (descent continues)
    std::set<occurrence_key> intensional;
};

chain_map goal_chains(const query& q, const std::set<std::string>& goal_vars);

// Inserts a wrapper rule between each selected occurrence and its predicate:
// the occurrence is renamed to a fresh predicate W and the rule
// W(F1..Fk) <- q(F1..Fk), let(F_j = value)... is added. Modal wrappers carry
// mode ◇ (the compatibility merge); plain wrappers carry none.
query wrap_occurrences(const query& q,
                       const std::map<occurrence_key, std::map<std::size_t, term>>& lets,
                       bool modal, fresh_name_gen& gen);

// Replaces the goal by a fresh predicate fed by a let-carrying wrapper rule.
query wrap_goal(const query& q, const substitution& goal_lets, bool modal, fresh_name_gen& gen);

struct placement_request {
    // goal variable -> pinned value
    substitution goal_lets;
    bool modal = false;
    enum class level { top, mid, leaves_pure, leaves, leaves_plus_top, at_points } lvl = level::top;
    std::vector<substitution_point> points; // at_points
};

// Applies one placement to the query. leaves adds broken-chain attachments
// (extensional occurrences of same-named variables); leaves_plus_top also
// appends the lets into the goal-defining rules themselves. Variables whose
// chain cannot reach any requested position keep a top wrapper.
query place_goal_lets(const query& q, const placement_request& req, fresh_name_gen& gen,
                      std::ostream* trace = nullptr);

} // namespace nulldl
