#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "nulldl/ast.hpp"
#include "nulldl/eval.hpp"

namespace nulldl {

// An edge of the query's dependency tree: a body-literal occurrence inside a
// rule, where a substitution wrapper can be attached.
struct substitution_point {
    std::size_t rule_index = 0;
    std::size_t literal_index = 0;
    auto operator<=>(const substitution_point&) const = default;
};

enum class strategy_kind {
    syntactic_only,     // free variables only; goal variables untouched
    logical_top_down,   // one wrapper rule at the goal
    logical_bottom_up,  // top-down followed by move_down to fixpoint
    logical_at_points,  // wrappers at an explicit point set
    improper            // anchored rule split with a chain gap
};

struct substitution_strategy {
    strategy_kind kind = strategy_kind::logical_top_down;
    std::vector<substitution_point> points; // logical_at_points
    std::size_t anchor_rule = 0;            // improper
    std::string anchor_variable;            // improper

    static substitution_strategy top_down() { return {}; }
    static substitution_strategy bottom_up() { return {strategy_kind::logical_bottom_up, {}, 0, {}}; }
    static substitution_strategy syntactic() { return {strategy_kind::syntactic_only, {}, 0, {}}; }
    static substitution_strategy at_points(std::vector<substitution_point> pts) {
        return {strategy_kind::logical_at_points, std::move(pts), 0, {}};
    }
};

// Adds let(X = θ(X)) to the body of every rule of P where X is free, for each
// X in the domain of θ. Rules where no mapped variable is free are unchanged.
program substitute_syntactic(const substitution& theta, const program& p);

// Replaces the goal p(X1..Xn) by a fresh q(X1..Xn) and adds the rule
// q(X1..Xn) <- p(X1..Xn), let(X=θ(X)) ... for each substituted goal variable.
// Variables of θ absent from the goal are ignored.
query substitute_logical_topdown(const substitution& theta, const query& q);

// Appendix-style relocation of one let literal one level down the dependency
// tree, copying and renaming the defining subtrees of every positive
// intensional body literal containing the let variable. Throws
// let_not_found_error / nothing_below_error; rules left unreachable from the
// program's roots are pruned.
program move_down(const program& p, std::size_t rule_index, std::size_t literal_index);

// True when move_down would succeed at the given let.
bool can_move_down(const program& p, std::size_t rule_index, std::size_t literal_index);

// Top-down substitution followed by exhaustive move_down until every let sits
// in a rule where its variable touches only extensional predicates.
query substitute_logical_bottomup(const substitution& theta, const query& q);

// Splits the anchor rule in two so the logical chain starts at the split
// rather than at the goal: head <- u(V...), and u(V...) <- body, let(X=θ(X)).
query substitute_improper(const substitution& theta, const query& q,
                          std::size_t anchor_rule, const std::string& variable);

// θ(Q): syntactic substitution of free variables first, then the strategy's
// treatment of goal variables. Only variables of θ participate.
query build_theta_query(const substitution& theta, const query& q,
                        const substitution_strategy& strategy);

// Evaluates a nested-query atom: builds θ(Q), isolates its intensional
// predicates by fresh renaming, and tests for at least one answer over the
// same extensional database.
bool eval_nested_atom(const database& db, const substitution& theta, const query& nested,
                      const substitution_strategy& strategy);

// Isolation device: renames every intensional predicate to a fresh name.
query isolate_intensional(const query& q, fresh_name_gen& gen);

nested_handler make_nested_handler(substitution_strategy strategy);

} // namespace nulldl
