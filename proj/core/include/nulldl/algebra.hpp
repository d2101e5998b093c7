#pragma once

#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "nulldl/ast.hpp"

namespace nulldl {

// A named-attribute table over constants and ⊥. Every tuple is total on the
// schema; unbound is represented by ⊥. Set semantics.
struct relation {
    std::vector<std::string> attrs;
    std::set<std::vector<term>> tuples;
    bool operator==(const relation&) const = default;
};

struct algebra_expr;
using expr_ptr = std::shared_ptr<const algebra_expr>;

// Base relation pattern: arguments are attribute names (variables) or ground
// constants. Constants filter by exact match, as a triple pattern would.
struct base_node {
    std::string relation_name;
    std::vector<term> args;
};

struct select_node { // σ□(lhs op rhs)
    term lhs;
    bool equal = true; // false: ≠
    term rhs;
    expr_ptr child;
};

struct project_node {
    std::vector<std::string> attrs;
    expr_ptr child;
};

struct rename_node { // ρ from/to
    std::string from, to;
    expr_ptr child;
};

struct union_node { expr_ptr left, right; };       // pads missing attrs with ⊥
struct join_node { expr_ptr left, right; };        // ⋈◇
struct minus_node { expr_ptr left, right; };       // −□
struct left_outer_join_node { expr_ptr left, right; }; // (r ⋈◇ s) ∪ (r −□ s)

struct exists_node { // σ_Q(outer) / σ_¬Q(outer)
    expr_ptr inner;
    bool negated = false;
    expr_ptr outer;
};

using algebra_node = std::variant<base_node, select_node, project_node, rename_node, union_node,
                                  join_node, minus_node, left_outer_join_node, exists_node>;

struct algebra_expr {
    algebra_node node;
};

expr_ptr make_expr(algebra_node n);

// Output schema of an expression. Condition attributes that do not resolve in
// the child schema are allowed only inside an exists inner (they become free,
// possibly correlated variables); elsewhere they raise schema_mismatch_error.
std::vector<std::string> schema_of(const algebra_expr& e);

// Structural checks (duplicate attributes, rename targets, free references).
// Relation arities are checked against the database at evaluation time. With
// allow_free_references set, unresolved condition attributes are accepted at
// any depth (used for exists inners, where they correlate with the outer).
void check_schema(const algebra_expr& e, bool allow_free_references = false);

struct semantics_profile; // profiles.hpp

// Paper-verbatim rename rule (filter + let(Y=⊥)) instead of the corrected
// head renaming; selectable from the CLI for comparison.
struct translation_options {
    bool paper_rename = false;
};

// Direct evaluation of the extended algebra over named relations drawn from
// the fact database. Exists nodes delegate per-tuple to the profile.
relation eval_algebra(const algebra_expr& e, const database& db, const semantics_profile& profile,
                      const translation_options& topts = {});

// Bottom-up emission of the modal rules for each operator, fresh head
// predicate per node. The expression must not contain exists nodes; those go
// through translate_exists, which needs the profile machinery.
query translate_algebra(const algebra_expr& e, const translation_options& opts = {});

struct equivalence_report {
    bool equivalent = true;
    std::set<std::vector<term>> direct_only;
    std::set<std::vector<term>> translated_only;
};

// Lemma-style check: evaluates the expression directly and through the modal
// translation and compares tuple sets componentwise.
equivalence_report check_translation_equivalence(const algebra_expr& e, const database& db,
                                                 const translation_options& opts = {});

} // namespace nulldl
