#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nulldl/algebra.hpp"
#include "nulldl/ast.hpp"
#include "nulldl/nesting.hpp"

namespace nulldl {

enum class free_var_policy {
    correlate,   // syntactic substitution of free inner variables
    decorrelate  // fresh-rename free inner variables and pin them to ⊥
};

enum class point_preset {
    top,             // one ◇ wrapper at the goal
    mid,             // one move-down step below the goal rules
    leaves,          // at the extensional instantiation points, including
                     // broken-chain (improper style) attachments
    leaves_pure,     // leaves without broken-chain attachments
    leaves_plus_top, // leaves plus lets appended into the goal rules
    explicit_points
};

// The three discrepancy knobs selecting one FILTER EXISTS semantics.
struct semantics_profile {
    std::string name;
    free_var_policy free_vars = free_var_policy::correlate;
    bool improper_substitution = false;
    point_preset points = point_preset::top;
    std::vector<substitution_point> explicit_pts;
};

// Named presets: fuseki, blazegraph, virtuoso, rdf4j, spec-top-down,
// spec-bottom-up, plus the bare placements top, mid, leaves, leaves-plus-top.
semantics_profile profile_preset(const std::string& name);
std::vector<std::string> profile_preset_names();

struct exists_translation {
    query q;                              // Def-6 rule around the outer translation
    std::vector<std::string> outer_attrs; // schema of the outer pattern
    query inner;                          // translated inner query (modal)
    std::vector<std::string> correlated_goal_vars;
    std::vector<std::string> correlated_free_vars;
    std::vector<std::string> correlated_other_vars; // improper candidates
};

// Emits □(p(Tr) <- r(Tr), (L,P)) (negated variant with ¬(L,P)) and records
// which outer attributes correlate with which inner variables.
exists_translation translate_exists(const algebra_expr& outer, const algebra_expr& inner,
                                    bool negated, const semantics_profile& profile,
                                    const translation_options& topts = {});

// θ(Q) for one outer tuple: free-variable policy first, then the profile's
// logical substitution of goal variables at its points, then improper
// anchoring of name-correlated leftovers when enabled.
query apply_profile_substitution(const substitution& theta, const query& inner,
                                 const std::vector<std::string>& outer_attrs,
                                 const semantics_profile& profile, std::ostream* trace = nullptr);

// Per-tuple FILTER (NOT) EXISTS evaluation: builds θ from each outer tuple
// (⊥ for unbound), substitutes, evaluates the modal inner query, and keeps
// the tuple iff it has answers (or none, when negated).
relation eval_exists_filter(const relation& outer, const algebra_expr& inner, bool negated,
                            const semantics_profile& profile, const database& db,
                            const translation_options& topts = {}, std::ostream* trace = nullptr);

struct profile_disagreement {
    std::vector<term> tuple;
    std::map<std::string, bool> kept_by;            // profile name -> kept
    std::map<std::string, std::set<std::string>> flip_knobs; // profile -> knobs that flip it
};

struct profile_comparison {
    std::vector<std::string> attrs;
    std::vector<std::string> profile_names;
    std::map<std::string, relation> results;
    std::vector<std::vector<term>> all_tuples;      // union of outer tuples considered
    std::vector<profile_disagreement> disagreements;
    bool all_agree = true;
};

// Evaluates the expression under every profile and attributes each per-tuple
// disagreement to the knobs that individually flip the outcome.
profile_comparison compare_profiles(const algebra_expr& e, const database& db,
                                    const std::vector<semantics_profile>& profiles,
                                    const translation_options& topts = {});

// Shared with the generic modal evaluator: nested atoms in hand-written modal
// programs are substituted with the same placement machinery.
nested_handler make_modal_nested_handler(semantics_profile profile);

} // namespace nulldl
