#pragma once

#include <iosfwd>
#include <set>
#include <utility>

#include "nulldl/ast.hpp"
#include "nulldl/eval.hpp"
#include "nulldl/fact_store.hpp"

namespace nulldl {

// Ground equality under a mode. Box: both sides the same constant. Diamond:
// same constant or at least one ⊥ (some completion makes them equal).
bool modal_term_eq(mode m, const term& lhs, const term& rhs);

// Ground inequality under a mode. Box: distinct constants. Diamond: distinct
// constants or at least one ⊥.
bool modal_term_neq(mode m, const term& lhs, const term& rhs);

// F1 ≤ F2: every instance of F2 is an instance of F1 (⊥ is least
// informative). Requires same predicate and arity.
bool less_informative(const fact& f1, const fact& f2);
bool term_less_informative(const term& t1, const term& t2);

struct modal_eval_options {
    nested_handler on_nested; // required when nested atoms occur
    std::ostream* trace = nullptr;
};

// Satisfaction of one literal under a full substitution, per the mode's
// bullet: positive predicate (box: exact membership; diamond: some fact
// F ≤ θ(L)); negative predicate (box: no ◇-compatible fact; diamond: no
// □-compatible fact); let: θ(X) is t in both modes; filter via modal term
// equality; nested query via the handler (mode-independent).
bool modal_holds(const fact_store& store, const substitution& theta, mode m, const literal& lit,
                 const database& db, const modal_eval_options& opts = {});

// All facts inferable from one modal rule against the store: substitutions
// are enumerated by matching positive predicate literals (box exactly,
// diamond by least-informative witness binding with most-informative merge
// across literals), then built-ins are tested under the rule's mode.
std::set<fact> modal_infer_rule(const fact_store& store, const rule& r, const database& db,
                                const modal_eval_options& opts = {});

fact_store modal_fixpoint(const program& p, const database& db, const modal_eval_options& opts = {});

std::set<fact> modal_answer(const query& q, const database& db, const modal_eval_options& opts = {});

// Modal logical substitution of one head variable: replaces ◦(H <- B) by
// ◇(H <- u(H-args), let(X=θ(X))) and ◦(u(H-args) <- B) with u fresh. The ◇
// wrapper merges the values from both sources, the most informative winning.
std::pair<rule, rule> substitute_logical_modal(const substitution& theta, const rule& r,
                                               const std::string& variable, fresh_name_gen& gen);

} // namespace nulldl
