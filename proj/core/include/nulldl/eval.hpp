#pragma once

#include <functional>
#include <iosfwd>
#include <set>

#include "nulldl/analysis.hpp"
#include "nulldl/ast.hpp"
#include "nulldl/fact_store.hpp"

namespace nulldl {

// Decides a nested-query atom given the outer bindings. `positive` is false
// for negated nested atoms (satisfied when the substituted query is empty).
using nested_handler =
    std::function<bool(const database& db, const substitution& theta, const query& nested, bool positive)>;

struct eval_options {
    nested_handler on_nested; // defaults to top-down logical substitution
    std::ostream* trace = nullptr;
};

// Literal-level satisfaction against a sealed store. Positive predicate:
// θ(L) ∈ store. Filter: both sides identical constants after substitution.
// Negative literal: complement. Filters and negative literals require every
// variable bound (built-in discipline), else unbound_builtin_error.
bool eval_literal(const fact_store& store, const substitution& theta, const literal& lit);

// Stratum-by-stratum saturation of a safe non-recursive program over E.
fact_store fixpoint(const program& p, const database& db, const eval_options& opts = {});

// Restriction of the fixpoint to the goal predicate.
std::set<fact> answer(const query& q, const database& db, const eval_options& opts = {});

} // namespace nulldl
