#pragma once

#include <string>
#include <string_view>

#include "nulldl/algebra.hpp"
#include "nulldl/ast.hpp"

namespace nulldl {

// Facts: one `pred(term, ...).` per line, `#` comments. Terms are bare
// identifiers or numbers (constants), quoted strings, or `null` (⊥).
// Duplicates are deduplicated. Variables are rejected (facts are ground).
database parse_facts(std::string_view text);

// Rules: optional `box:` / `diamond:` prefix, `head(X, Y) <- lit, lit.` with
// literals `pred(args)`, `!pred(args)`, `filter(X = Y)`, `filter(X != Y)`,
// `let(X = term)`, `exists { goal <- ...; ... }`, `!exists { ... }`.
// Variables start uppercase; user names may not start with `_`. Ground atoms
// written as `pred(a).` become program facts. Mixing modal and plain rules in
// one program raises mixed_modes_error.
program parse_program(std::string_view text);

// A query: the program plus a goal. `goal_text` is either a predicate name or
// an atom like `p(X, Y)`; a bare name gets fresh variables at the arity the
// program uses.
query parse_query(std::string_view program_text, std::string_view goal_text);

// Algebra: prefix s-expressions. Base relations are patterns `(persons X)`
// with attribute or constant arguments; an optional leading form
// `(schema (persons X) (corpMail X Y) ...)` declares schemas so later bases
// can be bare names. Operators: select-box, project, rename, union, join,
// minus, left-outer-join, exists, not-exists.
algebra_expr parse_algebra(std::string_view text);

} // namespace nulldl
