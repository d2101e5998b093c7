#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "nulldl/algebra.hpp"
#include "nulldl/ast.hpp"

namespace nulldl {

// Possible-worlds reading of a ⊥-bearing database: every ⊥ occurrence is
// replaced independently by a constant of the finite domain.
struct world_space {
    database base;
    std::set<std::string> domain; // active domain plus k >= 1 fresh constants

    static constexpr std::size_t max_null_occurrences = 8;
};

// Active domain of the database plus `fresh` reserved constants (_w0, ...).
world_space make_world_space(const database& db, std::size_t fresh = 1);

// One world per function from ⊥ occurrences to domain constants. Throws
// too_many_nulls_error above the occurrence cap.
std::vector<database> enumerate_worlds(const world_space& space);

std::size_t count_null_occurrences(const database& db);

// Completes the ⊥s of a single tuple in all possible ways over the domain.
std::vector<std::vector<term>> complete_tuple(const std::vector<term>& tuple,
                                              const std::set<std::string>& domain);

// Generic core: does `holds` come out true in all / some worlds.
bool oracle_sure(const world_space& space, const std::function<bool(const database&)>& holds);
bool oracle_maybe(const world_space& space, const std::function<bool(const database&)>& holds);

// filter(t1 = t2) with ⊥s completed per occurrence over the given domain.
bool oracle_sure_eq(const term& lhs, const term& rhs, const std::set<std::string>& domain);
bool oracle_maybe_eq(const term& lhs, const term& rhs, const std::set<std::string>& domain);

// Ground-literal oracle over the space's base: membership of the completed
// literal in the completed store (negated for negative literals).
bool oracle_sure_literal(const fact& f, bool positive, const world_space& space);
bool oracle_maybe_literal(const fact& f, bool positive, const world_space& space);

enum class checked_operator { join_diamond, minus_box, select_box };

struct operator_check_report {
    std::size_t decisions = 0;
    std::size_t disagreements = 0;
    std::vector<std::string> details; // one line per disagreement
    bool ok() const { return disagreements == 0; }
};

// Verifies per-tuple operator decisions against completion quantification:
// ⋈◇ pair compatibility = some completion agrees on the shared attributes,
// −□ removal = some s-tuple compatible in that sense, σ□ keep = the
// condition holds in every completion of the tuple.
operator_check_report check_operator_against_oracle(checked_operator op, const relation& left,
                                                    const relation& right,
                                                    const std::set<std::string>& domain);
operator_check_report check_select_against_oracle(const relation& input, const term& lhs, bool equal,
                                                  const term& rhs, const std::set<std::string>& domain);

} // namespace nulldl
