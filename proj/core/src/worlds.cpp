#include "nulldl/worlds.hpp"

#include <algorithm>

#include "nulldl/errors.hpp"
#include "nulldl/modal.hpp"

namespace nulldl {

std::size_t count_null_occurrences(const database& db) {
    std::size_t n = 0;
    for (const auto& f : db)
        for (const auto& t : f.args)
            if (t.is_null()) ++n;
    return n;
}

world_space make_world_space(const database& db, std::size_t fresh) {
    world_space space;
    space.base = db;
    for (const auto& f : db)
        for (const auto& t : f.args)
            if (t.is_constant()) space.domain.insert(t.text());
    for (std::size_t i = 0; i < fresh; ++i) space.domain.insert("_w" + std::to_string(i));
    return space;
}

std::vector<database> enumerate_worlds(const world_space& space) {
    std::size_t nulls = count_null_occurrences(space.base);
    if (nulls > world_space::max_null_occurrences)
        throw too_many_nulls_error(nulls, world_space::max_null_occurrences);
    if (space.domain.empty() && nulls > 0)
        throw error("empty domain cannot complete null occurrences");

    std::vector<std::string> domain(space.domain.begin(), space.domain.end());
    std::vector<database> worlds;

    std::vector<std::size_t> choice(nulls, 0);
    while (true) {
        database world;
        std::size_t occ = 0;
        for (const auto& f : space.base) {
            fact completed = f;
            for (auto& t : completed.args)
                if (t.is_null()) t = term::constant(domain[choice[occ++]]);
            world.insert(std::move(completed));
        }
        worlds.push_back(std::move(world));

        // next assignment; each ⊥ occurrence varies independently
        std::size_t i = 0;
        for (; i < nulls; ++i) {
            if (++choice[i] < domain.size()) break;
            choice[i] = 0;
        }
        if (i == nulls) break;
        if (nulls == 0) break;
    }
    return worlds;
}

std::vector<std::vector<term>> complete_tuple(const std::vector<term>& tuple,
                                              const std::set<std::string>& domain) {
    std::vector<std::vector<term>> out{{}};
    for (const auto& t : tuple) {
        std::vector<std::vector<term>> next;
        for (const auto& prefix : out) {
            if (t.is_null()) {
                for (const auto& c : domain) {
                    auto row = prefix;
                    row.push_back(term::constant(c));
                    next.push_back(std::move(row));
                }
            } else {
                auto row = prefix;
                row.push_back(t);
                next.push_back(std::move(row));
            }
        }
        out = std::move(next);
    }
    return out;
}

bool oracle_sure(const world_space& space, const std::function<bool(const database&)>& holds) {
    for (const auto& world : enumerate_worlds(space))
        if (!holds(world)) return false;
    return true;
}

bool oracle_maybe(const world_space& space, const std::function<bool(const database&)>& holds) {
    for (const auto& world : enumerate_worlds(space))
        if (holds(world)) return true;
    return false;
}

namespace {

bool eq_over_completions(const term& lhs, const term& rhs, const std::set<std::string>& domain,
                         bool all) {
    auto rows = complete_tuple({lhs, rhs}, domain);
    for (const auto& row : rows) {
        bool eq = row[0] == row[1];
        if (all && !eq) return false;
        if (!all && eq) return true;
    }
    return all;
}

} // namespace

bool oracle_sure_eq(const term& lhs, const term& rhs, const std::set<std::string>& domain) {
    return eq_over_completions(lhs, rhs, domain, true);
}

bool oracle_maybe_eq(const term& lhs, const term& rhs, const std::set<std::string>& domain) {
    return eq_over_completions(lhs, rhs, domain, false);
}

namespace {

bool literal_over_worlds(const fact& f, bool positive, const world_space& space, bool all) {
    // Both the store's nulls and the literal's nulls complete independently.
    for (const auto& world : enumerate_worlds(space)) {
        for (const auto& lit : complete_tuple(f.args, space.domain)) {
            bool member = world.contains(fact{f.name, lit});
            bool value = positive ? member : !member;
            if (all && !value) return false;
            if (!all && value) return true;
        }
    }
    return all;
}

} // namespace

bool oracle_sure_literal(const fact& f, bool positive, const world_space& space) {
    return literal_over_worlds(f, positive, space, true);
}

bool oracle_maybe_literal(const fact& f, bool positive, const world_space& space) {
    return literal_over_worlds(f, positive, space, false);
}

namespace {

std::vector<std::string> shared(const relation& l, const relation& r) {
    std::vector<std::string> out;
    for (const auto& a : l.attrs)
        if (std::find(r.attrs.begin(), r.attrs.end(), a) != r.attrs.end()) out.push_back(a);
    return out;
}

std::vector<term> project_shared(const relation& rel, const std::vector<term>& tuple,
                                 const std::vector<std::string>& attrs) {
    std::vector<term> out;
    for (const auto& a : attrs) {
        auto it = std::find(rel.attrs.begin(), rel.attrs.end(), a);
        out.push_back(tuple[static_cast<std::size_t>(it - rel.attrs.begin())]);
    }
    return out;
}

// Some completion of the two projections coincides.
bool oracle_pair_compatible(const std::vector<term>& lt, const std::vector<term>& rt,
                            const std::set<std::string>& domain) {
    for (const auto& lc : complete_tuple(lt, domain))
        for (const auto& rc : complete_tuple(rt, domain))
            if (lc == rc) return true;
    return lt.empty();
}

bool engine_pair_compatible(const std::vector<term>& lt, const std::vector<term>& rt) {
    for (std::size_t i = 0; i < lt.size(); ++i)
        if (!modal_term_eq(mode::diamond, lt[i], rt[i])) return false;
    return true;
}

} // namespace

operator_check_report check_operator_against_oracle(checked_operator op, const relation& left,
                                                    const relation& right,
                                                    const std::set<std::string>& domain) {
    operator_check_report report;
    if (op == checked_operator::select_box)
        throw error("use check_select_against_oracle for σ□");

    auto shared_a = shared(left, right);
    for (const auto& lt : left.tuples) {
        auto lp = project_shared(left, lt, shared_a);
        if (op == checked_operator::join_diamond) {
            for (const auto& rt : right.tuples) {
                auto rp = project_shared(right, rt, shared_a);
                bool engine = engine_pair_compatible(lp, rp);
                bool oracle = oracle_pair_compatible(lp, rp, domain);
                ++report.decisions;
                if (engine != oracle) {
                    ++report.disagreements;
                    report.details.push_back("join compatibility mismatch");
                }
            }
        } else { // minus_box: removal decision per left tuple
            bool engine_blocked = false;
            bool oracle_blocked = false;
            for (const auto& rt : right.tuples) {
                auto rp = project_shared(right, rt, shared_a);
                engine_blocked = engine_blocked || engine_pair_compatible(lp, rp);
                oracle_blocked = oracle_blocked || oracle_pair_compatible(lp, rp, domain);
            }
            ++report.decisions;
            if (engine_blocked != oracle_blocked) {
                ++report.disagreements;
                report.details.push_back("minus removal mismatch");
            }
        }
    }
    return report;
}

operator_check_report check_select_against_oracle(const relation& input, const term& lhs, bool equal,
                                                  const term& rhs, const std::set<std::string>& domain) {
    operator_check_report report;
    auto value_of = [&](const std::vector<term>& tuple, const term& t) {
        if (!t.is_variable()) return t;
        auto it = std::find(input.attrs.begin(), input.attrs.end(), t.text());
        return tuple[static_cast<std::size_t>(it - input.attrs.begin())];
    };
    for (const auto& tuple : input.tuples) {
        term l = value_of(tuple, lhs);
        term r = value_of(tuple, rhs);
        bool engine = equal ? modal_term_eq(mode::box, l, r) : modal_term_neq(mode::box, l, r);
        bool oracle = true;
        for (const auto& row : complete_tuple({l, r}, domain)) {
            bool eq = row[0] == row[1];
            if ((equal && !eq) || (!equal && eq)) {
                oracle = false;
                break;
            }
        }
        ++report.decisions;
        if (engine != oracle) {
            ++report.disagreements;
            report.details.push_back("select decision mismatch");
        }
    }
    return report;
}

} // namespace nulldl
