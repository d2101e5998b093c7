#include "nulldl/analysis.hpp"

#include <algorithm>
#include <map>

#include "nulldl/errors.hpp"

namespace nulldl {

safety_report check_safety(const rule& r) {
    auto positive = positive_variables(r);
    safety_report report;
    for (const auto& v : rule_variables(r)) {
        if (!positive.contains(v)) report.unsafe_variables.push_back(v);
    }
    report.ok = report.unsafe_variables.empty();
    return report;
}

dependency_graph_t dependency_graph(const program& p) {
    dependency_graph_t g;
    for (const auto& f : p.facts) g.nodes.insert(f.name);
    for (const auto& r : p.rules) {
        g.nodes.insert(r.head.name);
        for (const auto& l : r.body) {
            if (const auto* pa = std::get_if<predicate_atom>(&l.a)) {
                g.nodes.insert(pa->name);
                g.arcs.insert({pa->name, r.head.name, !l.positive});
            }
            // filters, lets and nested queries contribute no arcs
        }
    }
    return g;
}

std::map<std::string, std::size_t> predicate_levels(const program& p) {
    auto g = dependency_graph(p);
    std::map<std::string, std::size_t> level;
    for (const auto& n : g.nodes) level[n] = 0;

    // Longest-path levels; |nodes| rounds without stabilizing means a cycle.
    bool changed = true;
    std::size_t rounds = 0;
    while (changed) {
        changed = false;
        if (++rounds > g.nodes.size() + 1) {
            for (const auto& arc : g.arcs)
                if (arc.from == arc.to) throw recursive_program_error(arc.from);
            throw recursive_program_error(g.arcs.empty() ? "?" : g.arcs.begin()->from);
        }
        for (const auto& arc : g.arcs) {
            if (arc.from == arc.to) throw recursive_program_error(arc.from);
            if (level[arc.to] < level[arc.from] + 1) {
                level[arc.to] = level[arc.from] + 1;
                changed = true;
            }
        }
    }
    return level;
}

std::vector<std::vector<std::size_t>> stratify(const program& p) {
    auto level = predicate_levels(p);
    std::size_t max_level = 0;
    for (const auto& [_, l] : level) max_level = std::max(max_level, l);

    std::vector<std::vector<std::size_t>> strata(max_level + 1);
    for (std::size_t i = 0; i < p.rules.size(); ++i)
        strata[level[p.rules[i].head.name]].push_back(i);

    // Drop empty strata (extensional-only levels) but keep ascending order.
    std::vector<std::vector<std::size_t>> out;
    for (auto& s : strata)
        if (!s.empty()) out.push_back(std::move(s));
    return out;
}

namespace {

bool occurs_in_free_position(const rule& r, const std::string& v);

// X is free in some rule of q (recursive case of the definition).
bool free_somewhere(const query& q, const std::string& v) {
    for (const auto& r : q.prog.rules)
        if (occurs_in_free_position(r, v) && !positive_variables(r).contains(v)) return true;
    return false;
}

bool occurs_in_free_position(const rule& r, const std::string& v) {
    for (const auto& l : r.body) {
        if (const auto* f = std::get_if<filter_atom>(&l.a)) {
            if ((f->lhs.is_variable() && f->lhs.text() == v) ||
                (f->rhs.is_variable() && f->rhs.text() == v))
                return true;
        } else if (const auto* n = std::get_if<nested_atom>(&l.a)) {
            if (free_somewhere(*n->q, v)) return true;
        }
    }
    return false;
}

} // namespace

std::map<std::size_t, std::set<std::string>> free_variables(const query& q) {
    std::map<std::size_t, std::set<std::string>> out;
    for (std::size_t i = 0; i < q.prog.rules.size(); ++i) {
        const rule& r = q.prog.rules[i];
        auto positive = positive_variables(r);
        std::set<std::string> free;

        std::set<std::string> candidates = rule_variables(r);
        // variables appearing only inside nested queries of this rule also
        // qualify through the recursive clause
        for (const auto& l : r.body) {
            if (const auto* n = std::get_if<nested_atom>(&l.a)) {
                for (const auto& fr : all_free_variables(*n->q)) candidates.insert(fr);
            }
        }
        for (const auto& v : candidates) {
            if (positive.contains(v)) continue;
            if (occurs_in_free_position(r, v)) free.insert(v);
        }
        out[i] = std::move(free);
    }
    return out;
}

std::set<std::string> all_free_variables(const query& q) {
    std::set<std::string> out;
    for (const auto& [_, vars] : free_variables(q)) out.insert(vars.begin(), vars.end());
    return out;
}

namespace {

void collect_arities(const program& p, std::map<std::string, std::size_t>& arity);

void check_atom_arity(const predicate_atom& a, std::map<std::string, std::size_t>& arity) {
    auto [it, inserted] = arity.emplace(a.name, a.args.size());
    if (!inserted && it->second != a.args.size())
        throw error("predicate '" + a.name + "' used with arities " + std::to_string(it->second) +
                    " and " + std::to_string(a.args.size()));
}

void collect_arities(const program& p, std::map<std::string, std::size_t>& arity) {
    for (const auto& f : p.facts) check_atom_arity(f, arity);
    for (const auto& r : p.rules) {
        check_atom_arity(r.head, arity);
        for (const auto& t : r.head.args)
            if (!t.is_variable()) throw error("head arguments must all be variables in " + r.head.name);
        for (const auto& l : r.body) {
            if (const auto* pa = std::get_if<predicate_atom>(&l.a)) check_atom_arity(*pa, arity);
            if (const auto* n = std::get_if<nested_atom>(&l.a)) {
                std::map<std::string, std::size_t> inner; // nested scope is isolated
                check_atom_arity(n->q->goal, inner);
                collect_arities(n->q->prog, inner);
            }
        }
    }
}

} // namespace

void validate_query(const query& q) {
    std::map<std::string, std::size_t> arity;
    check_atom_arity(q.goal, arity);
    collect_arities(q.prog, arity);

    bool goal_defined = q.prog.facts.contains(q.goal);
    for (const auto& f : q.prog.facts)
        if (f.name == q.goal.name) goal_defined = true;
    for (const auto& r : q.prog.rules)
        if (r.head.name == q.goal.name) goal_defined = true;
    if (!goal_defined && !q.prog.rules.empty())
        throw error("goal predicate '" + q.goal.name + "' is neither a rule head nor a program fact");
    check_mode_consistency(q.prog);
}

} // namespace nulldl
