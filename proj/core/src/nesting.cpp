#include "nulldl/nesting.hpp"

#include <algorithm>
#include <map>

#include "nulldl/analysis.hpp"
#include "nulldl/errors.hpp"
#include "nulldl/placement.hpp"

namespace nulldl {

namespace {

constexpr std::size_t copy_fanout_limit = 10000;

bool var_in_atom(const predicate_atom& a, const std::string& v) {
    for (const auto& t : a.args)
        if (t.is_variable() && t.text() == v) return true;
    return false;
}

std::size_t max_fresh_counter(const program& p);

std::size_t max_fresh_in_name(const std::string& name) {
    if (name.size() < 3 || name[0] != '_' || name[1] != 'g') return 0;
    std::size_t value = 0;
    for (std::size_t i = 2; i < name.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(name[i]))) return 0;
        value = value * 10 + static_cast<std::size_t>(name[i] - '0');
    }
    return value + 1;
}

std::size_t max_fresh_in_rule(const rule& r) {
    std::size_t m = max_fresh_in_name(r.head.name);
    for (const auto& l : r.body) {
        if (const auto* pa = std::get_if<predicate_atom>(&l.a))
            m = std::max(m, max_fresh_in_name(pa->name));
        if (const auto* n = std::get_if<nested_atom>(&l.a))
            m = std::max(m, max_fresh_counter(n->q->prog));
    }
    return m;
}

std::size_t max_fresh_counter(const program& p) {
    std::size_t m = 0;
    for (const auto& r : p.rules) m = std::max(m, max_fresh_in_rule(r));
    for (const auto& f : p.facts) m = std::max(m, max_fresh_in_name(f.name));
    return m;
}

// Fresh-name generator that continues past any _g names already present, so
// repeated transformations of the same program stay collision free.
class scoped_gen {
public:
    explicit scoped_gen(const program& p) : counter_(max_fresh_counter(p)) {}
    std::string next() { return "_g" + std::to_string(counter_++); }

private:
    std::size_t counter_;
};

predicate_atom rename_predicate(const predicate_atom& a, const std::map<std::string, std::string>& ren) {
    auto it = ren.find(a.name);
    return it == ren.end() ? a : predicate_atom{it->second, a.args};
}

rule rename_predicates(const rule& r, const std::map<std::string, std::string>& ren) {
    rule out = r;
    out.head = rename_predicate(out.head, ren);
    for (auto& l : out.body)
        if (auto* pa = std::get_if<predicate_atom>(&l.a)) *pa = rename_predicate(*pa, ren);
    return out;
}

// Indices of the rules in the subtree rooted at the rules defining `pred`.
std::vector<std::size_t> subtree_rules(const program& p, const std::string& pred) {
    std::set<std::string> wanted{pred};
    std::vector<std::size_t> out;
    std::set<std::size_t> seen;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < p.rules.size(); ++i) {
            if (seen.contains(i) || !wanted.contains(p.rules[i].head.name)) continue;
            seen.insert(i);
            out.push_back(i);
            changed = true;
            for (const auto& l : p.rules[i].body)
                if (const auto* pa = std::get_if<predicate_atom>(&l.a)) wanted.insert(pa->name);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Root predicates: heads never used in any rule body.
std::set<std::string> root_predicates(const program& p) {
    std::set<std::string> heads = intensional_predicates(p);
    for (const auto& r : p.rules)
        for (const auto& l : r.body)
            if (const auto* pa = std::get_if<predicate_atom>(&l.a)) heads.erase(pa->name);
    return heads;
}

program prune_unreachable(const program& p, const std::set<std::string>& roots) {
    std::set<std::string> reachable = roots;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : p.rules) {
            if (!reachable.contains(r.head.name)) continue;
            for (const auto& l : r.body) {
                if (const auto* pa = std::get_if<predicate_atom>(&l.a))
                    if (reachable.insert(pa->name).second) changed = true;
            }
        }
    }
    program out;
    out.facts = p.facts;
    for (const auto& r : p.rules)
        if (reachable.contains(r.head.name)) out.rules.push_back(r);
    return out;
}

} // namespace

program substitute_syntactic(const substitution& theta, const program& p) {
    query q{predicate_atom{"_goal", {}}, p};
    auto free = free_variables(q);
    program out = p;
    for (std::size_t i = 0; i < out.rules.size(); ++i) {
        for (const auto& [var, value] : theta) {
            if (free.at(i).contains(var))
                out.rules[i].body.push_back(literal{let_atom{var, value}, true});
        }
    }
    return out;
}

query substitute_logical_topdown(const substitution& theta, const query& q) {
    std::vector<std::pair<std::string, term>> lets;
    for (const auto& [var, value] : theta)
        if (goal_variables(q).contains(var)) lets.emplace_back(var, value);
    if (lets.empty()) return q;

    scoped_gen gen(q.prog);
    query out = q;
    predicate_atom fresh_goal{gen.next(), q.goal.args};
    rule wrapper;
    wrapper.head = fresh_goal;
    if (!q.prog.rules.empty() && is_modal(q.prog)) wrapper.m = mode::diamond;
    wrapper.body.push_back(literal{q.goal, true});
    for (auto& [var, value] : lets) wrapper.body.push_back(literal{let_atom{var, value}, true});
    out.prog.rules.push_back(std::move(wrapper));
    out.goal = fresh_goal;
    return out;
}

bool can_move_down(const program& p, std::size_t rule_index, std::size_t literal_index) {
    if (rule_index >= p.rules.size()) return false;
    const rule& r = p.rules[rule_index];
    if (literal_index >= r.body.size()) return false;
    const auto* la = std::get_if<let_atom>(&r.body[literal_index].a);
    if (!la) return false;
    auto intensional = intensional_predicates(p);
    for (const auto& l : r.body) {
        if (!l.positive) continue;
        const auto* pa = std::get_if<predicate_atom>(&l.a);
        if (pa && intensional.contains(pa->name) && var_in_atom(*pa, la->var)) return true;
    }
    return false;
}

program move_down(const program& p, std::size_t rule_index, std::size_t literal_index) {
    if (rule_index >= p.rules.size()) throw let_not_found_error();
    const rule& host = p.rules[rule_index];
    if (literal_index >= host.body.size()) throw let_not_found_error();
    const auto* la = std::get_if<let_atom>(&host.body[literal_index].a);
    if (!la) throw let_not_found_error();
    const std::string var = la->var;
    const term value = la->value;

    auto intensional = intensional_predicates(p);
    scoped_gen gen(p);

    program out = p;
    rule& target = out.rules[rule_index];

    bool moved = false;
    for (std::size_t li = 0; li < target.body.size(); ++li) {
        if (li == literal_index || !target.body[li].positive) continue;
        auto* pa = std::get_if<predicate_atom>(&target.body[li].a);
        if (!pa || !intensional.contains(pa->name) || !var_in_atom(*pa, var)) continue;

        // positions of the let variable in this occurrence
        std::vector<std::size_t> positions;
        for (std::size_t k = 0; k < pa->args.size(); ++k)
            if (pa->args[k].is_variable() && pa->args[k].text() == var) positions.push_back(k);

        std::string renamed = gen.next();
        const std::string original = pa->name;
        pa->name = renamed;
        moved = true;

        // copy the defining subtree with a consistent fresh renaming
        auto copies = subtree_rules(p, original);
        std::map<std::string, std::string> ren;
        ren[original] = renamed;
        for (std::size_t ci : copies) {
            const std::string& head = p.rules[ci].head.name;
            if (!ren.contains(head)) ren[head] = gen.next();
        }
        for (std::size_t ci : copies) {
            rule copy = rename_predicates(p.rules[ci], ren);
            if (p.rules[ci].head.name == original) {
                for (std::size_t k : positions) {
                    const term& z = copy.head.args[k];
                    if (!z.is_variable())
                        throw internal_error("non-variable head argument in " + copy.head.name);
                    literal moved_let{let_atom{z.text(), value}, true};
                    if (std::find(copy.body.begin(), copy.body.end(), moved_let) == copy.body.end())
                        copy.body.push_back(std::move(moved_let));
                }
            }
            out.rules.push_back(std::move(copy));
            if (out.rules.size() > copy_fanout_limit) throw transformation_limit_error(copy_fanout_limit);
        }
    }
    if (!moved) throw nothing_below_error(var);

    target.body.erase(target.body.begin() + static_cast<std::ptrdiff_t>(literal_index));
    return prune_unreachable(out, root_predicates(out));
}

query substitute_logical_bottomup(const substitution& theta, const query& q) {
    query out = substitute_logical_topdown(theta, q);
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t ri = 0; ri < out.prog.rules.size() && !moved; ++ri) {
            const rule& r = out.prog.rules[ri];
            for (std::size_t li = 0; li < r.body.size() && !moved; ++li) {
                if (!is_let(r.body[li].a)) continue;
                if (can_move_down(out.prog, ri, li)) {
                    out.prog = move_down(out.prog, ri, li);
                    moved = true;
                }
            }
        }
    }
    return out;
}

query substitute_improper(const substitution& theta, const query& q, std::size_t anchor_rule,
                          const std::string& variable) {
    if (anchor_rule >= q.prog.rules.size()) throw variable_absent_error(variable);
    const rule& anchor = q.prog.rules[anchor_rule];
    if (!rule_variables(anchor).contains(variable) || !theta.contains(variable))
        throw variable_absent_error(variable);

    scoped_gen gen(q.prog);

    // u ranges over the variables occurring positively in the anchor's body,
    // in first-occurrence order; head variables are among them by safety.
    std::vector<term> u_args;
    std::set<std::string> seen;
    for (const auto& l : anchor.body) {
        if (!l.positive) continue;
        if (const auto* pa = std::get_if<predicate_atom>(&l.a)) {
            for (const auto& t : pa->args)
                if (t.is_variable() && seen.insert(t.text()).second) u_args.push_back(t);
        } else if (const auto* la = std::get_if<let_atom>(&l.a)) {
            if (seen.insert(la->var).second) u_args.push_back(term::variable(la->var));
        }
    }
    if (!seen.contains(variable)) throw variable_absent_error(variable);

    predicate_atom u_atom{gen.next(), u_args};

    rule upper;
    upper.m = anchor.m;
    upper.head = anchor.head;
    upper.body.push_back(literal{u_atom, true});

    rule lower;
    lower.m = anchor.m ? std::optional<mode>(mode::diamond) : std::nullopt;
    lower.head = u_atom;
    lower.body = anchor.body;
    lower.body.push_back(literal{let_atom{variable, theta.at(variable)}, true});

    query out = q;
    out.prog.rules[anchor_rule] = std::move(upper);
    out.prog.rules.push_back(std::move(lower));
    return out;
}

query build_theta_query(const substitution& theta, const query& q,
                        const substitution_strategy& strategy) {
    // Free variables are substituted syntactically first; goal variables via
    // the strategy. The two sets are disjoint by definition.
    query out = q;
    out.prog = substitute_syntactic(theta, out.prog);

    substitution goal_theta;
    for (const auto& [var, value] : theta)
        if (goal_variables(q).contains(var)) goal_theta.emplace(var, value);

    switch (strategy.kind) {
    case strategy_kind::syntactic_only:
        break;
    case strategy_kind::logical_top_down:
        out = substitute_logical_topdown(goal_theta, out);
        break;
    case strategy_kind::logical_bottom_up:
        out = substitute_logical_bottomup(goal_theta, out);
        break;
    case strategy_kind::logical_at_points: {
        placement_request req;
        req.goal_lets = goal_theta;
        req.modal = is_modal(out.prog) && !out.prog.rules.empty();
        req.lvl = placement_request::level::at_points;
        req.points = strategy.points;
        fresh_name_gen gen("_w");
        out = place_goal_lets(out, req, gen);
        break;
    }
    case strategy_kind::improper:
        out = substitute_improper(theta, out, strategy.anchor_rule, strategy.anchor_variable);
        break;
    }
    return out;
}

query isolate_intensional(const query& q, fresh_name_gen& gen) {
    std::map<std::string, std::string> ren;
    for (const auto& pred : intensional_predicates(q.prog)) ren[pred] = gen.next();

    query out;
    out.goal = rename_predicate(q.goal, ren);
    out.prog.facts = q.prog.facts;
    for (const auto& r : q.prog.rules) out.prog.rules.push_back(rename_predicates(r, ren));
    return out;
}

bool eval_nested_atom(const database& db, const substitution& theta, const query& nested,
                      const substitution_strategy& strategy) {
    query themed = build_theta_query(theta, nested, strategy);
    fresh_name_gen gen("_n");
    themed = isolate_intensional(themed, gen);
    bool nonempty = !answer(themed, db, {make_nested_handler(strategy)}).empty();
    return nonempty;
}

nested_handler make_nested_handler(substitution_strategy strategy) {
    return [strategy](const database& db, const substitution& theta, const query& nested,
                      bool positive) {
        bool nonempty = eval_nested_atom(db, theta, nested, strategy);
        return positive ? nonempty : !nonempty;
    };
}

} // namespace nulldl
