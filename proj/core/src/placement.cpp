#include "nulldl/placement.hpp"

#include <algorithm>
#include <ostream>

#include "nulldl/errors.hpp"

namespace nulldl {

namespace {

struct chain_state {
    std::string pred;
    std::size_t position;
    std::string goal_var;
    auto operator<=>(const chain_state&) const = default;
};

} // namespace

chain_map goal_chains(const query& q, const std::set<std::string>& goal_vars) {
    chain_map out;
    auto intensional = intensional_predicates(q.prog);

    std::vector<chain_state> work;
    std::set<chain_state> seen;
    for (std::size_t pos = 0; pos < q.goal.args.size(); ++pos) {
        const term& t = q.goal.args[pos];
        if (t.is_variable() && goal_vars.contains(t.text())) {
            chain_state s{q.goal.name, pos, t.text()};
            if (seen.insert(s).second) work.push_back(s);
        }
    }

    while (!work.empty()) {
        chain_state s = work.back();
        work.pop_back();
        for (std::size_t ri = 0; ri < q.prog.rules.size(); ++ri) {
            const rule& r = q.prog.rules[ri];
            if (r.head.name != s.pred || s.position >= r.head.args.size()) continue;
            const term& local = r.head.args[s.position];
            if (!local.is_variable()) continue;
            const std::string& w = local.text();
            for (std::size_t li = 0; li < r.body.size(); ++li) {
                const literal& l = r.body[li];
                if (!l.positive) continue;
                const auto* pa = std::get_if<predicate_atom>(&l.a);
                if (!pa) continue;
                for (std::size_t k = 0; k < pa->args.size(); ++k) {
                    if (!pa->args[k].is_variable() || pa->args[k].text() != w) continue;
                    occurrence_key key{ri, li};
                    out.positions[key][k] = s.goal_var;
                    if (intensional.contains(pa->name)) {
                        out.intensional.insert(key);
                        chain_state deeper{pa->name, k, s.goal_var};
                        if (seen.insert(deeper).second) work.push_back(deeper);
                    }
                }
            }
        }
    }
    return out;
}

query wrap_occurrences(const query& q,
                       const std::map<occurrence_key, std::map<std::size_t, term>>& lets,
                       bool modal, fresh_name_gen& gen) {
    query out = q;
    for (const auto& [key, positions] : lets) {
        if (positions.empty()) continue;
        rule& host = out.prog.rules[key.rule_index];
        auto* pa = std::get_if<predicate_atom>(&host.body[key.literal_index].a);
        if (!pa) throw internal_error("substitution point is not a predicate occurrence");

        std::string fresh = gen.next();
        std::vector<term> formals;
        formals.reserve(pa->args.size());
        for (std::size_t k = 0; k < pa->args.size(); ++k)
            formals.push_back(term::variable("_v" + std::to_string(k)));

        rule wrapper;
        if (modal) wrapper.m = mode::diamond;
        wrapper.head = predicate_atom{fresh, formals};
        wrapper.body.push_back(literal{predicate_atom{pa->name, formals}, true});
        for (const auto& [k, value] : positions)
            wrapper.body.push_back(literal{let_atom{formals[k].text(), value}, true});

        pa->name = fresh;
        out.prog.rules.push_back(std::move(wrapper));
    }
    return out;
}

query wrap_goal(const query& q, const substitution& goal_lets, bool modal, fresh_name_gen& gen) {
    if (goal_lets.empty()) return q;
    query out = q;
    predicate_atom fresh_goal{gen.next(), q.goal.args};
    rule wrapper;
    if (modal) wrapper.m = mode::diamond;
    wrapper.head = fresh_goal;
    wrapper.body.push_back(literal{q.goal, true});
    for (const auto& [var, value] : goal_lets)
        wrapper.body.push_back(literal{let_atom{var, value}, true});
    out.prog.rules.push_back(std::move(wrapper));
    out.goal = fresh_goal;
    return out;
}

namespace {

bool is_goal_rule(const query& q, const rule& r) { return r.head.name == q.goal.name; }

void trace_placement(std::ostream* trace, const query& q,
                     const std::map<occurrence_key, std::map<std::size_t, term>>& lets) {
    if (!trace) return;
    for (const auto& [key, positions] : lets) {
        const auto* pa =
            std::get_if<predicate_atom>(&q.prog.rules[key.rule_index].body[key.literal_index].a);
        *trace << "  place lets at rule " << key.rule_index << " literal " << key.literal_index
               << " (" << (pa ? pa->name : "?") << ")";
        for (const auto& [k, v] : positions) *trace << " pos" << k << "=" << v.to_string();
        *trace << "\n";
    }
}

} // namespace

query place_goal_lets(const query& q, const placement_request& req, fresh_name_gen& gen,
                      std::ostream* trace) {
    if (req.goal_lets.empty()) return q;

    std::set<std::string> goal_vars;
    for (const auto& [v, _] : req.goal_lets) goal_vars.insert(v);
    auto chains = goal_chains(q, goal_vars);
    auto extensional = [&](const occurrence_key& key) { return !chains.intensional.contains(key); };

    using let_map = std::map<occurrence_key, std::map<std::size_t, term>>;

    switch (req.lvl) {
    case placement_request::level::top:
        return wrap_goal(q, req.goal_lets, req.modal, gen);

    case placement_request::level::mid: {
        // One move-down step: wrap the chain occurrences inside the
        // goal-defining rules. A variable that cannot descend into every goal
        // rule keeps its let at the top.
        let_map lets;
        std::map<std::string, std::set<std::size_t>> descended; // var -> goal rules reached
        std::set<std::size_t> goal_rules;
        for (std::size_t ri = 0; ri < q.prog.rules.size(); ++ri)
            if (is_goal_rule(q, q.prog.rules[ri])) goal_rules.insert(ri);

        for (const auto& [key, positions] : chains.positions) {
            if (!goal_rules.contains(key.rule_index)) continue;
            for (const auto& [k, var] : positions) descended[var].insert(key.rule_index);
        }
        substitution top_lets;
        std::set<std::string> moved;
        for (const auto& [var, value] : req.goal_lets) {
            if (descended.contains(var) && descended[var] == goal_rules && !goal_rules.empty())
                moved.insert(var);
            else
                top_lets.emplace(var, value);
        }
        for (const auto& [key, positions] : chains.positions) {
            if (!goal_rules.contains(key.rule_index)) continue;
            for (const auto& [k, var] : positions)
                if (moved.contains(var)) lets[key][k] = req.goal_lets.at(var);
        }
        trace_placement(trace, q, lets);
        query out = wrap_occurrences(q, lets, req.modal, gen);
        return wrap_goal(out, top_lets, req.modal, gen);
    }

    case placement_request::level::leaves_pure:
    case placement_request::level::leaves:
    case placement_request::level::leaves_plus_top: {
        let_map lets;
        std::set<std::string> placed;
        for (const auto& [key, positions] : chains.positions) {
            if (!extensional(key)) continue; // descend through defined predicates
            for (const auto& [k, var] : positions) {
                lets[key][k] = req.goal_lets.at(var);
                placed.insert(var);
            }
        }
        if (req.lvl != placement_request::level::leaves_pure) {
            // Broken-chain completion: pin same-named variables at their
            // extensional instantiation points.
            auto intensional = intensional_predicates(q.prog);
            for (std::size_t ri = 0; ri < q.prog.rules.size(); ++ri) {
                const rule& r = q.prog.rules[ri];
                for (std::size_t li = 0; li < r.body.size(); ++li) {
                    const literal& l = r.body[li];
                    if (!l.positive) continue;
                    const auto* pa = std::get_if<predicate_atom>(&l.a);
                    if (!pa || intensional.contains(pa->name)) continue;
                    for (std::size_t k = 0; k < pa->args.size(); ++k) {
                        const term& t = pa->args[k];
                        if (!t.is_variable()) continue;
                        auto it = req.goal_lets.find(t.text());
                        if (it == req.goal_lets.end()) continue;
                        occurrence_key key{ri, li};
                        auto& slot = lets[key];
                        slot.emplace(k, it->second); // chain placement wins
                        placed.insert(t.text());
                    }
                }
            }
        }
        substitution top_lets;
        for (const auto& [var, value] : req.goal_lets)
            if (!placed.contains(var)) top_lets.emplace(var, value);

        trace_placement(trace, q, lets);
        query out = wrap_occurrences(q, lets, req.modal, gen);
        if (req.lvl == placement_request::level::leaves_plus_top) {
            // Append the lets into the goal rules themselves, mapping goal
            // variables to the rule's head variables positionally.
            for (auto& r : out.prog.rules) {
                if (!is_goal_rule(out, r)) continue;
                for (std::size_t pos = 0; pos < out.goal.args.size() && pos < r.head.args.size(); ++pos) {
                    const term& g = out.goal.args[pos];
                    if (!g.is_variable()) continue;
                    auto it = req.goal_lets.find(g.text());
                    if (it == req.goal_lets.end()) continue;
                    const term& local = r.head.args[pos];
                    if (local.is_variable())
                        r.body.push_back(literal{let_atom{local.text(), it->second}, true});
                }
            }
        }
        return wrap_goal(out, top_lets, req.modal, gen);
    }

    case placement_request::level::at_points: {
        let_map lets;
        std::set<std::string> placed;
        for (const auto& pt : req.points) {
            occurrence_key key{pt.rule_index, pt.literal_index};
            auto it = chains.positions.find(key);
            if (it == chains.positions.end()) continue;
            for (const auto& [k, var] : it->second) {
                lets[key][k] = req.goal_lets.at(var);
                placed.insert(var);
            }
        }
        substitution top_lets;
        for (const auto& [var, value] : req.goal_lets)
            if (!placed.contains(var)) top_lets.emplace(var, value);
        trace_placement(trace, q, lets);
        query out = wrap_occurrences(q, lets, req.modal, gen);
        return wrap_goal(out, top_lets, req.modal, gen);
    }
    }
    return q;
}

} // namespace nulldl
