#include "nulldl/eval.hpp"

#include <ostream>

#include "nulldl/errors.hpp"
#include "nulldl/nesting.hpp"

namespace nulldl {

bool eval_literal(const fact_store& store, const substitution& theta, const literal& lit) {
    if (const auto* p = std::get_if<predicate_atom>(&lit.a)) {
        auto grounded = apply_substitution(theta, *p);
        if (!lit.positive) {
            for (const auto& t : grounded.args)
                if (t.is_variable())
                    throw unbound_builtin_error("variable " + t.text() + " in negated " + p->name);
            return !store.contains(grounded);
        }
        return grounded.is_ground() && store.contains(grounded);
    }
    if (const auto* f = std::get_if<filter_atom>(&lit.a)) {
        term lhs = apply(theta, f->lhs);
        term rhs = apply(theta, f->rhs);
        if (lhs.is_variable() || rhs.is_variable())
            throw unbound_builtin_error("filter(" + lhs.to_string() + " = " + rhs.to_string() + ")");
        bool eq = lhs == rhs;
        return lit.positive ? eq : !eq;
    }
    if (const auto* l = std::get_if<let_atom>(&lit.a)) {
        // Equivalent to the desugared l(X)/l(t) pair when X is bound.
        auto it = theta.find(l->var);
        if (it == theta.end()) throw unbound_builtin_error("let(" + l->var + " = ...)");
        bool eq = it->second == l->value;
        return lit.positive ? eq : !eq;
    }
    throw error("nested-query literal requires an evaluation context");
}

namespace {

struct rule_eval_ctx {
    const fact_store& store;
    const database& db;
    const nested_handler& nested;
    std::ostream* trace;
};

bool builtin_ready(const literal& l, const substitution& theta) {
    for (const auto& v : atom_variables(l.a))
        if (!theta.contains(v)) return false;
    return true;
}

bool eval_builtin(const rule_eval_ctx& ctx, const substitution& theta, const literal& l) {
    if (const auto* n = std::get_if<nested_atom>(&l.a))
        return ctx.nested(ctx.db, theta, *n->q, l.positive);
    return eval_literal(ctx.store, theta, l);
}

// Left-to-right join over positive predicate literals; filters and negations
// fire as soon as their variables are bound, nested atoms once all positive
// literals are matched.
void enumerate_rule(const rule_eval_ctx& ctx, const rule& r, std::set<fact>& out) {
    struct frame {
        substitution theta;
        std::size_t next = 0; // body index
    };
    std::vector<frame> stack{{{}, 0}};

    std::vector<literal> deferred_nested;
    for (const auto& l : r.body)
        if (is_nested(l.a)) deferred_nested.push_back(l);

    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();

        bool dead = false;
        // advance through builtins that are ready, stop at the next positive
        // predicate literal
        std::size_t i = f.next;
        while (i < r.body.size()) {
            const literal& l = r.body[i];
            if (is_predicate(l.a) && l.positive) break;
            if (is_nested(l.a)) { ++i; continue; } // handled at the end
            if (builtin_ready(l, f.theta)) {
                if (!eval_builtin(ctx, f.theta, l)) { dead = true; break; }
            }
            // not ready yet: re-checked after more positives bind
            ++i;
        }
        if (dead) continue;

        if (i >= r.body.size()) {
            // all positives matched: re-run any builtin that was skipped, now
            // demanding groundness
            bool ok = true;
            for (const auto& l : r.body) {
                if (is_nested(l.a) || (is_predicate(l.a) && l.positive)) continue;
                if (!eval_builtin(ctx, f.theta, l)) { ok = false; break; }
            }
            if (ok) {
                for (const auto& l : deferred_nested)
                    if (!eval_builtin(ctx, f.theta, l)) { ok = false; break; }
            }
            if (ok) {
                fact head = apply_substitution(f.theta, r.head);
                if (!head.is_ground())
                    throw internal_error("unsafe rule reached evaluation: " + r.head.name);
                if (ctx.trace && !ctx.store.contains(head))
                    *ctx.trace << "  derive " << head.name << "/" << head.args.size() << "\n";
                out.insert(std::move(head));
            }
            continue;
        }

        const auto& pa = std::get<predicate_atom>(r.body[i].a);
        for (const auto& tuple : ctx.store.tuples(pa.name)) {
            if (tuple.size() != pa.args.size()) continue;
            substitution theta = f.theta;
            bool match = true;
            for (std::size_t k = 0; k < tuple.size(); ++k) {
                const term& pattern = pa.args[k];
                if (pattern.is_variable()) {
                    auto it = theta.find(pattern.text());
                    if (it == theta.end())
                        theta.emplace(pattern.text(), tuple[k]);
                    else if (it->second != tuple[k]) { match = false; break; }
                } else if (pattern != tuple[k]) {
                    match = false;
                    break;
                }
            }
            if (match) stack.push_back({std::move(theta), i + 1});
        }
    }
}

} // namespace

fact_store fixpoint(const program& p, const database& db, const eval_options& opts) {
    fresh_name_gen gen("_d");
    program work = desugar_all_lets(p, gen);

    for (const auto& r : work.rules) {
        auto report = check_safety(r);
        if (!report.ok) throw safety_error(r.head.name, report.unsafe_variables);
    }
    auto strata = stratify(work);

    nested_handler nested = opts.on_nested ? opts.on_nested
                                           : make_nested_handler(substitution_strategy::top_down());

    fact_store store(db);
    for (const auto& f : work.facts) store.insert(f);

    rule_eval_ctx ctx{store, db, nested, opts.trace};
    std::size_t stratum_no = 0;
    for (const auto& stratum : strata) {
        if (opts.trace) *opts.trace << "stratum " << stratum_no++ << "\n";
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t ri : stratum) {
                std::set<fact> derived;
                enumerate_rule(ctx, work.rules[ri], derived);
                for (auto& f : derived)
                    if (store.insert(std::move(f))) changed = true;
            }
        }
    }
    return store;
}

std::set<fact> answer(const query& q, const database& db, const eval_options& opts) {
    auto store = fixpoint(q.prog, db, opts);
    return store.facts(q.goal.name);
}

} // namespace nulldl
