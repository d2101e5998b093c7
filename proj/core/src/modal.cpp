#include "nulldl/modal.hpp"

#include <ostream>

#include "nulldl/analysis.hpp"
#include "nulldl/errors.hpp"

namespace nulldl {

bool modal_term_eq(mode m, const term& lhs, const term& rhs) {
    if (lhs.is_variable() || rhs.is_variable())
        throw unbound_builtin_error("filter(" + lhs.to_string() + " = " + rhs.to_string() + ")");
    switch (m) {
    case mode::box:
        return lhs.is_constant() && rhs.is_constant() && lhs == rhs;
    case mode::diamond:
        return lhs.is_null() || rhs.is_null() || lhs == rhs;
    }
    return false;
}

bool modal_term_neq(mode m, const term& lhs, const term& rhs) {
    if (lhs.is_variable() || rhs.is_variable())
        throw unbound_builtin_error("filter(" + lhs.to_string() + " != " + rhs.to_string() + ")");
    switch (m) {
    case mode::box:
        return lhs.is_constant() && rhs.is_constant() && lhs != rhs;
    case mode::diamond:
        return lhs.is_null() || rhs.is_null() || lhs != rhs;
    }
    return false;
}

bool term_less_informative(const term& t1, const term& t2) {
    return t1.is_null() || t1 == t2;
}

bool less_informative(const fact& f1, const fact& f2) {
    if (f1.name != f2.name || f1.args.size() != f2.args.size()) return false;
    for (std::size_t i = 0; i < f1.args.size(); ++i)
        if (!term_less_informative(f1.args[i], f2.args[i])) return false;
    return true;
}

namespace {

// Componentwise compatibility used by the negative-predicate bullets.
bool compatible(mode m, const std::vector<term>& literal_args, const std::vector<term>& fact_args) {
    for (std::size_t i = 0; i < literal_args.size(); ++i) {
        bool ok = (m == mode::diamond) ? modal_term_eq(mode::diamond, literal_args[i], fact_args[i])
                                       : modal_term_eq(mode::box, literal_args[i], fact_args[i]);
        if (!ok) return false;
    }
    return true;
}

bool holds_negative_predicate(const fact_store& store, mode m, const predicate_atom& grounded) {
    // box ¬q: no fact ◇-compatible with the arguments;
    // diamond ¬q: no fact □-compatible with them.
    mode check = (m == mode::box) ? mode::diamond : mode::box;
    for (const auto& tuple : store.tuples(grounded.name)) {
        if (tuple.size() != grounded.args.size()) continue;
        if (compatible(check, grounded.args, tuple)) return false;
    }
    return true;
}

} // namespace

bool modal_holds(const fact_store& store, const substitution& theta, mode m, const literal& lit,
                 const database& db, const modal_eval_options& opts) {
    if (const auto* p = std::get_if<predicate_atom>(&lit.a)) {
        auto grounded = apply_substitution(theta, *p);
        if (!lit.positive) {
            for (const auto& t : grounded.args)
                if (t.is_variable())
                    throw unbound_builtin_error("variable " + t.text() + " in negated " + p->name);
            return holds_negative_predicate(store, m, grounded);
        }
        if (!grounded.is_ground()) return false;
        if (m == mode::box) return store.contains(grounded);
        for (const auto& tuple : store.tuples(grounded.name)) {
            if (tuple.size() != grounded.args.size()) continue;
            if (less_informative(fact{grounded.name, tuple}, grounded)) return true;
        }
        return false;
    }
    if (const auto* f = std::get_if<filter_atom>(&lit.a)) {
        term lhs = apply(theta, f->lhs);
        term rhs = apply(theta, f->rhs);
        // The literal's own operator is evaluated under the mode; the
        // inequality form is the negated literal.
        return lit.positive ? modal_term_eq(m, lhs, rhs) : modal_term_neq(m, lhs, rhs);
    }
    if (const auto* l = std::get_if<let_atom>(&lit.a)) {
        auto it = theta.find(l->var);
        if (it == theta.end()) throw unbound_builtin_error("let(" + l->var + " = ...)");
        bool eq = it->second == l->value;
        return lit.positive ? eq : !eq;
    }
    const auto& n = std::get<nested_atom>(lit.a);
    if (!opts.on_nested) throw error("nested-query literal requires an evaluation context");
    return opts.on_nested(db, theta, *n.q, lit.positive);
}

namespace {

struct modal_rule_ctx {
    const fact_store& store;
    const database& db;
    const modal_eval_options& opts;
};

// Binds a variable to a fact value under the rule's matching discipline.
// Box: exact. Diamond: the witness value itself; a ⊥ binding is upgraded by a
// later constant witness, two distinct constant witnesses fail.
bool bind(mode m, substitution& theta, const std::string& var, const term& value) {
    auto it = theta.find(var);
    if (it == theta.end()) {
        theta.emplace(var, value);
        return true;
    }
    if (m == mode::box) return it->second == value;
    if (it->second == value) return true;
    if (it->second.is_null()) {
        it->second = value; // most informative wins
        return true;
    }
    return value.is_null(); // fact's ⊥ is compatible with the bound constant
}

// Position check before binding: box demands the exact fact value at ground
// positions, diamond demands fact ≤ literal (a ⊥ literal position admits only
// a ⊥ fact value).
bool position_admits(mode m, const term& pattern, const term& value) {
    if (m == mode::box) return pattern == value;
    return term_less_informative(value, pattern);
}

void enumerate_modal_rule(const modal_rule_ctx& ctx, const rule& r, std::set<fact>& out) {
    const mode m = r.m.value();

    struct frame {
        substitution theta;
        std::size_t next = 0;
    };
    std::vector<frame> stack{{{}, 0}};

    while (!stack.empty()) {
        frame f = std::move(stack.back());
        stack.pop_back();

        bool dead = false;
        std::size_t i = f.next;
        while (i < r.body.size()) {
            const literal& l = r.body[i];
            if (is_predicate(l.a) && l.positive) break;
            if (!is_nested(l.a)) {
                bool ready = true;
                for (const auto& v : atom_variables(l.a))
                    if (!f.theta.contains(v)) { ready = false; break; }
                if (ready && !modal_holds(ctx.store, f.theta, m, l, ctx.db, ctx.opts)) {
                    dead = true;
                    break;
                }
            }
            ++i;
        }
        if (dead) continue;

        if (i >= r.body.size()) {
            bool ok = true;
            for (const auto& l : r.body) {
                if (is_predicate(l.a) && l.positive) continue;
                if (is_nested(l.a)) continue;
                if (!modal_holds(ctx.store, f.theta, m, l, ctx.db, ctx.opts)) { ok = false; break; }
            }
            if (ok) {
                for (const auto& l : r.body) {
                    if (!is_nested(l.a)) continue;
                    if (!modal_holds(ctx.store, f.theta, m, l, ctx.db, ctx.opts)) { ok = false; break; }
                }
            }
            if (ok) {
                fact head = apply_substitution(f.theta, r.head);
                if (!head.is_ground())
                    throw internal_error("unsafe modal rule reached evaluation: " + r.head.name);
                if (ctx.opts.trace && !ctx.store.contains(head))
                    *ctx.opts.trace << "  derive " << head.name << "/" << head.args.size() << "\n";
                out.insert(std::move(head));
            }
            continue;
        }

        const auto& pa = std::get<predicate_atom>(r.body[i].a);
        for (const auto& tuple : ctx.store.tuples(pa.name)) {
            if (tuple.size() != pa.args.size()) continue;
            substitution theta = f.theta;
            bool match = true;
            for (std::size_t k = 0; k < tuple.size() && match; ++k) {
                const term& pattern = pa.args[k];
                if (pattern.is_variable()) {
                    // repeated variables in one literal: check against the
                    // value already taken from this or earlier witnesses
                    match = bind(m, theta, pattern.text(), tuple[k]);
                } else {
                    match = position_admits(m, pattern, tuple[k]);
                }
            }
            if (match) stack.push_back({std::move(theta), i + 1});
        }
    }
}

} // namespace

std::set<fact> modal_infer_rule(const fact_store& store, const rule& r, const database& db,
                                const modal_eval_options& opts) {
    if (!r.m) throw error("modal inference on a rule without a mode: " + r.head.name);
    fresh_name_gen gen("_d");
    program scratch;
    scratch.rules.push_back(r);
    scratch = desugar_all_lets(scratch, gen);

    fact_store augmented = store;
    for (const auto& f : scratch.facts) augmented.insert(f);

    modal_rule_ctx ctx{augmented, db, opts};
    std::set<fact> out;
    enumerate_modal_rule(ctx, scratch.rules.front(), out);
    return out;
}

fact_store modal_fixpoint(const program& p, const database& db, const modal_eval_options& opts) {
    for (const auto& r : p.rules)
        if (!r.m) throw error("modal evaluation requires a mode on every rule");

    fresh_name_gen gen("_d");
    program work = desugar_all_lets(p, gen);

    for (const auto& r : work.rules) {
        auto report = check_safety(r);
        if (!report.ok) throw safety_error(r.head.name, report.unsafe_variables);
    }
    auto strata = stratify(work);

    fact_store store(db);
    for (const auto& f : work.facts) store.insert(f);

    modal_rule_ctx ctx{store, db, opts};
    std::size_t stratum_no = 0;
    for (const auto& stratum : strata) {
        if (opts.trace) *opts.trace << "stratum " << stratum_no++ << "\n";
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t ri : stratum) {
                std::set<fact> derived;
                enumerate_modal_rule(ctx, work.rules[ri], derived);
                for (auto& f : derived)
                    if (store.insert(std::move(f))) changed = true;
            }
        }
    }
    return store;
}

std::set<fact> modal_answer(const query& q, const database& db, const modal_eval_options& opts) {
    auto store = modal_fixpoint(q.prog, db, opts);
    return store.facts(q.goal.name);
}

std::pair<rule, rule> substitute_logical_modal(const substitution& theta, const rule& r,
                                               const std::string& variable, fresh_name_gen& gen) {
    bool in_head = false;
    for (const auto& t : r.head.args)
        if (t.is_variable() && t.text() == variable) in_head = true;
    if (!in_head || !theta.contains(variable)) throw variable_absent_error(variable);

    std::string u = gen.next();
    predicate_atom u_atom{u, r.head.args};

    rule wrapper;
    wrapper.m = mode::diamond;
    wrapper.head = r.head;
    wrapper.body.push_back(literal{u_atom, true});
    wrapper.body.push_back(literal{let_atom{variable, theta.at(variable)}, true});

    rule lower;
    lower.m = r.m;
    lower.head = u_atom;
    lower.body = r.body;
    return {wrapper, lower};
}

} // namespace nulldl
