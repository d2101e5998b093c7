#include "nulldl/ast.hpp"

#include "nulldl/errors.hpp"

namespace nulldl {

predicate_atom apply_substitution(const substitution& theta, const predicate_atom& a) {
    predicate_atom out{a.name, {}};
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) out.args.push_back(apply(theta, t));
    return out;
}

atom apply_substitution(const substitution& theta, const atom& a) {
    if (const auto* p = std::get_if<predicate_atom>(&a)) return apply_substitution(theta, *p);
    if (const auto* f = std::get_if<filter_atom>(&a))
        return filter_atom{apply(theta, f->lhs), apply(theta, f->rhs)};
    if (const auto* l = std::get_if<let_atom>(&a)) {
        // The bound side is a binder, not an occurrence; only the value side
        // is substituted.
        return let_atom{l->var, apply(theta, l->value)};
    }
    const auto& n = std::get<nested_atom>(a);
    return nested_atom{std::make_shared<query>(apply_substitution(theta, *n.q))};
}

literal apply_substitution(const substitution& theta, const literal& l) {
    return literal{apply_substitution(theta, l.a), l.positive};
}

rule apply_substitution(const substitution& theta, const rule& r) {
    rule out{r.m, apply_substitution(theta, r.head), {}};
    out.body.reserve(r.body.size());
    for (const auto& l : r.body) out.body.push_back(apply_substitution(theta, l));
    return out;
}

query apply_substitution(const substitution& theta, const query& q) {
    query out;
    out.goal = apply_substitution(theta, q.goal);
    out.prog.facts = q.prog.facts;
    out.prog.rules.reserve(q.prog.rules.size());
    for (const auto& r : q.prog.rules) out.prog.rules.push_back(apply_substitution(theta, r));
    return out;
}

term rename_variables(const std::map<std::string, std::string>& renaming, const term& t) {
    if (t.is_variable()) {
        auto it = renaming.find(t.text());
        if (it != renaming.end()) return term::variable(it->second);
    }
    return t;
}

namespace {

predicate_atom rename_vars(const std::map<std::string, std::string>& ren, const predicate_atom& a) {
    predicate_atom out{a.name, {}};
    for (const auto& t : a.args) out.args.push_back(rename_variables(ren, t));
    return out;
}

atom rename_vars(const std::map<std::string, std::string>& ren, const atom& a);

literal rename_vars(const std::map<std::string, std::string>& ren, const literal& l) {
    return literal{rename_vars(ren, l.a), l.positive};
}

atom rename_vars(const std::map<std::string, std::string>& ren, const atom& a) {
    if (const auto* p = std::get_if<predicate_atom>(&a)) return rename_vars(ren, *p);
    if (const auto* f = std::get_if<filter_atom>(&a))
        return filter_atom{rename_variables(ren, f->lhs), rename_variables(ren, f->rhs)};
    if (const auto* l = std::get_if<let_atom>(&a)) {
        auto it = ren.find(l->var);
        return let_atom{it == ren.end() ? l->var : it->second, rename_variables(ren, l->value)};
    }
    const auto& n = std::get<nested_atom>(a);
    return nested_atom{std::make_shared<query>(rename_variables(ren, *n.q))};
}

} // namespace

rule rename_variables(const std::map<std::string, std::string>& renaming, const rule& r) {
    rule out{r.m, rename_vars(renaming, r.head), {}};
    for (const auto& l : r.body) out.body.push_back(rename_vars(renaming, l));
    return out;
}

query rename_variables(const std::map<std::string, std::string>& renaming, const query& q) {
    query out;
    out.goal = rename_vars(renaming, q.goal);
    out.prog.facts = q.prog.facts;
    for (const auto& r : q.prog.rules) out.prog.rules.push_back(rename_variables(renaming, r));
    return out;
}

std::pair<rule, program> desugar_let(const rule& r, const program& prog, fresh_name_gen& gen) {
    for (std::size_t i = 0; i < r.body.size(); ++i) {
        const auto* l = std::get_if<let_atom>(&r.body[i].a);
        if (!l) continue;
        if (!l->value.is_ground())
            throw error("let value must be a constant or null: let(" + l->var + "= ...)");
        std::string pred = gen.next();
        rule out = r;
        out.body[i] = literal{predicate_atom{pred, {term::variable(l->var)}}, true};
        program newprog = prog;
        newprog.facts.insert(fact{pred, {l->value}});
        return {std::move(out), std::move(newprog)};
    }
    return {r, prog};
}

program desugar_all_lets(const program& prog, fresh_name_gen& gen) {
    program out;
    out.facts = prog.facts;
    for (const auto& r : prog.rules) {
        rule cur = r;
        for (auto& l : cur.body) {
            const auto* la = std::get_if<let_atom>(&l.a);
            if (!la) continue;
            if (!la->value.is_ground())
                throw error("let value must be a constant or null: let(" + la->var + "= ...)");
            std::string pred = gen.next();
            out.facts.insert(fact{pred, {la->value}});
            l = literal{predicate_atom{pred, {term::variable(la->var)}}, l.positive};
        }
        out.rules.push_back(std::move(cur));
    }
    return out;
}

std::set<std::string> atom_variables(const atom& a) {
    std::set<std::string> vars;
    if (const auto* p = std::get_if<predicate_atom>(&a)) {
        for (const auto& t : p->args)
            if (t.is_variable()) vars.insert(t.text());
    } else if (const auto* f = std::get_if<filter_atom>(&a)) {
        if (f->lhs.is_variable()) vars.insert(f->lhs.text());
        if (f->rhs.is_variable()) vars.insert(f->rhs.text());
    } else if (const auto* l = std::get_if<let_atom>(&a)) {
        vars.insert(l->var);
        if (l->value.is_variable()) vars.insert(l->value.text());
    }
    // nested queries have their own scope
    return vars;
}

std::set<std::string> rule_variables(const rule& r) {
    std::set<std::string> vars;
    for (const auto& t : r.head.args)
        if (t.is_variable()) vars.insert(t.text());
    for (const auto& l : r.body) {
        auto avars = atom_variables(l.a);
        vars.insert(avars.begin(), avars.end());
    }
    return vars;
}

std::set<std::string> positive_variables(const rule& r) {
    std::set<std::string> vars;
    for (const auto& l : r.body) {
        if (!l.positive) continue;
        if (const auto* p = std::get_if<predicate_atom>(&l.a)) {
            for (const auto& t : p->args)
                if (t.is_variable()) vars.insert(t.text());
        } else if (const auto* la = std::get_if<let_atom>(&l.a)) {
            vars.insert(la->var);
        }
    }
    return vars;
}

std::set<std::string> goal_variables(const query& q) {
    std::set<std::string> vars;
    for (const auto& t : q.goal.args)
        if (t.is_variable()) vars.insert(t.text());
    return vars;
}

program erase_modes(const program& p) {
    program out = p;
    for (auto& r : out.rules) r.m.reset();
    return out;
}

program attach_mode(const program& p, mode m) {
    program out = p;
    for (auto& r : out.rules) r.m = m;
    return out;
}

bool is_modal(const program& p) {
    for (const auto& r : p.rules)
        if (!r.m) return false;
    return true;
}

bool is_plain(const program& p) {
    for (const auto& r : p.rules)
        if (r.m) return false;
    return true;
}

void check_mode_consistency(const program& p) {
    if (!is_modal(p) && !is_plain(p)) throw mixed_modes_error();
}

std::set<std::string> intensional_predicates(const program& p) {
    std::set<std::string> preds;
    for (const auto& r : p.rules) preds.insert(r.head.name);
    return preds;
}

} // namespace nulldl
