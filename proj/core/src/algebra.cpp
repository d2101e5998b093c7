#include "nulldl/algebra.hpp"

#include <algorithm>
#include <map>

#include "nulldl/errors.hpp"
#include "nulldl/modal.hpp"
#include "nulldl/profiles.hpp"

namespace nulldl {

expr_ptr make_expr(algebra_node n) { return std::make_shared<algebra_expr>(algebra_expr{std::move(n)}); }

namespace {

std::vector<std::string> merge_schemas(const std::vector<std::string>& left,
                                       const std::vector<std::string>& right) {
    std::vector<std::string> out = left;
    for (const auto& a : right)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return out;
}

std::vector<std::string> shared_attrs(const std::vector<std::string>& left,
                                      const std::vector<std::string>& right) {
    std::vector<std::string> out;
    for (const auto& a : left)
        if (std::find(right.begin(), right.end(), a) != right.end()) out.push_back(a);
    return out;
}

void check_schema_rec(const algebra_expr& e, bool inside_exists_inner);

std::vector<std::string> schema_rec(const algebra_expr& e) {
    if (const auto* b = std::get_if<base_node>(&e.node)) {
        std::vector<std::string> out;
        for (const auto& t : b->args)
            if (t.is_variable()) out.push_back(t.text());
        return out;
    }
    if (const auto* s = std::get_if<select_node>(&e.node)) return schema_rec(*s->child);
    if (const auto* p = std::get_if<project_node>(&e.node)) return p->attrs;
    if (const auto* r = std::get_if<rename_node>(&e.node)) {
        auto out = schema_rec(*r->child);
        for (auto& a : out)
            if (a == r->from) a = r->to;
        return out;
    }
    if (const auto* u = std::get_if<union_node>(&e.node))
        return merge_schemas(schema_rec(*u->left), schema_rec(*u->right));
    if (const auto* j = std::get_if<join_node>(&e.node))
        return merge_schemas(schema_rec(*j->left), schema_rec(*j->right));
    if (const auto* m = std::get_if<minus_node>(&e.node)) return schema_rec(*m->left);
    if (const auto* l = std::get_if<left_outer_join_node>(&e.node))
        return merge_schemas(schema_rec(*l->left), schema_rec(*l->right));
    const auto& x = std::get<exists_node>(e.node);
    return schema_rec(*x.outer);
}

void check_schema_rec(const algebra_expr& e, bool inside_exists_inner) {
    if (const auto* b = std::get_if<base_node>(&e.node)) {
        std::set<std::string> seen;
        for (const auto& t : b->args) {
            if (t.is_variable() && !seen.insert(t.text()).second)
                throw schema_mismatch_error("duplicate attribute '" + t.text() + "' in pattern " +
                                            b->relation_name);
        }
        return;
    }
    if (const auto* s = std::get_if<select_node>(&e.node)) {
        check_schema_rec(*s->child, inside_exists_inner);
        auto schema = schema_rec(*s->child);
        for (const term* t : {&s->lhs, &s->rhs}) {
            if (!t->is_variable()) continue;
            bool found = std::find(schema.begin(), schema.end(), t->text()) != schema.end();
            if (!found && !inside_exists_inner)
                throw schema_mismatch_error("attribute '" + t->text() + "' not in scope of select");
            // inside an exists inner, unresolved attributes become free
            // (possibly correlated) variables
        }
        return;
    }
    if (const auto* p = std::get_if<project_node>(&e.node)) {
        check_schema_rec(*p->child, inside_exists_inner);
        auto schema = schema_rec(*p->child);
        std::set<std::string> seen;
        for (const auto& a : p->attrs) {
            if (!seen.insert(a).second)
                throw schema_mismatch_error("duplicate attribute '" + a + "' in project");
            if (std::find(schema.begin(), schema.end(), a) == schema.end())
                throw schema_mismatch_error("attribute '" + a + "' not in scope of project");
        }
        return;
    }
    if (const auto* r = std::get_if<rename_node>(&e.node)) {
        check_schema_rec(*r->child, inside_exists_inner);
        auto schema = schema_rec(*r->child);
        if (std::find(schema.begin(), schema.end(), r->from) == schema.end())
            throw schema_mismatch_error("attribute '" + r->from + "' not in scope of rename");
        if (std::find(schema.begin(), schema.end(), r->to) != schema.end())
            throw schema_mismatch_error("rename target '" + r->to + "' already present");
        return;
    }
    if (const auto* u = std::get_if<union_node>(&e.node)) {
        check_schema_rec(*u->left, inside_exists_inner);
        check_schema_rec(*u->right, inside_exists_inner);
        return;
    }
    if (const auto* j = std::get_if<join_node>(&e.node)) {
        check_schema_rec(*j->left, inside_exists_inner);
        check_schema_rec(*j->right, inside_exists_inner);
        return;
    }
    if (const auto* m = std::get_if<minus_node>(&e.node)) {
        check_schema_rec(*m->left, inside_exists_inner);
        check_schema_rec(*m->right, inside_exists_inner);
        return;
    }
    if (const auto* l = std::get_if<left_outer_join_node>(&e.node)) {
        check_schema_rec(*l->left, inside_exists_inner);
        check_schema_rec(*l->right, inside_exists_inner);
        return;
    }
    const auto& x = std::get<exists_node>(e.node);
    check_schema_rec(*x.outer, inside_exists_inner);
    check_schema_rec(*x.inner, true);
}

} // namespace

std::vector<std::string> schema_of(const algebra_expr& e) { return schema_rec(e); }

void check_schema(const algebra_expr& e, bool allow_free_references) {
    check_schema_rec(e, allow_free_references);
}

namespace {

// A name with no facts denotes the empty relation; undeclared bare names are
// the parser's concern (unknown_relation_error there).
relation eval_base(const base_node& b, const database& db) {
    relation out;
    for (const auto& t : b.args)
        if (t.is_variable()) out.attrs.push_back(t.text());

    for (const auto& f : db) {
        if (f.name != b.relation_name) continue;
        if (f.args.size() != b.args.size())
            throw schema_mismatch_error("relation '" + b.relation_name + "' has arity " +
                                        std::to_string(f.args.size()) + ", pattern uses " +
                                        std::to_string(b.args.size()));
        std::vector<term> tuple;
        bool match = true;
        for (std::size_t i = 0; i < b.args.size(); ++i) {
            if (b.args[i].is_variable())
                tuple.push_back(f.args[i]);
            else if (b.args[i] != f.args[i]) {
                match = false;
                break;
            }
        }
        if (match) out.tuples.insert(std::move(tuple));
    }
    return out;
}

bool tuples_compatible(const relation& left, const std::vector<term>& lt, const relation& right,
                       const std::vector<term>& rt, const std::vector<std::string>& shared) {
    for (const auto& a : shared) {
        auto li = std::find(left.attrs.begin(), left.attrs.end(), a) - left.attrs.begin();
        auto ri = std::find(right.attrs.begin(), right.attrs.end(), a) - right.attrs.begin();
        if (!modal_term_eq(mode::diamond, lt[static_cast<std::size_t>(li)],
                           rt[static_cast<std::size_t>(ri)]))
            return false;
    }
    return true;
}

relation eval_join(const relation& left, const relation& right) {
    relation out;
    out.attrs = merge_schemas(left.attrs, right.attrs);
    auto shared = shared_attrs(left.attrs, right.attrs);
    for (const auto& lt : left.tuples) {
        for (const auto& rt : right.tuples) {
            if (!tuples_compatible(left, lt, right, rt, shared)) continue;
            std::vector<term> merged;
            merged.reserve(out.attrs.size());
            for (const auto& a : out.attrs) {
                auto li = std::find(left.attrs.begin(), left.attrs.end(), a);
                auto ri = std::find(right.attrs.begin(), right.attrs.end(), a);
                if (li != left.attrs.end() && ri != right.attrs.end()) {
                    const term& lv = lt[static_cast<std::size_t>(li - left.attrs.begin())];
                    const term& rv = rt[static_cast<std::size_t>(ri - right.attrs.begin())];
                    merged.push_back(lv.is_null() ? rv : lv); // most informative value
                } else if (li != left.attrs.end()) {
                    merged.push_back(lt[static_cast<std::size_t>(li - left.attrs.begin())]);
                } else {
                    merged.push_back(rt[static_cast<std::size_t>(ri - right.attrs.begin())]);
                }
            }
            out.tuples.insert(std::move(merged));
        }
    }
    return out;
}

relation eval_minus(const relation& left, const relation& right) {
    relation out;
    out.attrs = left.attrs;
    auto shared = shared_attrs(left.attrs, right.attrs);
    for (const auto& lt : left.tuples) {
        bool blocked = false;
        for (const auto& rt : right.tuples) {
            if (tuples_compatible(left, lt, right, rt, shared)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) out.tuples.insert(lt);
    }
    return out;
}

relation eval_union(const relation& left, const relation& right) {
    relation out;
    out.attrs = merge_schemas(left.attrs, right.attrs);
    auto pad = [&](const relation& rel, const std::vector<term>& tuple) {
        std::vector<term> padded;
        padded.reserve(out.attrs.size());
        for (const auto& a : out.attrs) {
            auto it = std::find(rel.attrs.begin(), rel.attrs.end(), a);
            padded.push_back(it == rel.attrs.end()
                                 ? term::null()
                                 : tuple[static_cast<std::size_t>(it - rel.attrs.begin())]);
        }
        return padded;
    };
    for (const auto& t : left.tuples) out.tuples.insert(pad(left, t));
    for (const auto& t : right.tuples) out.tuples.insert(pad(right, t));
    return out;
}

term resolve(const relation& rel, const std::vector<term>& tuple, const term& t) {
    if (!t.is_variable()) return t;
    auto it = std::find(rel.attrs.begin(), rel.attrs.end(), t.text());
    if (it == rel.attrs.end())
        throw schema_mismatch_error("attribute '" + t.text() + "' not in relation schema");
    return tuple[static_cast<std::size_t>(it - rel.attrs.begin())];
}

} // namespace

relation eval_algebra(const algebra_expr& e, const database& db, const semantics_profile& profile,
                      const translation_options& topts) {
    if (const auto* b = std::get_if<base_node>(&e.node)) return eval_base(*b, db);
    if (const auto* s = std::get_if<select_node>(&e.node)) {
        relation child = eval_algebra(*s->child, db, profile, topts);
        relation out;
        out.attrs = child.attrs;
        for (const auto& t : child.tuples) {
            term lhs = resolve(child, t, s->lhs);
            term rhs = resolve(child, t, s->rhs);
            bool keep = s->equal ? modal_term_eq(mode::box, lhs, rhs)
                                 : modal_term_neq(mode::box, lhs, rhs);
            if (keep) out.tuples.insert(t);
        }
        return out;
    }
    if (const auto* p = std::get_if<project_node>(&e.node)) {
        relation child = eval_algebra(*p->child, db, profile, topts);
        relation out;
        out.attrs = p->attrs;
        for (const auto& t : child.tuples) {
            std::vector<term> row;
            row.reserve(p->attrs.size());
            for (const auto& a : p->attrs) row.push_back(resolve(child, t, term::variable(a)));
            out.tuples.insert(std::move(row));
        }
        return out;
    }
    if (const auto* r = std::get_if<rename_node>(&e.node)) {
        relation out = eval_algebra(*r->child, db, profile, topts);
        for (auto& a : out.attrs)
            if (a == r->from) a = r->to;
        return out;
    }
    if (const auto* u = std::get_if<union_node>(&e.node))
        return eval_union(eval_algebra(*u->left, db, profile, topts),
                          eval_algebra(*u->right, db, profile, topts));
    if (const auto* j = std::get_if<join_node>(&e.node))
        return eval_join(eval_algebra(*j->left, db, profile, topts),
                         eval_algebra(*j->right, db, profile, topts));
    if (const auto* m = std::get_if<minus_node>(&e.node))
        return eval_minus(eval_algebra(*m->left, db, profile, topts),
                          eval_algebra(*m->right, db, profile, topts));
    if (const auto* l = std::get_if<left_outer_join_node>(&e.node)) {
        relation lhs = eval_algebra(*l->left, db, profile, topts);
        relation rhs = eval_algebra(*l->right, db, profile, topts);
        return eval_union(eval_join(lhs, rhs), eval_minus(lhs, rhs));
    }
    const auto& x = std::get<exists_node>(e.node);
    relation outer = eval_algebra(*x.outer, db, profile, topts);
    return eval_exists_filter(outer, *x.inner, x.negated, profile, db, topts);
}

// --- translation ------------------------------------------------------------

namespace {

struct translated_node {
    std::string predicate;
    std::vector<std::string> attrs;
};

predicate_atom node_atom(const translated_node& n) {
    predicate_atom a{n.predicate, {}};
    for (const auto& attr : n.attrs) a.args.push_back(term::variable(attr));
    return a;
}

struct translator {
    const translation_options& opts;
    fresh_name_gen gen{"_t"};
    program rules{};

    translated_node translate(const algebra_expr& e, bool as_root);

    translated_node fresh_node(std::vector<std::string> attrs) {
        return {gen.next(), std::move(attrs)};
    }

    void add_rule(mode m, const translated_node& head, std::vector<literal> body) {
        rule r;
        r.m = m;
        r.head = node_atom(head);
        r.body = std::move(body);
        rules.rules.push_back(std::move(r));
    }
};

translated_node translator::translate(const algebra_expr& e, bool as_root) {
    if (const auto* b = std::get_if<base_node>(&e.node)) {
        bool all_vars = true;
        std::vector<std::string> attrs;
        for (const auto& t : b->args) {
            if (t.is_variable())
                attrs.push_back(t.text());
            else
                all_vars = false;
        }
        if (all_vars) return {b->relation_name, attrs};
        // constants in the pattern require a selecting copy rule
        translated_node node = fresh_node(attrs);
        add_rule(mode::box, node, {literal{predicate_atom{b->relation_name, b->args}, true}});
        return node;
    }
    if (const auto* s = std::get_if<select_node>(&e.node)) {
        auto child = translate(*s->child, false);
        translated_node node = fresh_node(child.attrs);
        std::vector<literal> body{literal{node_atom(child), true}};
        body.push_back(literal{filter_atom{s->lhs, s->rhs}, s->equal});
        add_rule(mode::box, node, std::move(body));
        return node;
    }
    if (const auto* p = std::get_if<project_node>(&e.node)) {
        auto child = translate(*p->child, false);
        translated_node node = fresh_node(p->attrs);
        add_rule(mode::diamond, node, {literal{node_atom(child), true}});
        return node;
    }
    if (const auto* r = std::get_if<rename_node>(&e.node)) {
        auto child = translate(*r->child, false);
        std::vector<std::string> attrs = child.attrs;
        for (auto& a : attrs)
            if (a == r->from) a = r->to;
        translated_node node = fresh_node(attrs);
        if (opts.paper_rename) {
            // verbatim rule: ◇(p((R\{X})∪{Y}) <- r(R), filter(X=Y), let(Y=⊥))
            std::vector<literal> body{literal{node_atom(child), true}};
            body.push_back(
                literal{filter_atom{term::variable(r->from), term::variable(r->to)}, true});
            body.push_back(literal{let_atom{r->to, term::null()}, true});
            add_rule(mode::diamond, node, std::move(body));
        } else {
            // corrected variant: the head uses the renamed variable directly
            predicate_atom body_atom{child.predicate, {}};
            for (const auto& a : child.attrs)
                body_atom.args.push_back(term::variable(a == r->from ? r->to : a));
            add_rule(mode::diamond, node, {literal{std::move(body_atom), true}});
        }
        return node;
    }
    if (const auto* u = std::get_if<union_node>(&e.node)) {
        auto left = translate(*u->left, false);
        auto right = translate(*u->right, false);
        auto attrs = merge_schemas(left.attrs, right.attrs);
        translated_node node = fresh_node(attrs);
        auto make_leg = [&](const translated_node& side) {
            std::vector<literal> body{literal{node_atom(side), true}};
            for (const auto& a : attrs) {
                if (std::find(side.attrs.begin(), side.attrs.end(), a) == side.attrs.end())
                    body.push_back(literal{let_atom{a, term::null()}, true});
            }
            add_rule(mode::diamond, node, std::move(body));
        };
        make_leg(left);
        make_leg(right);
        return node;
    }
    if (const auto* j = std::get_if<join_node>(&e.node)) {
        auto left = translate(*j->left, false);
        auto right = translate(*j->right, false);
        translated_node node = fresh_node(merge_schemas(left.attrs, right.attrs));
        add_rule(mode::diamond, node,
                 {literal{node_atom(left), true}, literal{node_atom(right), true}});
        return node;
    }
    if (const auto* m = std::get_if<minus_node>(&e.node)) {
        auto left = translate(*m->left, false);
        auto right = translate(*m->right, false);
        auto shared = shared_attrs(left.attrs, right.attrs);
        translated_node aux = fresh_node(shared);
        add_rule(mode::box, aux, {literal{node_atom(right), true}});
        translated_node node = fresh_node(left.attrs);
        add_rule(mode::box, node,
                 {literal{node_atom(left), true}, literal{node_atom(aux), false}});
        return node;
    }
    if (const auto* l = std::get_if<left_outer_join_node>(&e.node)) {
        // R ⟕ S = (R ⋈◇ S) ∪ (R −□ S)
        algebra_expr expanded{
            union_node{make_expr(join_node{l->left, l->right}), make_expr(minus_node{l->left, l->right})}};
        return translate(expanded, as_root);
    }
    // exists: □(p(Tr) <- r(Tr), (L,P)) with the inner query as a built-in atom
    const auto& x = std::get<exists_node>(e.node);
    auto outer = translate(*x.outer, false);
    translator inner_translator{opts};
    inner_translator.gen = fresh_name_gen("_i" + gen.next());
    auto inner_node = inner_translator.translate(*x.inner, true);
    query inner_q{node_atom(inner_node), std::move(inner_translator.rules)};

    translated_node node = fresh_node(outer.attrs);
    std::vector<literal> body{literal{node_atom(outer), true}};
    body.push_back(literal{nested_atom{std::make_shared<query>(std::move(inner_q))}, !x.negated});
    add_rule(mode::box, node, std::move(body));
    return node;
}

} // namespace

query translate_algebra(const algebra_expr& e, const translation_options& opts) {
    check_schema(e, /*allow_free_references=*/true);
    translator t{opts};
    auto node = t.translate(e, true);
    query q;
    q.goal = node_atom(node);
    q.prog = std::move(t.rules);
    return q;
}

equivalence_report check_translation_equivalence(const algebra_expr& e, const database& db,
                                                 const translation_options& opts) {
    semantics_profile direct_profile = profile_preset("spec-top-down");
    relation direct = eval_algebra(e, db, direct_profile);

    query q = translate_algebra(e, opts);
    std::set<fact> translated =
        q.prog.rules.empty() ? fact_store(db).facts(q.goal.name) : modal_answer(q, db);

    std::set<std::vector<term>> translated_tuples;
    for (const auto& f : translated) {
        // base-pattern goals with constant arguments keep only variable slots
        if (f.args.size() == direct.attrs.size()) {
            translated_tuples.insert(f.args);
        } else {
            std::vector<term> row;
            for (std::size_t i = 0; i < q.goal.args.size(); ++i)
                if (q.goal.args[i].is_variable()) row.push_back(f.args[i]);
            translated_tuples.insert(std::move(row));
        }
    }

    equivalence_report report;
    for (const auto& t : direct.tuples)
        if (!translated_tuples.contains(t)) report.direct_only.insert(t);
    for (const auto& t : translated_tuples)
        if (!direct.tuples.contains(t)) report.translated_only.insert(t);
    report.equivalent = report.direct_only.empty() && report.translated_only.empty();
    return report;
}

} // namespace nulldl
