#include "nulldl/printer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "json.hpp"

namespace nulldl {

namespace {

bool bare_safe(const std::string& s) {
    if (s.empty()) return false;
    if (s == "null" || s == "box" || s == "diamond" || s == "filter" || s == "let" || s == "exists")
        return false;
    if (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string print_term_source(const term& t) {
    switch (t.kind()) {
    case term_kind::null_value: return "null";
    case term_kind::variable: return t.text();
    case term_kind::constant: return bare_safe(t.text()) ? t.text() : quote(t.text());
    }
    return "?";
}

namespace {

std::string print_predicate(const predicate_atom& a) {
    std::string out = a.name + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) out += ", ";
        out += print_term_source(a.args[i]);
    }
    return out + ")";
}

std::string print_query_block(const query& q);

std::string print_rule_inline(const rule& r) {
    std::string out;
    if (r.m) out += (*r.m == mode::box ? "box: " : "diamond: ");
    out += print_predicate(r.head);
    if (!r.body.empty()) {
        out += " <- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) out += ", ";
            out += print_literal(r.body[i]);
        }
    }
    return out;
}

std::string print_query_block(const query& q) {
    // the goal rule comes first so reparsing recovers the goal
    std::string out = "{ ";
    std::vector<std::string> parts;
    std::vector<const rule*> ordered;
    for (const auto& r : q.prog.rules)
        if (r.head.name == q.goal.name) ordered.push_back(&r);
    for (const auto& r : q.prog.rules)
        if (r.head.name != q.goal.name) ordered.push_back(&r);
    for (const rule* r : ordered) parts.push_back(print_rule_inline(*r));
    for (const auto& f : q.prog.facts) parts.push_back(print_predicate(f));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += "; ";
        out += parts[i];
    }
    return out + " }";
}

} // namespace

std::string print_literal(const literal& l) {
    if (const auto* p = std::get_if<predicate_atom>(&l.a))
        return (l.positive ? "" : "!") + print_predicate(*p);
    if (const auto* f = std::get_if<filter_atom>(&l.a))
        return "filter(" + print_term_source(f->lhs) + (l.positive ? " = " : " != ") +
               print_term_source(f->rhs) + ")";
    if (const auto* la = std::get_if<let_atom>(&l.a))
        return std::string(l.positive ? "" : "!") + "let(" + la->var + " = " +
               print_term_source(la->value) + ")";
    const auto& n = std::get<nested_atom>(l.a);
    return (l.positive ? std::string("exists ") : std::string("!exists ")) + print_query_block(*n.q);
}

std::string print_rule(const rule& r) { return print_rule_inline(r) + "."; }

std::string print_program(const program& p) {
    std::string out;
    for (const auto& r : p.rules) out += print_rule(r) + "\n";
    for (const auto& f : p.facts) out += print_predicate(f) + ".\n";
    return out;
}

std::string print_facts(const database& db) {
    std::string out;
    for (const auto& f : db) out += print_predicate(f) + ".\n";
    return out;
}

namespace {

std::string print_algebra_rec(const algebra_expr& e) {
    if (const auto* b = std::get_if<base_node>(&e.node)) {
        std::string out = "(" + b->relation_name;
        for (const auto& a : b->args) out += " " + print_term_source(a);
        return out + ")";
    }
    if (const auto* s = std::get_if<select_node>(&e.node))
        return "(select-box (" + std::string(s->equal ? "=" : "!=") + " " +
               print_term_source(s->lhs) + " " + print_term_source(s->rhs) + ") " +
               print_algebra_rec(*s->child) + ")";
    if (const auto* p = std::get_if<project_node>(&e.node)) {
        std::string out = "(project (";
        for (std::size_t i = 0; i < p->attrs.size(); ++i) out += (i ? " " : "") + p->attrs[i];
        return out + ") " + print_algebra_rec(*p->child) + ")";
    }
    if (const auto* r = std::get_if<rename_node>(&e.node))
        return "(rename " + r->from + " " + r->to + " " + print_algebra_rec(*r->child) + ")";
    if (const auto* u = std::get_if<union_node>(&e.node))
        return "(union " + print_algebra_rec(*u->left) + " " + print_algebra_rec(*u->right) + ")";
    if (const auto* j = std::get_if<join_node>(&e.node))
        return "(join " + print_algebra_rec(*j->left) + " " + print_algebra_rec(*j->right) + ")";
    if (const auto* m = std::get_if<minus_node>(&e.node))
        return "(minus " + print_algebra_rec(*m->left) + " " + print_algebra_rec(*m->right) + ")";
    if (const auto* l = std::get_if<left_outer_join_node>(&e.node))
        return "(left-outer-join " + print_algebra_rec(*l->left) + " " +
               print_algebra_rec(*l->right) + ")";
    const auto& x = std::get<exists_node>(e.node);
    return "(" + std::string(x.negated ? "not-exists" : "exists") + " " +
           print_algebra_rec(*x.inner) + " " + print_algebra_rec(*x.outer) + ")";
}

} // namespace

std::string print_algebra(const algebra_expr& e) { return print_algebra_rec(e); }

result_table to_table(const std::vector<std::string>& columns,
                      const std::set<std::vector<term>>& rows) {
    result_table t;
    t.columns = columns;
    t.rows.assign(rows.begin(), rows.end()); // set order is the sorted order
    return t;
}

result_table answers_to_table(const std::set<fact>& answers, const std::vector<std::string>& columns) {
    std::set<std::vector<term>> rows;
    for (const auto& f : answers) rows.insert(f.args);
    return to_table(columns, rows);
}

std::string render_table(const result_table& t, bool use_color) {
    std::vector<std::size_t> width(t.columns.size(), 0);
    auto cell = [](const term& v) { return v.to_string(); };
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    for (const auto& row : t.rows)
        for (std::size_t i = 0; i < row.size() && i < width.size(); ++i)
            width[i] = std::max(width[i], cell(row[i]).size());

    std::ostringstream out;
    auto pad = [&](const std::string& s, std::size_t w) {
        out << s;
        for (std::size_t i = s.size(); i < w; ++i) out << ' ';
    };
    const char* bold = use_color ? "\033[1m" : "";
    const char* reset = use_color ? "\033[0m" : "";
    out << bold;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out << "  ";
        pad(t.columns[i], width[i]);
    }
    out << reset << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out << "  ";
        out << std::string(width[i], '-');
    }
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << "  ";
            pad(cell(row[i]), i < width.size() ? width[i] : 0);
        }
        out << "\n";
    }
    out << "(" << t.rows.size() << (t.rows.size() == 1 ? " row)" : " rows)") << "\n";
    return out.str();
}

std::string render_json(const result_table& t) {
    nlohmann::ordered_json j;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& v : row) {
            if (v.is_null())
                r.push_back(nullptr);
            else
                r.push_back(v.text());
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump();
}

} // namespace nulldl
