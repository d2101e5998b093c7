#include "nulldl/parser.hpp"

#include <cctype>
#include <map>
#include <optional>

#include "nulldl/analysis.hpp"
#include "nulldl/errors.hpp"

namespace nulldl {

namespace {

struct token {
    enum class kind {
        ident, number, string, lparen, rparen, lbrace, rbrace, comma, period, semicolon,
        arrow, eq, neq, bang, colon, end
    };
    kind k = kind::end;
    std::string text;
    std::size_t line = 1, col = 1;
};

class lexer {
public:
    explicit lexer(std::string_view text) : text_(text) { advance(); }

    const token& peek() const { return current_; }

    token next() {
        token t = current_;
        advance();
        return t;
    }

    token expect(token::kind k, const std::string& what) {
        if (current_.k != k) throw syntax_error(current_.line, current_.col, what);
        return next();
    }

    bool accept(token::kind k) {
        if (current_.k != k) return false;
        advance();
        return true;
    }

private:
    void advance() {
        skip_space();
        current_ = token{token::kind::end, "", line_, col_};
        if (pos_ >= text_.size()) return;
        char c = text_[pos_];
        current_.line = line_;
        current_.col = col_;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ident += take();
            current_.k = token::kind::ident;
            current_.text = std::move(ident);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                num += take();
            current_.k = token::kind::number;
            current_.text = std::move(num);
            return;
        }
        if (c == '"') {
            take();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char ch = take();
                if (ch == '\\' && pos_ < text_.size()) ch = take();
                s += ch;
            }
            if (pos_ >= text_.size()) throw syntax_error(line_, col_, "closing '\"'");
            take();
            current_.k = token::kind::string;
            current_.text = std::move(s);
            return;
        }
        switch (c) {
        case '(': take(); current_.k = token::kind::lparen; return;
        case ')': take(); current_.k = token::kind::rparen; return;
        case '{': take(); current_.k = token::kind::lbrace; return;
        case '}': take(); current_.k = token::kind::rbrace; return;
        case ',': take(); current_.k = token::kind::comma; return;
        case '.': take(); current_.k = token::kind::period; return;
        case ';': take(); current_.k = token::kind::semicolon; return;
        case ':': take(); current_.k = token::kind::colon; return;
        case '=': take(); current_.k = token::kind::eq; return;
        case '<':
            take();
            if (pos_ < text_.size() && text_[pos_] == '-') {
                take();
                current_.k = token::kind::arrow;
                return;
            }
            throw syntax_error(line_, col_, "'<-'");
        case '!':
            take();
            if (pos_ < text_.size() && text_[pos_] == '=') {
                take();
                current_.k = token::kind::neq;
                return;
            }
            current_.k = token::kind::bang;
            return;
        default:
            throw syntax_error(line_, col_, "a token");
        }
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
    }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    std::string_view text_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
    token current_;
};

bool is_variable_name(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

void reject_reserved(const token& t) {
    if (!t.text.empty() && t.text[0] == '_')
        throw syntax_error(t.line, t.col, "a name not starting with '_' (reserved)");
}

term parse_term(lexer& lx, bool allow_variables) {
    token t = lx.peek();
    if (t.k == token::kind::string) {
        lx.next();
        if (t.text.empty()) throw syntax_error(t.line, t.col, "non-empty constant");
        return term::constant(t.text);
    }
    if (t.k == token::kind::number) {
        lx.next();
        return term::constant(t.text);
    }
    if (t.k == token::kind::ident) {
        lx.next();
        if (t.text == "null") return term::null();
        reject_reserved(t);
        if (is_variable_name(t.text)) {
            if (!allow_variables)
                throw syntax_error(t.line, t.col, "a constant or null (facts are ground)");
            return term::variable(t.text);
        }
        return term::constant(t.text);
    }
    throw syntax_error(t.line, t.col, "a term");
}

predicate_atom parse_predicate_atom(lexer& lx, bool allow_variables) {
    token name = lx.expect(token::kind::ident, "predicate name");
    reject_reserved(name);
    lx.expect(token::kind::lparen, "'('");
    predicate_atom a{name.text, {}};
    if (!lx.accept(token::kind::rparen)) {
        a.args.push_back(parse_term(lx, allow_variables));
        while (lx.accept(token::kind::comma)) a.args.push_back(parse_term(lx, allow_variables));
        lx.expect(token::kind::rparen, "')'");
    }
    return a;
}

rule parse_rule_body(lexer& lx, rule r);

query parse_nested_query(lexer& lx) {
    // exists { goal_rule ; rule ; ... } — the first rule's head is the goal
    program prog;
    bool first = true;
    predicate_atom goal;
    while (true) {
        std::optional<mode> m;
        token t = lx.peek();
        if (t.k == token::kind::ident && (t.text == "box" || t.text == "diamond")) {
            // lookahead: a mode prefix is ident ':'
            lexer probe = lx;
            probe.next();
            if (probe.peek().k == token::kind::colon) {
                m = t.text == "box" ? mode::box : mode::diamond;
                lx.next();
                lx.next();
            }
        }
        predicate_atom head = parse_predicate_atom(lx, true);
        if (lx.peek().k == token::kind::arrow) {
            lx.next();
            rule r;
            r.m = m;
            r.head = head;
            r = parse_rule_body(lx, std::move(r));
            if (first) goal = r.head;
            prog.rules.push_back(std::move(r));
        } else {
            if (!head.is_ground())
                throw syntax_error(lx.peek().line, lx.peek().col, "ground fact or '<-'");
            if (first) goal = head;
            prog.facts.insert(head);
        }
        first = false;
        if (!lx.accept(token::kind::semicolon)) break;
        if (lx.peek().k == token::kind::rbrace) break;
    }
    lx.expect(token::kind::rbrace, "'}'");
    if (first) throw syntax_error(lx.peek().line, lx.peek().col, "at least one rule in exists block");
    return query{goal, std::move(prog)};
}

literal parse_literal(lexer& lx) {
    bool positive = !lx.accept(token::kind::bang);
    token t = lx.peek();
    if (t.k != token::kind::ident) throw syntax_error(t.line, t.col, "a literal");

    if (t.text == "filter") {
        lx.next();
        lx.expect(token::kind::lparen, "'('");
        term lhs = parse_term(lx, true);
        bool eq;
        if (lx.accept(token::kind::eq))
            eq = true;
        else if (lx.accept(token::kind::neq))
            eq = false;
        else
            throw syntax_error(lx.peek().line, lx.peek().col, "'=' or '!='");
        term rhs = parse_term(lx, true);
        lx.expect(token::kind::rparen, "')'");
        // filter(a != b) is the negated equality literal
        if (!eq) positive = !positive;
        return literal{filter_atom{lhs, rhs}, positive};
    }
    if (t.text == "let") {
        if (!positive) throw syntax_error(t.line, t.col, "let literals cannot be negated");
        lx.next();
        lx.expect(token::kind::lparen, "'('");
        token var = lx.expect(token::kind::ident, "variable");
        reject_reserved(var);
        if (!is_variable_name(var.text)) throw syntax_error(var.line, var.col, "a variable");
        lx.expect(token::kind::eq, "'='");
        term value = parse_term(lx, false);
        lx.expect(token::kind::rparen, "')'");
        return literal{let_atom{var.text, value}, true};
    }
    if (t.text == "exists") {
        lx.next();
        lx.expect(token::kind::lbrace, "'{'");
        query nested = parse_nested_query(lx);
        return literal{nested_atom{std::make_shared<query>(std::move(nested))}, positive};
    }
    predicate_atom a = parse_predicate_atom(lx, true);
    return literal{std::move(a), positive};
}

rule parse_rule_body(lexer& lx, rule r) {
    r.body.push_back(parse_literal(lx));
    while (lx.accept(token::kind::comma)) r.body.push_back(parse_literal(lx));
    return r;
}

void check_head_vars(const predicate_atom& head, std::size_t line, std::size_t col) {
    for (const auto& t : head.args)
        if (!t.is_variable()) throw syntax_error(line, col, "all-variable head arguments");
}

} // namespace

database parse_facts(std::string_view text) {
    lexer lx(text);
    database db;
    while (lx.peek().k != token::kind::end) {
        predicate_atom a = parse_predicate_atom(lx, false);
        lx.expect(token::kind::period, "'.'");
        db.insert(std::move(a));
    }
    return db;
}

program parse_program(std::string_view text) {
    lexer lx(text);
    program prog;
    while (lx.peek().k != token::kind::end) {
        std::optional<mode> m;
        token t = lx.peek();
        if (t.k == token::kind::ident && (t.text == "box" || t.text == "diamond")) {
            lexer probe = lx;
            probe.next();
            if (probe.peek().k == token::kind::colon) {
                m = t.text == "box" ? mode::box : mode::diamond;
                lx.next();
                lx.next();
            }
        }
        token at = lx.peek();
        predicate_atom head = parse_predicate_atom(lx, true);
        if (lx.accept(token::kind::arrow)) {
            rule r;
            r.m = m;
            r.head = head;
            check_head_vars(head, at.line, at.col);
            r = parse_rule_body(lx, std::move(r));
            lx.expect(token::kind::period, "'.'");
            prog.rules.push_back(std::move(r));
        } else {
            lx.expect(token::kind::period, "'.'");
            if (m) throw syntax_error(at.line, at.col, "a rule after the mode prefix");
            if (!head.is_ground()) throw syntax_error(at.line, at.col, "ground fact");
            prog.facts.insert(std::move(head));
        }
    }
    check_mode_consistency(prog);
    return prog;
}

query parse_query(std::string_view program_text, std::string_view goal_text) {
    program prog = parse_program(program_text);

    lexer lx(goal_text);
    token name = lx.expect(token::kind::ident, "goal predicate");
    reject_reserved(name);
    predicate_atom goal{name.text, {}};
    if (lx.accept(token::kind::lparen)) {
        if (!lx.accept(token::kind::rparen)) {
            goal.args.push_back(parse_term(lx, true));
            while (lx.accept(token::kind::comma)) goal.args.push_back(parse_term(lx, true));
            lx.expect(token::kind::rparen, "')'");
        }
    } else {
        // bare name: adopt the arity the program uses
        std::size_t arity = 0;
        bool found = false;
        for (const auto& r : prog.rules)
            if (r.head.name == goal.name) {
                arity = r.head.args.size();
                found = true;
            }
        for (const auto& f : prog.facts)
            if (f.name == goal.name) {
                arity = f.args.size();
                found = true;
            }
        if (!found) throw error("goal predicate '" + goal.name + "' not found in the program");
        for (std::size_t i = 0; i < arity; ++i)
            goal.args.push_back(term::variable("X" + std::to_string(i + 1)));
    }
    query q{std::move(goal), std::move(prog)};
    validate_query(q);
    return q;
}

// --- algebra s-expressions ---------------------------------------------------

namespace {

struct sexpr_token {
    enum class kind { lparen, rparen, atom, string, end };
    kind k = kind::end;
    std::string text;
    std::size_t line = 1, col = 1;
};

class sexpr_lexer {
public:
    explicit sexpr_lexer(std::string_view text) : text_(text) { advance(); }

    const sexpr_token& peek() const { return current_; }
    sexpr_token next() {
        sexpr_token t = current_;
        advance();
        return t;
    }
    sexpr_token expect(sexpr_token::kind k, const std::string& what) {
        if (current_.k != k) throw syntax_error(current_.line, current_.col, what);
        return next();
    }

private:
    void advance() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
        current_ = sexpr_token{sexpr_token::kind::end, "", line_, col_};
        if (pos_ >= text_.size()) return;
        current_.line = line_;
        current_.col = col_;
        char c = text_[pos_];
        if (c == '(') {
            take();
            current_.k = sexpr_token::kind::lparen;
            return;
        }
        if (c == ')') {
            take();
            current_.k = sexpr_token::kind::rparen;
            return;
        }
        if (c == '"') {
            take();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char ch = take();
                if (ch == '\\' && pos_ < text_.size()) ch = take();
                s += ch;
            }
            if (pos_ >= text_.size()) throw syntax_error(line_, col_, "closing '\"'");
            take();
            current_.k = sexpr_token::kind::string;
            current_.text = std::move(s);
            return;
        }
        std::string atom;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
               text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '#')
            atom += take();
        if (atom.empty()) throw syntax_error(line_, col_, "a token");
        current_.k = sexpr_token::kind::atom;
        current_.text = std::move(atom);
    }

    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    std::string_view text_;
    std::size_t pos_ = 0, line_ = 1, col_ = 1;
    sexpr_token current_;
};

class algebra_parser {
public:
    explicit algebra_parser(std::string_view text) : lx_(text) {}

    algebra_expr parse() {
        if (lx_.peek().k == sexpr_token::kind::lparen) {
            // optional (schema (rel A B) ...) header
            sexpr_lexer probe = lx_;
            probe.next();
            if (probe.peek().k == sexpr_token::kind::atom && probe.peek().text == "schema") {
                lx_.next();
                lx_.next();
                while (lx_.peek().k == sexpr_token::kind::lparen) parse_schema_decl();
                lx_.expect(sexpr_token::kind::rparen, "')'");
            }
        }
        algebra_expr e = parse_expr();
        if (lx_.peek().k != sexpr_token::kind::end)
            throw syntax_error(lx_.peek().line, lx_.peek().col, "end of input after the expression");
        check_schema(e);
        return e;
    }

private:
    void parse_schema_decl() {
        lx_.next(); // '('
        sexpr_token name = lx_.expect(sexpr_token::kind::atom, "relation name");
        std::vector<std::string> attrs;
        while (lx_.peek().k == sexpr_token::kind::atom) {
            sexpr_token a = lx_.next();
            if (!std::isupper(static_cast<unsigned char>(a.text[0])))
                throw syntax_error(a.line, a.col, "an uppercase attribute name");
            attrs.push_back(a.text);
        }
        lx_.expect(sexpr_token::kind::rparen, "')'");
        schemas_[name.text] = std::move(attrs);
    }

    term parse_arg() {
        sexpr_token t = lx_.next();
        if (t.k == sexpr_token::kind::string) {
            if (t.text.empty()) throw syntax_error(t.line, t.col, "non-empty constant");
            return term::constant(t.text);
        }
        if (t.k != sexpr_token::kind::atom) throw syntax_error(t.line, t.col, "an argument");
        if (t.text == "null") return term::null();
        if (t.text[0] == '_') throw syntax_error(t.line, t.col, "a name not starting with '_'");
        if (std::isupper(static_cast<unsigned char>(t.text[0]))) return term::variable(t.text);
        return term::constant(t.text);
    }

    std::string parse_attr() {
        sexpr_token t = lx_.expect(sexpr_token::kind::atom, "attribute name");
        if (!std::isupper(static_cast<unsigned char>(t.text[0])))
            throw syntax_error(t.line, t.col, "an uppercase attribute name");
        return t.text;
    }

    algebra_expr parse_expr() {
        sexpr_token t = lx_.peek();
        if (t.k == sexpr_token::kind::atom) {
            lx_.next();
            auto it = schemas_.find(t.text);
            if (it == schemas_.end()) throw unknown_relation_error(t.text);
            base_node b{t.text, {}};
            for (const auto& a : it->second) b.args.push_back(term::variable(a));
            return algebra_expr{std::move(b)};
        }
        lx_.expect(sexpr_token::kind::lparen, "'('");
        sexpr_token head = lx_.expect(sexpr_token::kind::atom, "operator or relation name");

        if (head.text == "select-box") {
            lx_.expect(sexpr_token::kind::lparen, "'('");
            sexpr_token op = lx_.expect(sexpr_token::kind::atom, "'=' or '!='");
            if (op.text != "=" && op.text != "!=") throw syntax_error(op.line, op.col, "'=' or '!='");
            term lhs = parse_arg();
            term rhs = parse_arg();
            lx_.expect(sexpr_token::kind::rparen, "')'");
            auto child = parse_expr();
            lx_.expect(sexpr_token::kind::rparen, "')'");
            return algebra_expr{select_node{lhs, op.text == "=", rhs, make_expr(child.node)}};
        }
        if (head.text == "project") {
            lx_.expect(sexpr_token::kind::lparen, "'('");
            std::vector<std::string> attrs;
            while (lx_.peek().k == sexpr_token::kind::atom) attrs.push_back(parse_attr());
            lx_.expect(sexpr_token::kind::rparen, "')'");
            auto child = parse_expr();
            lx_.expect(sexpr_token::kind::rparen, "')'");
            return algebra_expr{project_node{std::move(attrs), make_expr(child.node)}};
        }
        if (head.text == "rename") {
            std::string from = parse_attr();
            std::string to = parse_attr();
            auto child = parse_expr();
            lx_.expect(sexpr_token::kind::rparen, "')'");
            return algebra_expr{rename_node{from, to, make_expr(child.node)}};
        }
        if (head.text == "union" || head.text == "join" || head.text == "minus" ||
            head.text == "left-outer-join") {
            auto left = make_expr(parse_expr().node);
            auto right = make_expr(parse_expr().node);
            lx_.expect(sexpr_token::kind::rparen, "')'");
            if (head.text == "union") return algebra_expr{union_node{left, right}};
            if (head.text == "join") return algebra_expr{join_node{left, right}};
            if (head.text == "minus") return algebra_expr{minus_node{left, right}};
            return algebra_expr{left_outer_join_node{left, right}};
        }
        if (head.text == "exists" || head.text == "not-exists") {
            auto inner = make_expr(parse_expr().node);
            auto outer = make_expr(parse_expr().node);
            lx_.expect(sexpr_token::kind::rparen, "')'");
            return algebra_expr{exists_node{inner, head.text == "not-exists", outer}};
        }
        if (head.text == "schema")
            throw syntax_error(head.line, head.col, "schema only at the start of the file");

        // relation pattern: (name arg ...)
        if (head.text[0] == '_') throw syntax_error(head.line, head.col, "a name not starting with '_'");
        base_node b{head.text, {}};
        while (lx_.peek().k != sexpr_token::kind::rparen) b.args.push_back(parse_arg());
        lx_.expect(sexpr_token::kind::rparen, "')'");
        if (!schemas_.contains(head.text)) {
            std::vector<std::string> attrs;
            for (const auto& a : b.args)
                if (a.is_variable()) attrs.push_back(a.text());
            schemas_[head.text] = std::move(attrs);
        }
        return algebra_expr{std::move(b)};
    }

    sexpr_lexer lx_;
    std::map<std::string, std::vector<std::string>> schemas_;
};

} // namespace

algebra_expr parse_algebra(std::string_view text) {
    algebra_parser p(text);
    return p.parse();
}

} // namespace nulldl
