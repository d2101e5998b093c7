#include "nulldl/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "nulldl/algebra.hpp"
#include "nulldl/errors.hpp"
#include "nulldl/eval.hpp"
#include "nulldl/modal.hpp"
#include "nulldl/nesting.hpp"
#include "nulldl/parser.hpp"
#include "nulldl/printer.hpp"
#include "nulldl/profiles.hpp"
#include "nulldl/worlds.hpp"

namespace nulldl {

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool color_enabled() { return std::getenv("NO_COLOR") == nullptr; }

substitution_strategy parse_strategy(const std::string& text) {
    if (text.empty() || text == "top-down") return substitution_strategy::top_down();
    if (text == "bottom-up") return substitution_strategy::bottom_up();
    if (text == "syntactic") return substitution_strategy::syntactic();
    if (text.rfind("points=", 0) == 0) {
        std::vector<substitution_point> pts;
        std::string rest = text.substr(7);
        std::istringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw error("--strategy points expects rule:literal pairs, got '" + item + "'");
            pts.push_back({std::stoul(item.substr(0, colon)), std::stoul(item.substr(colon + 1))});
        }
        return substitution_strategy::at_points(std::move(pts));
    }
    throw error("unknown strategy '" + text + "' (top-down, bottom-up, syntactic, points=r:l,...)");
}

semantics_profile strategy_profile(const std::string& text) {
    if (text.empty() || text == "top-down") return profile_preset("spec-top-down");
    if (text == "bottom-up") return profile_preset("spec-bottom-up");
    if (text.rfind("points=", 0) == 0) {
        semantics_profile p = profile_preset("spec-top-down");
        p.points = point_preset::explicit_points;
        p.name = text;
        auto strat = parse_strategy(text);
        p.explicit_pts = strat.points;
        return p;
    }
    return profile_preset(text);
}

void emit(std::ostream& out, const result_table& table, const std::string& format) {
    if (format == "json")
        out << render_json(table) << "\n";
    else
        out << render_table(table, color_enabled());
}

std::vector<std::string> goal_columns(const query& q) {
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < q.goal.args.size(); ++i) {
        const term& t = q.goal.args[i];
        cols.push_back(t.is_variable() ? t.text() : "c" + std::to_string(i + 1));
    }
    return cols;
}

int cmd_eval(const std::string& program_path, const std::string& facts_path,
             const std::string& goal, bool modal, const std::string& strategy,
             const std::string& format, bool trace, std::ostream& out, std::ostream& err) {
    query q = parse_query(slurp(program_path), goal);
    database db = parse_facts(slurp(facts_path));

    bool has_modes = !q.prog.rules.empty() && is_modal(q.prog);
    if (modal && !has_modes && !q.prog.rules.empty())
        throw error("--modal requires box:/diamond: modes on every rule");

    std::set<fact> answers;
    if (has_modes) {
        modal_eval_options opts;
        opts.on_nested = make_modal_nested_handler(strategy_profile(strategy));
        if (trace) opts.trace = &err;
        answers = modal_answer(q, db, opts);
    } else {
        eval_options opts;
        opts.on_nested = make_nested_handler(parse_strategy(strategy));
        if (trace) opts.trace = &err;
        answers = answer(q, db, opts);
    }
    emit(out, answers_to_table(answers, goal_columns(q)), format);
    return 0;
}

int cmd_algebra(const std::string& expr_path, const std::string& facts_path,
                const std::string& profile_name, bool paper_rename, const std::string& format,
                bool trace, std::ostream& out, std::ostream& err) {
    algebra_expr e = parse_algebra(slurp(expr_path));
    database db = parse_facts(slurp(facts_path));
    semantics_profile profile = profile_preset(profile_name);
    translation_options topts{paper_rename};

    // exists nodes evaluate through the profile; trace plumbs the placements
    relation result;
    if (const auto* x = std::get_if<exists_node>(&e.node); x && trace) {
        relation outer = eval_algebra(*x->outer, db, profile);
        result = eval_exists_filter(outer, *x->inner, x->negated, profile, db, topts, &err);
    } else {
        result = eval_algebra(e, db, profile);
    }
    emit(out, to_table(result.attrs, result.tuples), format);
    return 0;
}

int cmd_translate(const std::string& expr_path, bool paper_rename, std::ostream& out) {
    algebra_expr e = parse_algebra(slurp(expr_path));
    query q = translate_algebra(e, {paper_rename});
    out << "# goal: " << print_literal(literal{q.goal, true}) << "\n";
    out << print_program(q.prog);
    return 0;
}

int cmd_compare(const std::string& expr_path, const std::string& facts_path,
                const std::string& profiles_csv, bool paper_rename, const std::string& format,
                std::ostream& out) {
    algebra_expr e = parse_algebra(slurp(expr_path));
    database db = parse_facts(slurp(facts_path));

    std::vector<semantics_profile> profiles;
    std::istringstream ss(profiles_csv);
    std::string name;
    while (std::getline(ss, name, ',')) profiles.push_back(profile_preset(name));
    if (profiles.empty()) throw error("--profiles expects a comma-separated list");

    profile_comparison cmp = compare_profiles(e, db, profiles, {paper_rename});

    if (format == "json") {
        nlohmann::ordered_json j;
        j["columns"] = cmp.attrs;
        j["profiles"] = cmp.profile_names;
        nlohmann::ordered_json results = nlohmann::ordered_json::object();
        for (const auto& pname : cmp.profile_names) {
            nlohmann::ordered_json rows = nlohmann::ordered_json::array();
            for (const auto& row : cmp.results.at(pname).tuples) {
                nlohmann::ordered_json r = nlohmann::ordered_json::array();
                for (const auto& v : row)
                    v.is_null() ? r.push_back(nullptr) : r.push_back(v.text());
                rows.push_back(std::move(r));
            }
            results[pname] = std::move(rows);
        }
        j["results"] = std::move(results);
        nlohmann::ordered_json dis = nlohmann::ordered_json::array();
        for (const auto& d : cmp.disagreements) {
            nlohmann::ordered_json item;
            nlohmann::ordered_json tup = nlohmann::ordered_json::array();
            for (const auto& v : d.tuple) v.is_null() ? tup.push_back(nullptr) : tup.push_back(v.text());
            item["tuple"] = std::move(tup);
            item["kept"] = d.kept_by;
            nlohmann::ordered_json knobs = nlohmann::ordered_json::object();
            for (const auto& [p, ks] : d.flip_knobs) knobs[p] = ks;
            item["flip_knobs"] = std::move(knobs);
            dis.push_back(std::move(item));
        }
        j["disagreements"] = std::move(dis);
        j["all_agree"] = cmp.all_agree;
        out << j.dump() << "\n";
        return 0;
    }

    // table: one row per tuple, one column per profile
    result_table t;
    t.columns = cmp.attrs;
    for (const auto& pname : cmp.profile_names) t.columns.push_back(pname);
    for (const auto& tuple : cmp.all_tuples) {
        std::vector<term> row = tuple;
        for (const auto& pname : cmp.profile_names)
            row.push_back(term::constant(cmp.results.at(pname).tuples.contains(tuple) ? "yes" : "no"));
        t.rows.push_back(std::move(row));
    }
    out << render_table(t, color_enabled());
    for (const auto& d : cmp.disagreements) {
        out << "disagreement on (";
        for (std::size_t i = 0; i < d.tuple.size(); ++i)
            out << (i ? ", " : "") << d.tuple[i].to_string();
        out << "):";
        for (const auto& [p, ks] : d.flip_knobs) {
            out << " " << p << "[";
            bool first = true;
            for (const auto& k : ks) {
                out << (first ? "" : ",") << k;
                first = false;
            }
            out << "]";
        }
        out << "\n";
    }
    return 0;
}

int cmd_oracle(const std::string& check, const std::string& facts_path, const std::string& op,
               const std::string& left, const std::string& right, const std::string& condition,
               const std::string& format, std::ostream& out) {
    if (check == "literal") {
        // exhaustive agreement of the modal equality and negative-predicate
        // bullets with the possible-worlds oracle over {a, b, ⊥}
        std::set<std::string> domain{"a", "b", "_w0"};
        std::vector<term> ground{term::constant("a"), term::constant("b"), term::null()};
        std::size_t checks = 0, failures = 0;
        for (const auto& l : ground) {
            for (const auto& r : ground) {
                ++checks;
                if (modal_term_eq(mode::box, l, r) != oracle_sure_eq(l, r, domain)) ++failures;
                ++checks;
                if (modal_term_eq(mode::diamond, l, r) != oracle_maybe_eq(l, r, domain)) ++failures;
            }
        }
        result_table t;
        t.columns = {"checks", "failures"};
        t.rows = {{term::constant(std::to_string(checks)), term::constant(std::to_string(failures))}};
        emit(out, t, format);
        return failures == 0 ? 0 : 1;
    }
    if (check != "operator") throw error("--check expects 'literal' or 'operator'");

    database db = parse_facts(slurp(facts_path));
    auto load_rel = [&](const std::string& name) {
        std::size_t arity = 0;
        for (const auto& f : db)
            if (f.name == name) arity = f.args.size();
        base_node b{name, {}};
        for (std::size_t i = 0; i < arity; ++i) b.args.push_back(term::variable("A" + std::to_string(i + 1)));
        return eval_algebra(algebra_expr{b}, db, profile_preset("spec-top-down"));
    };
    world_space space = make_world_space(db, 1);

    operator_check_report report;
    if (op == "join-diamond")
        report = check_operator_against_oracle(checked_operator::join_diamond, load_rel(left),
                                               load_rel(right), space.domain);
    else if (op == "minus-box")
        report = check_operator_against_oracle(checked_operator::minus_box, load_rel(left),
                                               load_rel(right), space.domain);
    else if (op == "select-box") {
        algebra_expr cond = parse_algebra("(select-box " + condition + " (" + left + "))");
        const auto& sel = std::get<select_node>(cond.node);
        report = check_select_against_oracle(load_rel(left), sel.lhs, sel.equal, sel.rhs, space.domain);
    } else {
        throw error("--op expects join-diamond, minus-box or select-box");
    }

    result_table t;
    t.columns = {"decisions", "disagreements"};
    t.rows = {{term::constant(std::to_string(report.decisions)),
               term::constant(std::to_string(report.disagreements))}};
    emit(out, t, format);
    return report.ok() ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"deductive-database laboratory for FILTER EXISTS semantics over nulls"};
    app.require_subcommand(1);

    std::string program_path, facts_path, goal, expr_path, profile = "spec-top-down";
    std::string strategy, profiles_csv, format = "table";
    std::string check, op, left, right, condition;
    bool modal = false, trace = false, paper_rename = false;

    auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"table", "json"}));
        cmd->add_flag("--trace", trace, "print per-stratum derivations and substitution placements");
    };

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a query over a facts file");
    eval_cmd->add_option("--program", program_path, "program file")->required();
    eval_cmd->add_option("--facts", facts_path, "facts file")->required();
    eval_cmd->add_option("--goal", goal, "goal predicate or atom")->required();
    eval_cmd->add_flag("--modal", modal, "require modal rules");
    eval_cmd->add_option("--strategy", strategy, "nested substitution strategy");
    add_format(eval_cmd);

    auto* algebra_cmd = app.add_subcommand("algebra", "evaluate an algebra expression");
    algebra_cmd->add_option("--expr", expr_path, "expression file")->required();
    algebra_cmd->add_option("--facts", facts_path, "facts file")->required();
    algebra_cmd->add_option("--profile", profile, "semantics profile for exists filters");
    algebra_cmd->add_flag("--paper-rename", paper_rename, "use the verbatim rename rule");
    add_format(algebra_cmd);

    auto* translate_cmd = app.add_subcommand("translate", "print the modal rules for an expression");
    translate_cmd->add_option("--expr", expr_path, "expression file")->required();
    translate_cmd->add_flag("--paper-rename", paper_rename, "use the verbatim rename rule");
    add_format(translate_cmd);

    auto* compare_cmd = app.add_subcommand("compare", "evaluate under several profiles");
    compare_cmd->add_option("--expr", expr_path, "expression file")->required();
    compare_cmd->add_option("--facts", facts_path, "facts file")->required();
    compare_cmd->add_option("--profiles", profiles_csv, "comma-separated profile names")->required();
    compare_cmd->add_flag("--paper-rename", paper_rename, "use the verbatim rename rule");
    add_format(compare_cmd);

    auto* oracle_cmd = app.add_subcommand("oracle", "check decisions against the possible-worlds oracle");
    oracle_cmd->add_option("--check", check, "literal or operator")->required();
    oracle_cmd->add_option("--facts", facts_path, "facts file (operator checks)");
    oracle_cmd->add_option("--op", op, "join-diamond, minus-box or select-box");
    oracle_cmd->add_option("--left", left, "left relation name");
    oracle_cmd->add_option("--right", right, "right relation name");
    oracle_cmd->add_option("--condition", condition, "condition for select-box, e.g. '(= A1 \"a\")'");
    add_format(oracle_cmd);

    std::vector<std::string> argv = args;
    try {
        std::vector<const char*> cargv;
        cargv.push_back("nulldl");
        for (const auto& a : argv) cargv.push_back(a.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (app.got_subcommand(eval_cmd))
            return cmd_eval(program_path, facts_path, goal, modal, strategy, format, trace, out, err);
        if (app.got_subcommand(algebra_cmd))
            return cmd_algebra(expr_path, facts_path, profile, paper_rename, format, trace, out, err);
        if (app.got_subcommand(translate_cmd)) return cmd_translate(expr_path, paper_rename, out);
        if (app.got_subcommand(compare_cmd))
            return cmd_compare(expr_path, facts_path, profiles_csv, paper_rename, format, out);
        if (app.got_subcommand(oracle_cmd))
            return cmd_oracle(check, facts_path, op, left, right, condition, format, out);
        err << "error: no subcommand\n";
        return 1;
    } catch (const internal_error& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace nulldl
