#include "nulldl/profiles.hpp"

#include <algorithm>
#include <ostream>

#include "nulldl/analysis.hpp"
#include "nulldl/errors.hpp"
#include "nulldl/modal.hpp"
#include "nulldl/placement.hpp"

namespace nulldl {

semantics_profile profile_preset(const std::string& name) {
    semantics_profile p;
    p.name = name;
    if (name == "fuseki") {
        p.free_vars = free_var_policy::decorrelate;
        p.improper_substitution = true;
        p.points = point_preset::leaves;
    } else if (name == "blazegraph") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = true;
        p.points = point_preset::leaves;
    } else if (name == "virtuoso") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::leaves_plus_top;
    } else if (name == "rdf4j") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::mid;
    } else if (name == "spec-top-down" || name == "top") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::top;
    } else if (name == "spec-bottom-up") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::leaves_pure;
    } else if (name == "mid") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::mid;
    } else if (name == "leaves") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::leaves;
    } else if (name == "leaves-plus-top") {
        p.free_vars = free_var_policy::correlate;
        p.improper_substitution = false;
        p.points = point_preset::leaves_plus_top;
    } else {
        throw error("unknown profile '" + name + "'");
    }
    return p;
}

std::vector<std::string> profile_preset_names() {
    return {"fuseki",        "blazegraph", "virtuoso", "rdf4j",  "spec-top-down",
            "spec-bottom-up", "top",        "mid",      "leaves", "leaves-plus-top"};
}

namespace {

point_preset effective_points(const semantics_profile& p) { return p.points; }

placement_request::level to_level(point_preset p) {
    switch (p) {
    case point_preset::top: return placement_request::level::top;
    case point_preset::mid: return placement_request::level::mid;
    case point_preset::leaves: return placement_request::level::leaves;
    case point_preset::leaves_pure: return placement_request::level::leaves_pure;
    case point_preset::leaves_plus_top: return placement_request::level::leaves_plus_top;
    case point_preset::explicit_points: return placement_request::level::at_points;
    }
    return placement_request::level::top;
}

// Variable names occurring anywhere in the program's rules.
std::set<std::string> program_variables(const program& p) {
    std::set<std::string> out;
    for (const auto& r : p.rules) {
        auto vars = rule_variables(r);
        out.insert(vars.begin(), vars.end());
    }
    return out;
}

} // namespace

exists_translation translate_exists(const algebra_expr& outer, const algebra_expr& inner,
                                    bool negated, const semantics_profile& profile,
                                    const translation_options& topts) {
    (void)profile; // the rule shape is profile independent; θ(Q) is not
    exists_translation out;

    query outer_q = translate_algebra(outer, topts);
    query inner_q = translate_algebra(inner, topts);
    out.outer_attrs.clear();
    for (const auto& t : outer_q.goal.args)
        if (t.is_variable()) out.outer_attrs.push_back(t.text());
    out.inner = inner_q;

    // □(p(Tr) <- r(Tr), (L,P)) with the inner query as a built-in atom
    fresh_name_gen gen("_e");
    predicate_atom head{gen.next(), outer_q.goal.args};
    rule filter_rule;
    filter_rule.m = mode::box;
    filter_rule.head = head;
    filter_rule.body.push_back(literal{outer_q.goal, true});
    filter_rule.body.push_back(literal{nested_atom{std::make_shared<query>(inner_q)}, negated});

    out.q.goal = head;
    out.q.prog = outer_q.prog;
    out.q.prog.rules.push_back(std::move(filter_rule));

    auto goal_vars = goal_variables(inner_q);
    auto free = all_free_variables(inner_q);
    auto vars = program_variables(inner_q.prog);
    for (const auto& a : out.outer_attrs) {
        if (goal_vars.contains(a))
            out.correlated_goal_vars.push_back(a);
        else if (free.contains(a))
            out.correlated_free_vars.push_back(a);
        else if (vars.contains(a))
            out.correlated_other_vars.push_back(a);
    }
    return out;
}

query apply_profile_substitution(const substitution& theta, const query& inner,
                                 const std::vector<std::string>& outer_attrs,
                                 const semantics_profile& profile, std::ostream* trace) {
    query work = inner;

    std::set<std::string> attr_set(outer_attrs.begin(), outer_attrs.end());
    auto goal_vars = goal_variables(work);
    auto free = all_free_variables(work);

    // 1. free-variable policy
    substitution free_theta;
    for (const auto& [var, value] : theta) {
        if (!attr_set.contains(var) || !free.contains(var)) continue;
        free_theta.emplace(var, profile.free_vars == free_var_policy::decorrelate ? term::null()
                                                                                  : value);
    }
    if (!free_theta.empty()) {
        if (trace) {
            *trace << "  syntactic substitution:";
            for (const auto& [v, t] : free_theta) *trace << " " << v << "=" << t.to_string();
            *trace << "\n";
        }
        work.prog = substitute_syntactic(free_theta, work.prog);
    }

    // 2. improper substitution of correlated names that are neither free nor
    //    goal connected, anchored where they are instantiated extensionally
    if (profile.improper_substitution) {
        std::set<std::string> candidates;
        for (const auto& [var, value] : theta) {
            if (!attr_set.contains(var)) continue;
            if (goal_vars.contains(var) || free.contains(var)) continue;
            if (program_variables(work.prog).contains(var)) candidates.insert(var);
        }
        for (const auto& var : candidates) {
            bool progress = true;
            while (progress) {
                progress = false;
                auto intensional = intensional_predicates(work.prog);
                for (std::size_t ri = 0; ri < work.prog.rules.size(); ++ri) {
                    const rule& r = work.prog.rules[ri];
                    bool anchored = false;
                    bool already = false;
                    for (const auto& l : r.body) {
                        if (const auto* la = std::get_if<let_atom>(&l.a))
                            if (la->var == var) already = true;
                        if (!l.positive) continue;
                        const auto* pa = std::get_if<predicate_atom>(&l.a);
                        if (!pa || intensional.contains(pa->name)) continue;
                        for (const auto& t : pa->args)
                            if (t.is_variable() && t.text() == var) anchored = true;
                    }
                    if (!anchored || already) continue;
                    if (trace)
                        *trace << "  improper substitution of " << var << " at rule " << ri << "\n";
                    substitution one{{var, theta.at(var)}};
                    work = substitute_improper(one, work, ri, var);
                    progress = true;
                    break;
                }
            }
        }
    }

    // 3. goal variables at the profile's substitution points. Lets already in
    //    the program are desugared first so chains can pass through them.
    substitution goal_theta;
    for (const auto& [var, value] : theta)
        if (attr_set.contains(var) && goal_vars.contains(var)) goal_theta.emplace(var, value);

    fresh_name_gen pad_gen("_p");
    work.prog = desugar_all_lets(work.prog, pad_gen);

    placement_request req;
    req.goal_lets = goal_theta;
    // Rule-less inner queries (bare patterns) still live in the modal world:
    // wrappers must merge, not match exactly.
    req.modal = work.prog.rules.empty() || is_modal(work.prog);
    req.lvl = to_level(effective_points(profile));
    req.points = profile.explicit_pts;
    fresh_name_gen wrap_gen("_w");
    return place_goal_lets(work, req, wrap_gen, trace);
}

namespace {

substitution tuple_to_theta(const relation& outer, const std::vector<term>& tuple) {
    substitution theta;
    for (std::size_t i = 0; i < outer.attrs.size(); ++i) theta.emplace(outer.attrs[i], tuple[i]);
    return theta;
}

bool inner_nonempty(const substitution& theta, const query& inner,
                    const std::vector<std::string>& outer_attrs, const semantics_profile& profile,
                    const database& db, std::ostream* trace) {
    query themed = apply_profile_substitution(theta, inner, outer_attrs, profile, trace);
    fresh_name_gen iso("_n");
    themed = isolate_intensional(themed, iso);

    modal_eval_options opts;
    opts.on_nested = make_modal_nested_handler(profile);
    if (themed.prog.rules.empty())
        return !fact_store(db).facts(themed.goal.name).empty();
    if (is_plain(themed.prog))
        return !answer(themed, db).empty();
    return !modal_answer(themed, db, opts).empty();
}

} // namespace

relation eval_exists_filter(const relation& outer, const algebra_expr& inner, bool negated,
                            const semantics_profile& profile, const database& db,
                            const translation_options& topts, std::ostream* trace) {
    query inner_q = translate_algebra(inner, topts);

    relation out;
    out.attrs = outer.attrs;
    for (const auto& tuple : outer.tuples) {
        substitution theta = tuple_to_theta(outer, tuple);
        if (trace) {
            *trace << "exists check for tuple (";
            for (std::size_t i = 0; i < tuple.size(); ++i)
                *trace << (i ? ", " : "") << tuple[i].to_string();
            *trace << ") under profile " << profile.name << "\n";
        }
        bool nonempty = inner_nonempty(theta, inner_q, outer.attrs, profile, db, trace);
        if (nonempty != negated) out.tuples.insert(tuple);
    }
    return out;
}

nested_handler make_modal_nested_handler(semantics_profile profile) {
    return [profile](const database& db, const substitution& theta, const query& nested,
                     bool positive) {
        std::vector<std::string> attrs;
        for (const auto& [var, _] : theta) attrs.push_back(var);
        bool nonempty = inner_nonempty(theta, nested, attrs, profile, db, nullptr);
        return positive ? nonempty : !nonempty;
    };
}

namespace {

std::vector<semantics_profile> knob_variants(const semantics_profile& p) {
    std::vector<semantics_profile> out;
    {
        semantics_profile v = p;
        v.free_vars = p.free_vars == free_var_policy::correlate ? free_var_policy::decorrelate
                                                                : free_var_policy::correlate;
        v.name = "free_var_policy";
        out.push_back(v);
    }
    {
        semantics_profile v = p;
        v.improper_substitution = !p.improper_substitution;
        v.name = "improper_substitution";
        out.push_back(v);
    }
    for (point_preset alt : {point_preset::top, point_preset::mid, point_preset::leaves,
                             point_preset::leaves_pure, point_preset::leaves_plus_top}) {
        if (alt == p.points) continue;
        semantics_profile v = p;
        v.points = alt;
        v.name = "substitution_points";
        out.push_back(v);
    }
    return out;
}

} // namespace

profile_comparison compare_profiles(const algebra_expr& e, const database& db,
                                    const std::vector<semantics_profile>& profiles,
                                    const translation_options& topts) {
    profile_comparison out;
    for (const auto& p : profiles) out.profile_names.push_back(p.name);

    std::set<std::vector<term>> tuple_set;
    for (const auto& p : profiles) {
        relation r = eval_algebra(e, db, p, topts);
        out.attrs = r.attrs;
        for (const auto& t : r.tuples) tuple_set.insert(t);
        out.results.emplace(p.name, std::move(r));
    }
    out.all_tuples.assign(tuple_set.begin(), tuple_set.end());

    for (const auto& tuple : out.all_tuples) {
        profile_disagreement d;
        d.tuple = tuple;
        bool any = false, all = true;
        for (const auto& p : profiles) {
            bool kept = out.results.at(p.name).tuples.contains(tuple);
            d.kept_by[p.name] = kept;
            any = any || kept;
            all = all && kept;
        }
        if (any && !all) {
            out.all_agree = false;
            // attribute: which knob flips each profile's outcome on the tuple
            for (const auto& p : profiles) {
                bool baseline = d.kept_by.at(p.name);
                for (const auto& variant : knob_variants(p)) {
                    relation r = eval_algebra(e, db, variant, topts);
                    bool flipped = r.tuples.contains(tuple) != baseline;
                    if (flipped) d.flip_knobs[p.name].insert(variant.name);
                }
            }
            out.disagreements.push_back(std::move(d));
        }
    }
    return out;
}

} // namespace nulldl
