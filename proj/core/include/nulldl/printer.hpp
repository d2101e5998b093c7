#pragma once

#include <set>
#include <string>
#include <vector>

#include "nulldl/algebra.hpp"
#include "nulldl/ast.hpp"

namespace nulldl {

// Source-form printing; parse(print(x)) == x up to whitespace.
std::string print_term_source(const term& t); // `null` for ⊥, quoting as needed
std::string print_literal(const literal& l);
std::string print_rule(const rule& r);
std::string print_program(const program& p);
std::string print_facts(const database& db);
std::string print_algebra(const algebra_expr& e);

// Result rendering. Rows are sorted lexicographically (⊥ after constants).
struct result_table {
    std::vector<std::string> columns;
    std::vector<std::vector<term>> rows;
};

result_table to_table(const std::vector<std::string>& columns, const std::set<std::vector<term>>& rows);
result_table answers_to_table(const std::set<fact>& answers, const std::vector<std::string>& columns);

// Plain text table; `⊥` for nulls. Honors use_color=false (NO_COLOR).
std::string render_table(const result_table& t, bool use_color = false);

// {"columns": [...], "rows": [[...]]} with JSON null for ⊥; keys in fixed
// order, rows sorted.
std::string render_json(const result_table& t);

} // namespace nulldl
