#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nulldl {

// Base class for all user-facing errors (CLI exit code 1).
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariant (CLI exit code 2).
class internal_error : public std::runtime_error {
public:
    explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

class syntax_error : public error {
public:
    syntax_error(std::size_t line, std::size_t column, const std::string& expected)
        : error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) +
                ": expected " + expected),
          line_(line), column_(column), expected_(expected) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t line_, column_;
    std::string expected_;
};

class recursive_program_error : public error {
public:
    explicit recursive_program_error(const std::string& predicate)
        : error("recursive program: dependency cycle through predicate '" + predicate + "'") {}
};

class safety_error : public error {
public:
    explicit safety_error(const std::string& head, const std::vector<std::string>& vars)
        : error(make_message(head, vars)), variables_(vars) {}

    const std::vector<std::string>& variables() const { return variables_; }

private:
    static std::string make_message(const std::string& head, const std::vector<std::string>& vars) {
        std::string msg = "unsafe rule with head '" + head + "': variables not occurring positively:";
        for (const auto& v : vars) msg += " " + v;
        return msg;
    }
    std::vector<std::string> variables_;
};

class unbound_builtin_error : public error {
public:
    explicit unbound_builtin_error(const std::string& detail)
        : error("unbound variable in built-in literal: " + detail) {}
};

class mixed_modes_error : public error {
public:
    mixed_modes_error() : error("program mixes modal and plain rules") {}
};

class let_not_found_error : public error {
public:
    let_not_found_error() : error("no let literal at the given position") {}
};

class nothing_below_error : public error {
public:
    explicit nothing_below_error(const std::string& var)
        : error("let on '" + var + "' touches only extensional predicates; nothing below") {}
};

class variable_absent_error : public error {
public:
    explicit variable_absent_error(const std::string& var)
        : error("variable '" + var + "' does not occur in the anchor rule") {}
};

class too_many_nulls_error : public error {
public:
    explicit too_many_nulls_error(std::size_t count, std::size_t limit)
        : error("database has " + std::to_string(count) + " null occurrences; world enumeration capped at " +
                std::to_string(limit)) {}
};

class unknown_relation_error : public error {
public:
    explicit unknown_relation_error(const std::string& name)
        : error("unknown relation '" + name + "'") {}
};

class schema_mismatch_error : public error {
public:
    explicit schema_mismatch_error(const std::string& detail)
        : error("schema mismatch: " + detail) {}
};

class transformation_limit_error : public error {
public:
    explicit transformation_limit_error(std::size_t count)
        : error("program exceeds " + std::to_string(count) + " rules after subtree copying") {}
};

} // namespace nulldl
