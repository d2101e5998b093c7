#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nulldl/ast.hpp"

namespace nulldl {

// Ground facts indexed by predicate name. Immutable once a stratum is sealed;
// evaluators own their store, callers receive copies or const views.
class fact_store {
public:
    fact_store() = default;
    explicit fact_store(const database& db) {
        for (const auto& f : db) insert(f);
    }

    bool insert(fact f) {
        return by_pred_[f.name].insert(std::move(f.args)).second;
    }

    bool contains(const fact& f) const {
        auto it = by_pred_.find(f.name);
        return it != by_pred_.end() && it->second.contains(f.args);
    }

    static const std::set<std::vector<term>>& empty_tuples() {
        static const std::set<std::vector<term>> none;
        return none;
    }

    const std::set<std::vector<term>>& tuples(const std::string& pred) const {
        auto it = by_pred_.find(pred);
        return it == by_pred_.end() ? empty_tuples() : it->second;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [_, tuples] : by_pred_) n += tuples.size();
        return n;
    }

    std::set<fact> facts(const std::string& pred) const {
        std::set<fact> out;
        for (const auto& args : tuples(pred)) out.insert({pred, args});
        return out;
    }

    database to_database() const {
        database out;
        for (const auto& [pred, tuples] : by_pred_)
            for (const auto& args : tuples) out.insert({pred, args});
        return out;
    }

private:
    std::map<std::string, std::set<std::vector<term>>> by_pred_;
};

} // namespace nulldl
