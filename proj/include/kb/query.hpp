#pragma once

#include <set>
#include <string>
#include <vector>

#include "kb/inference.hpp"

namespace kb {

// Query result: projected variable names and a duplicate-free row set.
struct BindingSet {
    std::vector<std::string> columns;
    std::set<std::vector<Value>> rows;

    bool operator==(const BindingSet&) const = default;
};

// Rows sorted lexicographically over the rendered values; one header line
// with the column names, then one line per row. Columns are joined with a
// single space, or with tabs when tsv is set.
std::string render(const BindingSet& bs, bool tsv = false);

// All consistent extensions of the partial binding that satisfy the atom
// against the saturated facts. Membership atoms see the materialized
// subclass closure, so "x : C" also matches members of C's subclasses.
std::vector<Binding> match_atom(const flogic::Atom& atom, const SaturatedKB& skb,
                                const Binding& partial);

// Evaluates a conjunctive query. Identifiers in the body that name no known
// object are treated as existential variables; non-projected variables are
// existential. Unknown classes or attributes are an error in strict mode
// and a warning in lenient mode.
BindingSet evaluate(const flogic::Query& query, const SaturatedKB& skb, Mode mode,
                    Diagnostics& diags);

// The witness bindings (over all body variables, existential ones included)
// whose projection equals the given row, in deterministic order. Used to
// explain query results.
std::vector<Binding> witnesses_for_row(const flogic::Query& query, const SaturatedKB& skb,
                                       const std::vector<Value>& row);

// The query with unknown body identifiers rewritten to existential
// variables (the form actually evaluated).
flogic::Query resolve_query(const flogic::Query& query, const SaturatedKB& skb);

}  // namespace kb
