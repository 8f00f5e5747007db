#pragma once

#include <string>

#include "kb/flogic_ast.hpp"

namespace kb::flogic {

// Canonical textual form: one statement per line, fact statements flattened
// to one atom each, rule/query bodies joined with 'and'. Reparsing the
// output yields a structurally equal program.
std::string print_program(const Program& prog);

std::string print_term(const Term& t);
std::string print_atom(const Atom& a);
std::string print_rule(const Rule& r);
std::string print_query(const Query& q);

}  // namespace kb::flogic
