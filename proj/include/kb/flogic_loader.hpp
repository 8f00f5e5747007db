#pragma once

#include <vector>

#include "kb/flogic_ast.hpp"
#include "kb/ontology.hpp"

namespace kb::flogic {

// Converts a ground atom to a fact. Atoms containing variables are reported
// as errors (facts must be ground).
std::vector<Fact> statement_facts(const FactStatement& stmt, Diagnostics& diags);

// Loads declarations and signatures into the knowledge base (merging the
// super sets of split class declarations), finalizes it, then asserts the
// program's facts (memberships before attribute values). Returns false if
// the knowledge base could not be finalized.
bool load_program(const Program& prog, KnowledgeBase& kb, Mode mode, Diagnostics& diags);

}  // namespace kb::flogic
