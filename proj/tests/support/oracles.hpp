#pragma once

#include <set>
#include <string>
#include <vector>

#include "kb/flogic_ast.hpp"
#include "kb/inference.hpp"
#include "kb/ontology.hpp"
#include "kb/xml_dtd.hpp"

// Independent reference implementations used to cross-check the engine.
// They favour obviousness over speed: exhaustive enumeration everywhere.
namespace kbtest {

// Naive saturation: re-evaluates every rule against the full fact set by
// brute-force binding enumeration until nothing changes. Mirrors the
// engine's acceptance policy (membership closure, kind-level typing of
// derived attribute facts, pending recheck in strict mode) but shares no
// code with it.
std::set<kb::Fact> oracle_saturate(const kb::KnowledgeBase& kb, const kb::RuleSet& rules,
                                   kb::Mode mode);

// Exhaustive query evaluation: treats identifiers that name no object as
// existential variables, enumerates every assignment of all variables over
// the value domain of `facts`, keeps assignments satisfying every atom and
// projects them onto the declared variables.
std::set<std::vector<kb::Value>> oracle_evaluate(const kb::flogic::Query& query,
                                                 const std::set<kb::Fact>& facts);

// Brute-force recursive matcher for DTD content models (element names only;
// text is outside the model).
bool oracle_match(const kb::xml::ContentModel& model, const std::vector<std::string>& word);

}  // namespace kbtest
