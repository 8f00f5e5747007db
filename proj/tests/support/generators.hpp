#pragma once

#include <random>
#include <string>
#include <vector>

#include "kb/flogic_ast.hpp"
#include "kb/xml_dtd.hpp"

// Seeded random generators for property tests. Everything is driven by a
// std::mt19937 so failures reproduce from the seed alone.
namespace kbtest {

using Rng = std::mt19937;

// A random program: DAG class hierarchy, signatures, well-typed ground
// facts over at most `max_objects` objects, and up to `max_rules` safe
// rules (head variables always occur in the body; heads may still be
// ill-typed so the typing paths get exercised).
kb::flogic::Program random_program(Rng& rng, int max_objects, int max_rules);

// A random safe query over the vocabulary of `program`: 1-3 atoms, constants
// drawn from the program's objects/literals (sometimes unknown identifiers,
// which evaluate as existentials), projecting a nonempty subset of the body
// variables.
kb::flogic::Query random_query(Rng& rng, const kb::flogic::Program& program);

// Random well-typed fact statements over the research ontology fixture
// (TForscher, KooperiertMit, HatAutor, ...), at most `max_objects` objects.
std::vector<kb::flogic::FactStatement> random_research_facts(Rng& rng, int max_objects);

// Random content model over a small element alphabet, depth-limited. May be
// ambiguous; the matcher comparison does not require one-unambiguity.
kb::xml::ContentModel random_content_model(Rng& rng, int depth = 0);

// Random word over the same alphabet, length 0..max_len.
std::vector<std::string> random_word(Rng& rng, int max_len);

// The alphabet used by random_content_model/random_word.
const std::vector<std::string>& model_alphabet();

}  // namespace kbtest
