#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kb/flogic_ast.hpp"
#include "kb/ontology.hpp"

namespace kb {

// One executable implication. Equivalences compile into a forward and a
// reverse implication.
struct CompiledRule {
    enum class Direction { None, Forward, Reverse };

    std::string name;  // e.g. "rule 2 (equivalence, reverse)"
    std::vector<flogic::Atom> body;
    std::vector<flogic::Atom> head;
    int origin_index = 0;  // 1-based index of the source rule
    Direction direction = Direction::None;
};

struct RuleSet {
    std::vector<CompiledRule> rules;
};

// Checks rule heads against the schema (strict mode drops rules whose head
// uses an undeclared class or attribute; lenient keeps them with a warning)
// and splits equivalences into their two directions.
RuleSet compile_rules(const flogic::Program& prog, const KnowledgeBase& kb, Mode mode,
                      Diagnostics& diags);

using Binding = std::map<std::string, Value>;

std::string render_binding(const Binding& b);

// Why a fact holds: asserted, produced by a rule application, or added by
// the subclass upward-closure of a membership fact.
struct Derivation {
    enum class Kind { Asserted, Rule, Closure };
    Kind kind = Kind::Asserted;
    int rule = -1;  // index into RuleSet::rules
    Binding binding;
    std::vector<int> premises;  // fact ids
    std::string via_class;      // Closure: the subclass the object came from
};

// The least fixpoint of the rule set over the base facts, closed upward
// along the subclass lattice. Facts are stored base-first; every derived
// fact records its first derivation.
class SaturatedKB {
public:
    const KnowledgeBase& base() const { return *base_; }
    const RuleSet& rules() const { return *rules_; }
    const std::vector<Fact>& facts() const { return facts_; }
    std::size_t base_count() const { return base_count_; }
    std::vector<Fact> derived() const {
        return {facts_.begin() + static_cast<long>(base_count_), facts_.end()};
    }

    bool contains(const Fact& f) const { return ids_.count(f) != 0; }
    int fact_id(const Fact& f) const;
    const Fact& fact(int id) const { return facts_[static_cast<std::size_t>(id)]; }
    const Derivation& derivation(int id) const {
        return derivations_[static_cast<std::size_t>(id)];
    }

    // Index lookups; the returned vectors list fact ids in insertion order.
    const std::vector<int>& members_of(const std::string& cls) const;
    const std::vector<int>& with_attribute(const std::string& attr) const;
    const std::vector<int>& with_attribute_subject(const std::string& attr,
                                                   const std::string& subject) const;
    const std::vector<int>& with_attribute_value(const std::string& attr,
                                                 const Value& value) const;
    const std::set<std::string>& objects() const { return objects_; }
    // Objects plus every literal occurring in a fact (the query domain).
    const std::set<Value>& value_domain() const { return values_; }

private:
    friend class Saturator;  // the saturate() working state

    int insert(const Fact& f, Derivation d);

    const KnowledgeBase* base_ = nullptr;
    const RuleSet* rules_ = nullptr;
    std::vector<Fact> facts_;
    std::vector<Derivation> derivations_;
    std::size_t base_count_ = 0;
    std::map<Fact, int> ids_;
    std::map<std::string, std::vector<int>> by_class_;
    std::map<std::string, std::vector<int>> by_attr_;
    std::map<std::pair<std::string, std::string>, std::vector<int>> by_attr_subject_;
    std::map<std::pair<std::string, Value>, std::vector<int>> by_attr_value_;
    std::set<std::string> objects_;
    std::set<Value> values_;
};

// Computes the least fixpoint with semi-naive (delta-driven) evaluation.
// Derived facts that do not type-check are dropped with a diagnostic in
// strict mode (kept with a warning in lenient mode); a fact whose subject
// gains the required membership later is still admitted, so the result does
// not depend on derivation order. The caller keeps kb and rules alive for
// the lifetime of the result.
SaturatedKB saturate(const KnowledgeBase& kb, const RuleSet& rules, Mode mode,
                     Diagnostics& diags);

// Provenance chain for one fact.
struct ExplainNode {
    enum class Kind { NotDerived, Asserted, Rule, Closure };
    Kind kind = Kind::NotDerived;
    Fact fact;
    std::string rule_name;
    Binding binding;
    std::string via_class;
    std::vector<ExplainNode> premises;
};

ExplainNode explain(const SaturatedKB& skb, const Fact& f);
// Indented multi-line rendering of the chain.
std::string format_explanation(const ExplainNode& node);

}  // namespace kb
