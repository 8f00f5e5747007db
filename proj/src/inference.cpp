#include "kb/inference.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace kb {

using flogic::Atom;
using flogic::Term;

std::string render_binding(const Binding& b) {
    std::string out = "{";
    bool first = true;
    for (const auto& [var, val] : b) {
        if (!first) out += ", ";
        first = false;
        out += var + " = " + render_value(val);
    }
    out += "}";
    return out;
}

namespace {

std::set<std::string> atom_variables(const std::vector<Atom>& atoms) {
    std::set<std::string> vars;
    for (const auto& a : atoms) {
        if (a.subject.kind == Term::Kind::Variable) vars.insert(a.subject.text);
        if (a.kind == Atom::Kind::Attribute && a.value.kind == Term::Kind::Variable)
            vars.insert(a.value.text);
    }
    return vars;
}

// Checks one compiled direction; returns false if it must be dropped.
bool check_direction(const CompiledRule& rule, const KnowledgeBase& kb, Mode mode,
                     Diagnostics& diags, const SourceRef& at) {
    bool ok = true;
    std::set<std::string> body_vars = atom_variables(rule.body);
    for (const auto& v : atom_variables(rule.head)) {
        if (!body_vars.count(v)) {
            diags.error("infer.unsafe-rule",
                        "head variable '" + v + "' of " + rule.name +
                            " does not occur in the body",
                        at);
            ok = false;
        }
    }
    for (const auto& a : rule.head) {
        if (a.kind == Atom::Kind::Membership && !kb.class_declared(a.name)) {
            std::string msg =
                "head of " + rule.name + " uses undeclared class '" + a.name + "'";
            if (mode == Mode::Strict) {
                diags.error("infer.unknown-class", msg, at);
                ok = false;
            } else {
                diags.warning("infer.unknown-class", msg, at);
            }
        }
        if (a.kind == Atom::Kind::Attribute && !kb.attribute_declared(a.name)) {
            std::string msg =
                "head of " + rule.name + " uses undeclared attribute '" + a.name + "'";
            if (mode == Mode::Strict) {
                diags.error("infer.unknown-attr", msg, at);
                ok = false;
            } else {
                diags.warning("infer.unknown-attr", msg, at);
            }
        }
    }
    return ok;
}

}  // namespace

RuleSet compile_rules(const flogic::Program& prog, const KnowledgeBase& kb, Mode mode,
                      Diagnostics& diags) {
    RuleSet out;
    int index = 0;
    for (const auto& r : prog.rules) {
        ++index;
        std::string base_name = "rule " + std::to_string(index);
        std::vector<CompiledRule> directions;
        if (r.kind == flogic::Rule::Kind::Implication) {
            directions.push_back({base_name + " (implication)", r.body, r.head, index,
                                  CompiledRule::Direction::None});
        } else {
            directions.push_back({base_name + " (equivalence, forward)", r.body, r.head,
                                  index, CompiledRule::Direction::Forward});
            directions.push_back({base_name + " (equivalence, reverse)", r.head, r.body,
                                  index, CompiledRule::Direction::Reverse});
        }
        for (auto& d : directions)
            if (check_direction(d, kb, mode, diags, r.at)) out.rules.push_back(std::move(d));
    }
    return out;
}

int SaturatedKB::fact_id(const Fact& f) const {
    auto it = ids_.find(f);
    return it == ids_.end() ? -1 : it->second;
}

const std::vector<int>& SaturatedKB::members_of(const std::string& cls) const {
    static const std::vector<int> empty;
    auto it = by_class_.find(cls);
    return it == by_class_.end() ? empty : it->second;
}

const std::vector<int>& SaturatedKB::with_attribute(const std::string& attr) const {
    static const std::vector<int> empty;
    auto it = by_attr_.find(attr);
    return it == by_attr_.end() ? empty : it->second;
}

const std::vector<int>& SaturatedKB::with_attribute_subject(const std::string& attr,
                                                            const std::string& subject) const {
    static const std::vector<int> empty;
    auto it = by_attr_subject_.find({attr, subject});
    return it == by_attr_subject_.end() ? empty : it->second;
}

const std::vector<int>& SaturatedKB::with_attribute_value(const std::string& attr,
                                                          const Value& value) const {
    static const std::vector<int> empty;
    auto it = by_attr_value_.find({attr, value});
    return it == by_attr_value_.end() ? empty : it->second;
}

int SaturatedKB::insert(const Fact& f, Derivation d) {
    auto it = ids_.find(f);
    if (it != ids_.end()) return -1;
    int id = static_cast<int>(facts_.size());
    facts_.push_back(f);
    derivations_.push_back(std::move(d));
    ids_[f] = id;
    objects_.insert(f.object);
    values_.insert(object_value(f.object));
    if (f.kind == Fact::Kind::Membership) {
        by_class_[f.name].push_back(id);
    } else {
        by_attr_[f.name].push_back(id);
        by_attr_subject_[{f.name, f.object}].push_back(id);
        by_attr_value_[{f.name, f.value}].push_back(id);
        values_.insert(f.value);
        if (f.value.kind == ValueKind::Object) objects_.insert(f.value.text);
    }
    return id;
}

// Saturation working state: wraps the result under construction.
class Saturator {
public:
    Saturator(const KnowledgeBase& kb, const RuleSet& rules, Mode mode, Diagnostics& diags)
        : kb_(kb), rules_(rules), mode_(mode), diags_(diags) {
        skb_.base_ = &kb;
        skb_.rules_ = &rules;
    }

    SaturatedKB run() {
        for (const auto& f : kb_.facts()) {
            skb_.insert(f, Derivation{Derivation::Kind::Asserted, -1, {}, {}, ""});
            if (f.kind == Fact::Kind::Membership) member_classes_[f.object].insert(f.name);
        }
        skb_.base_count_ = skb_.facts_.size();
        // Upward closure of the asserted memberships.
        for (std::size_t id = 0; id < skb_.base_count_; ++id) {
            Fact f = skb_.facts_[id];
            if (f.kind == Fact::Kind::Membership) close_membership(f, static_cast<int>(id));
        }

        std::size_t cap = iteration_cap();
        std::size_t delta_lo = 0, delta_hi = skb_.facts_.size();
        std::size_t rounds = 0;
        while (delta_hi > delta_lo) {
            if (++rounds > cap) {
                diags_.error("infer.overflow",
                             "saturation exceeded the iteration bound of " +
                                 std::to_string(cap) + " rounds");
                break;
            }
            // Collect all applications for this round before inserting, so
            // matching sees a frozen fact set.
            struct App {
                int rule;
                Binding binding;
                std::vector<int> premises;
            };
            std::vector<App> apps;
            for (std::size_t r = 0; r < rules_.rules.size(); ++r) {
                const auto& rule = rules_.rules[r];
                for (std::size_t d = 0; d < rule.body.size(); ++d) {
                    std::vector<State> states{{Binding{}, {}}};
                    states = match_atom(rule.body[d], states, delta_lo, delta_hi);
                    for (std::size_t j = 0; j < rule.body.size() && !states.empty(); ++j) {
                        if (j == d) continue;
                        states = match_atom(rule.body[j], states, 0, delta_hi);
                    }
                    for (auto& s : states)
                        apps.push_back({static_cast<int>(r), std::move(s.binding),
                                        std::move(s.premises)});
                }
            }
            for (const auto& app : apps)
                apply_head(rules_.rules[static_cast<std::size_t>(app.rule)], app.rule,
                           app.binding, app.premises);
            recheck_pending();
            delta_lo = delta_hi;
            delta_hi = skb_.facts_.size();
        }

        // Whatever is still pending can never type-check.
        for (const auto& p : pending_) report_ill_typed(p);
        return std::move(skb_);
    }

private:
    struct State {
        Binding binding;
        std::vector<int> premises;
    };
    struct Pending {
        Fact fact;
        Derivation derivation;
    };

    const KnowledgeBase& kb_;
    const RuleSet& rules_;
    Mode mode_;
    Diagnostics& diags_;
    SaturatedKB skb_;
    std::map<std::string, std::set<std::string>> member_classes_;
    std::vector<Pending> pending_;
    std::set<Fact> pending_set_;
    std::set<Fact> reported_;

    std::size_t iteration_cap() const {
        std::set<std::string> objs = skb_.objects_;
        std::set<std::string> attrs;
        for (const auto& s : kb_.signatures()) attrs.insert(s.attribute);
        for (const auto& r : rules_.rules) {
            for (const auto* atoms : {&r.body, &r.head}) {
                for (const auto& a : *atoms) {
                    if (a.subject.kind == Term::Kind::Identifier) objs.insert(a.subject.text);
                    if (a.kind == Atom::Kind::Attribute) {
                        attrs.insert(a.name);
                        if (a.value.kind == Term::Kind::Identifier) objs.insert(a.value.text);
                    }
                }
            }
        }
        std::size_t n = objs.size(), values = skb_.values_.size() + objs.size() + 1;
        std::size_t bound =
            n * values * (attrs.size() + 1) + n * (kb_.classes().size() + 1) + 16;
        return bound;
    }

    std::optional<Value> term_value(const Term& t, const Binding& b) const {
        switch (t.kind) {
            case Term::Kind::Literal: return literal_value(t.text);
            case Term::Kind::Identifier: return object_value(t.text);
            case Term::Kind::Variable: {
                auto it = b.find(t.text);
                if (it == b.end()) return std::nullopt;
                return it->second;
            }
        }
        return std::nullopt;
    }

    // Extends each state with every consistent match of the atom against
    // facts with ids in [lo, hi).
    std::vector<State> match_atom(const Atom& atom, const std::vector<State>& states,
                                  std::size_t lo, std::size_t hi) {
        std::vector<State> out;
        for (const auto& s : states) {
            auto subj = term_value(atom.subject, s.binding);
            if (atom.kind == Atom::Kind::Membership) {
                if (subj) {
                    if (subj->kind != ValueKind::Object) continue;
                    int id = skb_.fact_id(Fact::membership(subj->text, atom.name));
                    if (id >= 0 && in_range(id, lo, hi)) extend(out, s, {}, id);
                } else {
                    for (int id : skb_.members_of(atom.name)) {
                        if (!in_range(id, lo, hi)) continue;
                        Binding nb = s.binding;
                        nb[atom.subject.text] = object_value(skb_.fact(id).object);
                        extend(out, s, std::move(nb), id, true);
                    }
                }
                continue;
            }
            auto val = term_value(atom.value, s.binding);
            const std::vector<int>* candidates = nullptr;
            if (subj && val) {
                if (subj->kind != ValueKind::Object) continue;
                int id = skb_.fact_id(Fact::attribute(subj->text, atom.name, *val));
                if (id >= 0 && in_range(id, lo, hi)) extend(out, s, {}, id);
                continue;
            } else if (subj) {
                if (subj->kind != ValueKind::Object) continue;
                candidates = &skb_.with_attribute_subject(atom.name, subj->text);
            } else if (val) {
                candidates = &skb_.with_attribute_value(atom.name, *val);
            } else {
                candidates = &skb_.with_attribute(atom.name);
            }
            for (int id : *candidates) {
                if (!in_range(id, lo, hi)) continue;
                const Fact& f = skb_.fact(id);
                Binding nb = s.binding;
                if (!subj) nb[atom.subject.text] = object_value(f.object);
                if (!val) {
                    auto it = nb.find(atom.value.text);
                    if (it != nb.end()) {
                        if (it->second != f.value) continue;  // same var twice
                    } else {
                        nb[atom.value.text] = f.value;
                    }
                }
                extend(out, s, std::move(nb), id, true);
            }
        }
        return out;
    }

    static bool in_range(int id, std::size_t lo, std::size_t hi) {
        return static_cast<std::size_t>(id) >= lo && static_cast<std::size_t>(id) < hi;
    }

    static void extend(std::vector<State>& out, const State& s, Binding nb, int premise,
                       bool use_nb = false) {
        State next;
        next.binding = use_nb ? std::move(nb) : s.binding;
        next.premises = s.premises;
        next.premises.push_back(premise);
        out.push_back(std::move(next));
    }

    void close_membership(const Fact& f, int id) {
        for (const auto& anc : kb_.ancestors(f.name)) {
            Fact up = Fact::membership(f.object, anc);
            int nid = skb_.insert(
                up, Derivation{Derivation::Kind::Closure, -1, {}, {id}, f.name});
            if (nid >= 0) member_classes_[f.object].insert(anc);
        }
    }

    bool attribute_applies_now(const std::string& object, const std::string& attr,
                               ValueKind kind) const {
        auto it = member_classes_.find(object);
        if (it == member_classes_.end()) return false;
        for (const auto& cls : it->second) {
            const auto& eff = kb_.effective_signature(cls);
            auto e = eff.find(attr);
            if (e == eff.end()) continue;
            ValueKind want = e->second == kStringType ? ValueKind::Literal : ValueKind::Object;
            if (want == kind) return true;
        }
        return false;
    }

    void report_ill_typed(const Pending& p) {
        if (!reported_.insert(p.fact).second) return;
        const auto& rule = rules_.rules[static_cast<std::size_t>(p.derivation.rule)];
        std::string msg = "derived fact " + render_fact(p.fact) +
                          " does not type-check (" + rule.name + " with " +
                          render_binding(p.derivation.binding) + ")";
        if (mode_ == Mode::Strict)
            diags_.error("infer.ill-typed", msg + "; fact dropped");
        else
            diags_.warning("infer.ill-typed", msg + "; fact kept");
    }

    void apply_head(const CompiledRule& rule, int rule_idx, const Binding& binding,
                    const std::vector<int>& premises) {
        Derivation d{Derivation::Kind::Rule, rule_idx, binding, premises, ""};
        // Memberships first so the head's own memberships legitimize its
        // attribute facts.
        for (const auto& a : rule.head) {
            if (a.kind != Atom::Kind::Membership) continue;
            auto subj = term_value(a.subject, binding);
            if (!subj || subj->kind != ValueKind::Object) {
                report_ill_typed({Fact::membership(subj ? subj->text : "?", a.name), d});
                continue;
            }
            Fact f = Fact::membership(subj->text, a.name);
            if (mode_ == Mode::Strict && !kb_.class_declared(a.name)) {
                report_ill_typed({f, d});
                continue;
            }
            int id = skb_.insert(f, d);
            if (id >= 0) {
                member_classes_[f.object].insert(f.name);
                close_membership(f, id);
            }
        }
        for (const auto& a : rule.head) {
            if (a.kind != Atom::Kind::Attribute) continue;
            auto subj = term_value(a.subject, binding);
            auto val = term_value(a.value, binding);
            if (!subj || !val || subj->kind != ValueKind::Object) {
                report_ill_typed({Fact::attribute(subj ? subj->text : "?", a.name,
                                                  val ? *val : Value{}),
                                  d});
                continue;
            }
            Fact f = Fact::attribute(subj->text, a.name, *val);
            if (skb_.contains(f)) continue;
            if (mode_ == Mode::Lenient) {
                if (!attribute_applies_now(f.object, f.name, f.value.kind))
                    report_ill_typed({f, d});
                skb_.insert(f, d);
                continue;
            }
            if (attribute_applies_now(f.object, f.name, f.value.kind)) {
                skb_.insert(f, d);
            } else if (kb_.value_kinds_for(f.name).count(f.value.kind)) {
                // May become well-typed once the subject gains a membership.
                if (pending_set_.insert(f).second) pending_.push_back({f, d});
            } else {
                report_ill_typed({f, d});
            }
        }
    }

    void recheck_pending() {
        std::vector<Pending> still;
        for (auto& p : pending_) {
            if (skb_.contains(p.fact)) {
                pending_set_.erase(p.fact);
                continue;
            }
            if (attribute_applies_now(p.fact.object, p.fact.name, p.fact.value.kind)) {
                skb_.insert(p.fact, p.derivation);
                pending_set_.erase(p.fact);
            } else {
                still.push_back(std::move(p));
            }
        }
        pending_ = std::move(still);
    }
};

SaturatedKB saturate(const KnowledgeBase& kb, const RuleSet& rules, Mode mode,
                     Diagnostics& diags) {
    return Saturator(kb, rules, mode, diags).run();
}

ExplainNode explain(const SaturatedKB& skb, const Fact& f) {
    ExplainNode node;
    node.fact = f;
    int id = skb.fact_id(f);
    if (id < 0) {
        node.kind = ExplainNode::Kind::NotDerived;
        return node;
    }
    const Derivation& d = skb.derivation(id);
    switch (d.kind) {
        case Derivation::Kind::Asserted: node.kind = ExplainNode::Kind::Asserted; break;
        case Derivation::Kind::Rule: {
            node.kind = ExplainNode::Kind::Rule;
            node.rule_name = skb.rules().rules[static_cast<std::size_t>(d.rule)].name;
            node.binding = d.binding;
            break;
        }
        case Derivation::Kind::Closure: {
            node.kind = ExplainNode::Kind::Closure;
            node.via_class = d.via_class;
            break;
        }
    }
    for (int p : d.premises) node.premises.push_back(explain(skb, skb.fact(p)));
    return node;
}

namespace {

void format_node(const ExplainNode& node, int indent, std::string& out) {
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += render_fact(node.fact);
    switch (node.kind) {
        case ExplainNode::Kind::NotDerived: out += "  (not derivable)"; break;
        case ExplainNode::Kind::Asserted: out += "  (asserted)"; break;
        case ExplainNode::Kind::Rule:
            out += "  (by " + node.rule_name + " with " + render_binding(node.binding) + ")";
            break;
        case ExplainNode::Kind::Closure:
            out += "  (by subclass closure from " + node.via_class + ")";
            break;
    }
    out += '\n';
    for (const auto& p : node.premises) format_node(p, indent + 1, out);
}

}  // namespace

std::string format_explanation(const ExplainNode& node) {
    std::string out;
    format_node(node, 0, out);
    return out;
}

}  // namespace kb
