#include "kb/ontology.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace kb {

std::string quote_literal(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string render_value(const Value& v) {
    return v.kind == ValueKind::Literal ? quote_literal(v.text) : v.text;
}

std::string render_fact(const Fact& f) {
    if (f.kind == Fact::Kind::Membership) return f.object + " : " + f.name;
    return f.object + "[" + f.name + " ->> " + render_value(f.value) + "]";
}

std::size_t FactHash::operator()(const Fact& f) const {
    std::size_t h = std::hash<int>()(static_cast<int>(f.kind));
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(std::hash<std::string>()(f.object));
    mix(std::hash<std::string>()(f.name));
    mix(std::hash<int>()(static_cast<int>(f.value.kind)));
    mix(std::hash<std::string>()(f.value.text));
    return h;
}

KnowledgeBase::KnowledgeBase() {
    classes_[kRootClass] = ClassDecl{kRootClass, {}, {}};
}

void KnowledgeBase::declare_class(const std::string& name, const std::set<std::string>& supers,
                                  Diagnostics& diags, const SourceRef& at) {
    if (name == kStringType) {
        diags.error("onto.reserved", "'" + name + "' is reserved for the builtin string type",
                    at);
        return;
    }
    auto it = classes_.find(name);
    if (it != classes_.end()) {
        if (it->second.supers == supers) return;  // idempotent redeclaration
        std::ostringstream msg;
        msg << "class '" << name << "' redeclared with conflicting superclasses";
        diags.error("onto.super-conflict", msg.str(), at);
        return;
    }
    classes_[name] = ClassDecl{name, supers, at};
    finalized_ = false;
}

void KnowledgeBase::add_signature(const std::string& owner, const std::string& attribute,
                                  const std::string& value_type, Diagnostics& diags,
                                  const SourceRef& at) {
    for (const auto& s : signatures_) {
        if (s.owner == owner && s.attribute == attribute) {
            if (s.value_type == value_type) return;  // idempotent
            diags.error("onto.sig-conflict",
                        "attribute '" + attribute + "' redeclared on '" + owner + "' as '" +
                            value_type + "' (was '" + s.value_type + "')",
                        at);
            return;
        }
    }
    signatures_.push_back({owner, attribute, value_type, at});
    finalized_ = false;
}

bool KnowledgeBase::class_declared(const std::string& name) const {
    return classes_.count(name) != 0;
}

bool KnowledgeBase::finalize(Diagnostics& diags) {
    finalized_ = false;
    ancestors_.clear();
    effective_.clear();
    declared_attributes_.clear();

    std::size_t errors_before = diags.error_count();

    // Superclass references must resolve.
    for (const auto& [name, decl] : classes_) {
        for (const auto& sup : decl.supers) {
            if (!classes_.count(sup))
                diags.error("onto.unknown-class",
                            "superclass '" + sup + "' of '" + name + "' is not declared",
                            decl.at);
        }
    }
    if (diags.error_count() > errors_before) return false;

    // Cycle check via DFS colouring over the super edges.
    std::map<std::string, int> colour;  // 0 white, 1 grey, 2 black
    std::function<bool(const std::string&, std::vector<std::string>&)> dfs =
        [&](const std::string& c, std::vector<std::string>& path) -> bool {
        colour[c] = 1;
        path.push_back(c);
        for (const auto& sup : classes_.at(c).supers) {
            if (colour[sup] == 1) {
                std::string cycle = sup;
                for (auto it = path.rbegin(); it != path.rend() && *it != sup; ++it)
                    cycle = *it + " :: " + cycle;
                cycle = sup + " :: " + cycle;
                diags.error("onto.cycle", "class hierarchy cycle: " + cycle,
                            classes_.at(c).at);
                return false;
            }
            if (colour[sup] == 0 && !dfs(sup, path)) return false;
        }
        path.pop_back();
        colour[c] = 2;
        return true;
    };
    for (const auto& [name, decl] : classes_) {
        std::vector<std::string> path;
        if (colour[name] == 0 && !dfs(name, path)) return false;
    }

    // Ancestor sets; classes without explicit supers hang beneath the root.
    std::function<const std::set<std::string>&(const std::string&)> compute =
        [&](const std::string& c) -> const std::set<std::string>& {
        auto it = ancestors_.find(c);
        if (it != ancestors_.end()) return it->second;
        std::set<std::string> anc;
        const auto& decl = classes_.at(c);
        std::set<std::string> supers = decl.supers;
        if (supers.empty() && c != kRootClass) supers.insert(kRootClass);
        for (const auto& sup : supers) {
            anc.insert(sup);
            const auto& up = compute(sup);
            anc.insert(up.begin(), up.end());
        }
        return ancestors_[c] = std::move(anc);
    };
    for (const auto& [name, decl] : classes_) compute(name);

    // Signature sanity: owner and value type must be declared classes (or
    // STRING), and the value type may not specialize the owner.
    for (const auto& s : signatures_) {
        if (!classes_.count(s.owner)) {
            diags.error("onto.unknown-class",
                        "signature owner '" + s.owner + "' is not a declared class", s.at);
            continue;
        }
        if (s.value_type != kStringType && !classes_.count(s.value_type)) {
            diags.error("onto.unknown-class",
                        "value type '" + s.value_type + "' of attribute '" + s.attribute +
                            "' is not a declared class or STRING",
                        s.at);
            continue;
        }
        if (s.value_type != kStringType && s.value_type != s.owner &&
            ancestors_.at(s.value_type).count(s.owner)) {
            diags.error("onto.sig-subclass",
                        "attribute '" + s.attribute + "' on '" + s.owner +
                            "' may not take the subclass '" + s.value_type + "' as value type",
                        s.at);
        }
        declared_attributes_.insert(s.attribute);
    }
    if (diags.error_count() > errors_before) return false;

    // Effective signatures: own plus inherited. Two applicable declarations
    // of one attribute must agree on the value type.
    std::set<std::string> reported;
    for (const auto& [name, decl] : classes_) {
        std::map<std::string, std::string> eff;
        std::map<std::string, std::string> source;
        std::set<std::string> scope = ancestors_.at(name);
        scope.insert(name);
        for (const auto& s : signatures_) {
            if (!scope.count(s.owner)) continue;
            auto it = eff.find(s.attribute);
            if (it == eff.end()) {
                eff[s.attribute] = s.value_type;
                source[s.attribute] = s.owner;
            } else if (it->second != s.value_type) {
                std::string key = s.attribute + "|" + source[s.attribute] + "|" + s.owner;
                if (reported.insert(key).second) {
                    diags.error("onto.sig-conflict",
                                "attribute '" + s.attribute + "' is '" + it->second +
                                    "' on '" + source[s.attribute] + "' but '" + s.value_type +
                                    "' on '" + s.owner + "' (conflict visible from '" + name +
                                    "')",
                                s.at);
                }
            }
        }
        effective_[name] = std::move(eff);
    }
    if (diags.error_count() > errors_before) return false;

    finalized_ = true;
    return true;
}

bool KnowledgeBase::is_subclass(const std::string& sub, const std::string& sup) const {
    if (sub == sup) return classes_.count(sub) != 0;
    auto it = ancestors_.find(sub);
    if (it == ancestors_.end()) return false;
    return it->second.count(sup) != 0;
}

bool KnowledgeBase::is_subclass_checked(const std::string& sub, const std::string& sup,
                                        Diagnostics& diags) const {
    bool ok = true;
    for (const auto& c : {sub, sup}) {
        if (!classes_.count(c)) {
            diags.error("onto.unknown-class", "class '" + c + "' is not declared");
            ok = false;
        }
    }
    return ok && is_subclass(sub, sup);
}

const std::set<std::string>& KnowledgeBase::ancestors(const std::string& cls) const {
    static const std::set<std::string> empty;
    auto it = ancestors_.find(cls);
    return it == ancestors_.end() ? empty : it->second;
}

const std::map<std::string, std::string>& KnowledgeBase::effective_signature(
    const std::string& cls) const {
    static const std::map<std::string, std::string> empty;
    auto it = effective_.find(cls);
    return it == effective_.end() ? empty : it->second;
}

bool KnowledgeBase::attribute_declared(const std::string& attribute) const {
    return declared_attributes_.count(attribute) != 0;
}

std::set<ValueKind> KnowledgeBase::value_kinds_for(const std::string& attribute) const {
    std::set<ValueKind> kinds;
    for (const auto& s : signatures_) {
        if (s.attribute != attribute) continue;
        kinds.insert(s.value_type == kStringType ? ValueKind::Literal : ValueKind::Object);
    }
    return kinds;
}

bool KnowledgeBase::attribute_applies(const std::string& object, const std::string& attribute,
                                      ValueKind kind) const {
    auto mem = memberships_.find(object);
    if (mem == memberships_.end()) return false;
    for (const auto& cls : mem->second) {
        const auto& eff = effective_signature(cls);
        auto it = eff.find(attribute);
        if (it == eff.end()) continue;
        ValueKind want = it->second == kStringType ? ValueKind::Literal : ValueKind::Object;
        if (want == kind) return true;
    }
    return false;
}

bool KnowledgeBase::check_fact(const Fact& f, Mode mode, Diagnostics& diags,
                               const SourceRef& at) const {
    auto report = [&](const std::string& code, const std::string& msg) {
        if (mode == Mode::Strict) {
            diags.error(code, msg, at);
            return false;
        }
        diags.warning(code, msg, at);
        return true;  // lenient keeps the fact
    };
    if (f.kind == Fact::Kind::Membership) {
        if (!classes_.count(f.name))
            return report("onto.unknown-class",
                          "membership in undeclared class '" + f.name + "' for object '" +
                              f.object + "'");
        return true;
    }
    // Attribute fact: some class the object belongs to must carry the
    // attribute, and the value kind must match that signature.
    auto mem = memberships_.find(f.object);
    bool attr_visible = false;
    if (mem != memberships_.end()) {
        for (const auto& cls : mem->second) {
            const auto& eff = effective_signature(cls);
            auto it = eff.find(f.name);
            if (it == eff.end()) continue;
            attr_visible = true;
            ValueKind want =
                it->second == kStringType ? ValueKind::Literal : ValueKind::Object;
            if (want == f.value.kind) return true;
        }
    }
    if (attr_visible)
        return report("onto.kind-mismatch",
                      "attribute '" + f.name + "' of '" + f.object + "' expects " +
                          std::string(f.value.kind == ValueKind::Literal
                                          ? "an object value, got the literal "
                                          : "a string literal, got the object ") +
                          render_value(f.value));
    return report("onto.unknown-attr", "attribute '" + f.name +
                                           "' is not in the effective signature of any class "
                                           "of object '" +
                                           f.object + "'");
}

bool KnowledgeBase::assert_fact(const Fact& f, Mode mode, Diagnostics& diags,
                                const SourceRef& at) {
    if (!finalized_) {
        diags.error("onto.not-finalized", "facts may only be asserted after finalize()");
        return false;
    }
    if (fact_set_.count(f)) return true;  // duplicates absorbed
    if (!check_fact(f, mode, diags, at)) return false;
    fact_set_.insert(f);
    facts_.push_back(f);
    if (f.kind == Fact::Kind::Membership) memberships_[f.object].insert(f.name);
    return true;
}

std::size_t KnowledgeBase::assert_facts(const std::vector<Fact>& facts, Mode mode,
                                        Diagnostics& diags) {
    std::size_t stored = 0;
    for (const auto& f : facts)
        if (f.kind == Fact::Kind::Membership && assert_fact(f, mode, diags)) ++stored;
    for (const auto& f : facts)
        if (f.kind == Fact::Kind::Attribute && assert_fact(f, mode, diags)) ++stored;
    return stored;
}

bool KnowledgeBase::has_fact(const Fact& f) const { return fact_set_.count(f) != 0; }

std::set<std::string> KnowledgeBase::classes_of(const std::string& object) const {
    auto it = memberships_.find(object);
    return it == memberships_.end() ? std::set<std::string>{} : it->second;
}

}  // namespace kb
