#include "kb/query.hpp"

#include <algorithm>
#include <optional>

namespace kb {

using flogic::Atom;
using flogic::Query;
using flogic::Term;

std::string render(const BindingSet& bs, bool tsv) {
    const char sep = tsv ? '\t' : ' ';
    std::string out;
    for (std::size_t i = 0; i < bs.columns.size(); ++i) {
        if (i) out += sep;
        out += bs.columns[i];
    }
    out += '\n';
    std::vector<std::vector<std::string>> rendered;
    for (const auto& row : bs.rows) {
        std::vector<std::string> r;
        r.reserve(row.size());
        for (const auto& v : row) r.push_back(render_value(v));
        rendered.push_back(std::move(r));
    }
    std::sort(rendered.begin(), rendered.end());
    for (const auto& r : rendered) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += sep;
            out += r[i];
        }
        out += '\n';
    }
    return out;
}

namespace {

std::optional<Value> term_value(const Term& t, const Binding& b) {
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

// Number of terms already fixed under the binding; used to pick the most
// bound atom first during the join.
int boundness(const Atom& a, const Binding& b) {
    int n = 0;
    if (term_value(a.subject, b)) ++n;
    if (a.kind == Atom::Kind::Attribute && term_value(a.value, b)) ++n;
    return n;
}

}  // namespace

std::vector<Binding> match_atom(const Atom& atom, const SaturatedKB& skb,
                                const Binding& partial) {
    std::vector<Binding> out;
    auto subj = term_value(atom.subject, partial);
    if (atom.kind == Atom::Kind::Membership) {
        if (subj) {
            if (subj->kind == ValueKind::Object &&
                skb.contains(Fact::membership(subj->text, atom.name)))
                out.push_back(partial);
        } else {
            for (int id : skb.members_of(atom.name)) {
                Binding nb = partial;
                nb[atom.subject.text] = object_value(skb.fact(id).object);
                out.push_back(std::move(nb));
            }
        }
        return out;
    }
    auto val = term_value(atom.value, partial);
    if (subj && val) {
        if (subj->kind == ValueKind::Object &&
            skb.contains(Fact::attribute(subj->text, atom.name, *val)))
            out.push_back(partial);
        return out;
    }
    const std::vector<int>* candidates;
    if (subj) {
        if (subj->kind != ValueKind::Object) return out;
        candidates = &skb.with_attribute_subject(atom.name, subj->text);
    } else if (val) {
        candidates = &skb.with_attribute_value(atom.name, *val);
    } else {
        candidates = &skb.with_attribute(atom.name);
    }
    for (int id : *candidates) {
        const Fact& f = skb.fact(id);
        Binding nb = partial;
        if (!subj) nb[atom.subject.text] = object_value(f.object);
        if (!val) {
            auto it = nb.find(atom.value.text);
            if (it != nb.end()) {
                if (it->second != f.value) continue;  // variable bound twice
            } else {
                nb[atom.value.text] = f.value;
            }
        }
        out.push_back(std::move(nb));
    }
    return out;
}

Query resolve_query(const Query& query, const SaturatedKB& skb) {
    Query out = query;
    for (auto& a : out.body) {
        auto resolve = [&](Term& t) {
            if (t.kind == Term::Kind::Identifier && !skb.objects().count(t.text))
                t.kind = Term::Kind::Variable;
        };
        resolve(a.subject);
        if (a.kind == Atom::Kind::Attribute) resolve(a.value);
    }
    return out;
}

namespace {

std::vector<Binding> solve_body(const std::vector<Atom>& body, const SaturatedKB& skb) {
    std::vector<Binding> states{Binding{}};
    std::vector<bool> done(body.size(), false);
    for (std::size_t step = 0; step < body.size() && !states.empty(); ++step) {
        // Greedy join order: the atom with the most bound terms first (ties
        // by source order). All states share the same bound variables, so
        // scoring against the first state is enough.
        std::size_t pick = body.size();
        int best = -1;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (done[i]) continue;
            int score = boundness(body[i], states.front());
            if (score > best) {
                best = score;
                pick = i;
            }
        }
        done[pick] = true;
        std::vector<Binding> next;
        for (const auto& s : states)
            for (auto& nb : match_atom(body[pick], skb, s)) next.push_back(std::move(nb));
        states = std::move(next);
    }
    return states;
}

bool check_schema(const Query& query, const SaturatedKB& skb, Mode mode, Diagnostics& diags) {
    const KnowledgeBase& kb = skb.base();
    bool ok = true;
    for (const auto& a : query.body) {
        if (a.kind == Atom::Kind::Membership && !kb.class_declared(a.name)) {
            std::string msg = "query references unknown class '" + a.name + "'";
            if (mode == Mode::Strict) {
                diags.error("query.unknown-class", msg, a.at);
                ok = false;
            } else {
                diags.warning("query.unknown-class", msg, a.at);
            }
        }
        if (a.kind == Atom::Kind::Attribute && !kb.attribute_declared(a.name)) {
            std::string msg = "query references unknown attribute '" + a.name + "'";
            if (mode == Mode::Strict) {
                diags.error("query.unknown-attr", msg, a.at);
                ok = false;
            } else {
                diags.warning("query.unknown-attr", msg, a.at);
            }
        }
    }
    return ok;
}

}  // namespace

BindingSet evaluate(const Query& query, const SaturatedKB& skb, Mode mode,
                    Diagnostics& diags) {
    BindingSet out;
    out.columns = query.projected;
    if (!check_schema(query, skb, mode, diags)) return out;
    Query resolved = resolve_query(query, skb);
    for (const auto& b : solve_body(resolved.body, skb)) {
        std::vector<Value> row;
        row.reserve(out.columns.size());
        bool complete = true;
        for (const auto& col : out.columns) {
            auto it = b.find(col);
            if (it == b.end()) {
                complete = false;  // unsafe queries never reach here via parse
                break;
            }
            row.push_back(it->second);
        }
        if (complete) out.rows.insert(std::move(row));
    }
    return out;
}

std::vector<Binding> witnesses_for_row(const Query& query, const SaturatedKB& skb,
                                       const std::vector<Value>& row) {
    Query resolved = resolve_query(query, skb);
    std::vector<Binding> out;
    for (const auto& b : solve_body(resolved.body, skb)) {
        bool matches = true;
        for (std::size_t i = 0; i < query.projected.size() && matches; ++i) {
            auto it = b.find(query.projected[i]);
            matches = it != b.end() && i < row.size() && it->second == row[i];
        }
        if (matches) out.push_back(b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace kb
