#include "kb/diagnostics.hpp"

#include <sstream>

namespace kb {

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream out;
    if (!d.at.file.empty()) {
        out << d.at.file << ':';
        if (d.at.pos.line > 0) out << d.at.pos.line << ':' << d.at.pos.col << ':';
        out << ' ';
    }
    out << (d.severity == Severity::Error ? "error" : "warning") << ' ' << d.code << ' '
        << d.message;
    return out.str();
}

void Diagnostics::error(std::string code, std::string message, SourceRef at) {
    items_.push_back({Severity::Error, std::move(code), std::move(message), std::move(at)});
}

void Diagnostics::warning(std::string code, std::string message, SourceRef at) {
    items_.push_back({Severity::Warning, std::move(code), std::move(message), std::move(at)});
}

void Diagnostics::merge(const Diagnostics& other) {
    items_.insert(items_.end(), other.items_.begin(), other.items_.end());
}

bool Diagnostics::has_errors() const {
    for (const auto& d : items_)
        if (d.severity == Severity::Error) return true;
    return false;
}

std::size_t Diagnostics::error_count() const {
    std::size_t n = 0;
    for (const auto& d : items_)
        if (d.severity == Severity::Error) ++n;
    return n;
}

std::size_t Diagnostics::warning_count() const {
    std::size_t n = 0;
    for (const auto& d : items_)
        if (d.severity == Severity::Warning) ++n;
    return n;
}

bool Diagnostics::has_code(const std::string& code) const {
    for (const auto& d : items_)
        if (d.code == code) return true;
    return false;
}

std::string Diagnostics::to_string() const {
    std::string out;
    for (const auto& d : items_) {
        out += format_diagnostic(d);
        out += '\n';
    }
    return out;
}

}  // namespace kb
