#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace kb {

enum class Severity { Warning, Error };

// Strict rejects ill-typed or malformed input with errors; lenient downgrades
// the recoverable cases to warnings and keeps going.
enum class Mode { Strict, Lenient };

struct SourcePos {
    int line = 0;  // 1-based; 0 means "no position"
    int col = 0;
};

struct SourceRef {
    std::string file;
    SourcePos pos;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;     // stable machine-readable id, e.g. "parse.syntax"
    std::string message;  // human-readable detail
    SourceRef at;
};

// Renders "file:line:col: severity code message"; file/position parts are
// omitted when unknown.
std::string format_diagnostic(const Diagnostic& d);

class Diagnostics {
public:
    void error(std::string code, std::string message, SourceRef at = {});
    void warning(std::string code, std::string message, SourceRef at = {});
    void add(Diagnostic d) { items_.push_back(std::move(d)); }
    void merge(const Diagnostics& other);
    void clear() { items_.clear(); }

    bool has_errors() const;
    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool empty() const { return items_.empty(); }
    bool has_code(const std::string& code) const;

    const std::vector<Diagnostic>& items() const { return items_; }

    // One formatted diagnostic per line.
    std::string to_string() const;

private:
    std::vector<Diagnostic> items_;
};

}  // namespace kb
