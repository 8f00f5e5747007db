#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

// Shared plumbing for the test binaries: fixture access, scratch
// directories and running the command-line tool.
namespace kbtest {

inline std::string fixture_path(const std::string& rel) {
    return std::string(KB_FIXTURE_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string read_fixture(const std::string& rel) { return slurp(fixture_path(rel)); }

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path);
}

// Self-cleaning scratch directory under the system temp root.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        auto base = std::filesystem::temp_directory_path();
        for (int tries = 0; tries < 100; ++tries) {
            auto candidate = base / ("kbtest-" + std::to_string(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create scratch directory");
    }
    ~TempDir() {
        if (path_.empty()) return;
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    TempDir(TempDir&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }
    TempDir& operator=(TempDir&&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    void copy_fixture(const std::string& rel, const std::string& name) const {
        std::filesystem::copy_file(fixture_path(rel), path_ / name,
                                   std::filesystem::copy_options::overwrite_existing);
    }

private:
    std::filesystem::path path_;
};

struct CmdResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

// Runs a shell command, capturing combined output and the exit code.
inline CmdResult run_cmd(const std::string& cmd) {
    CmdResult result;
    std::string full = cmd + " 2>&1";
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::string kbctl() { return std::string(KBCTL_BIN); }

// kbctl invocation with the given arguments (already shell-quoted by the
// caller where needed).
inline CmdResult run_kbctl(const std::string& args) { return run_cmd(kbctl() + " " + args); }

inline bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

inline int count_occurrences(const std::string& haystack, const std::string& needle) {
    int count = 0;
    for (size_t pos = 0; (pos = haystack.find(needle, pos)) != std::string::npos;
         pos += needle.size())
        ++count;
    return count;
}

}  // namespace kbtest
