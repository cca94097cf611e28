#pragma once

#include <stdexcept>
#include <string>

namespace mdchase {

// Errors raised while reading external inputs (MD files, CSV, configs,
// queries). They carry enough context to point at the offending spot.
class input_error : public std::runtime_error {
public:
    input_error(std::string source, std::size_t line, std::string token, const std::string& what)
        : std::runtime_error(format(source, line, token, what)),
          source_(std::move(source)),
          line_(line),
          token_(std::move(token)) {}

    explicit input_error(const std::string& what)
        : std::runtime_error(what), source_("<input>"), line_(0) {}

    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }
    const std::string& token() const { return token_; }

private:
    static std::string format(const std::string& source, std::size_t line,
                              const std::string& token, const std::string& what) {
        std::string msg = source;
        if (line > 0) msg += ":" + std::to_string(line);
        if (!token.empty()) msg += ": at '" + token + "'";
        msg += ": " + what;
        return msg;
    }

    std::string source_;
    std::size_t line_;
    std::string token_;
};

// Violations of structural preconditions (schema mismatch, tid-set
// mismatch, unsupported MD-set shape).
class structural_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mdchase
