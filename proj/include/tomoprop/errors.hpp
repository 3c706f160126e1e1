#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tomoprop {

// Base class of every error raised by the library. `kind()` is the stable
// machine-readable name used in CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define TOMOPROP_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    }

TOMOPROP_DEFINE_ERROR(SupportError);
TOMOPROP_DEFINE_ERROR(DegenerateError);
TOMOPROP_DEFINE_ERROR(GridError);
TOMOPROP_DEFINE_ERROR(SingularityError);
TOMOPROP_DEFINE_ERROR(StepError);
TOMOPROP_DEFINE_ERROR(RangeError);
TOMOPROP_DEFINE_ERROR(TimeError);
TOMOPROP_DEFINE_ERROR(CausticError);
TOMOPROP_DEFINE_ERROR(InvariantError);
TOMOPROP_DEFINE_ERROR(IoError);

#undef TOMOPROP_DEFINE_ERROR

// Malformed config document; line and column are 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error("ParseError", what), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Well-formed config that violates one or more invariants; every violation is listed.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> issues)
        : Error("ValidationError", join(issues)), issues_(std::move(issues)) {}
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<std::string>& issues) {
        std::string out;
        for (const auto& s : issues) {
            if (!out.empty()) out += "; ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> issues_;
};

}  // namespace tomoprop
