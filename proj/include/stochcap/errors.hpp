#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stochcap {

// Invalid argument or value outside a function's domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Identifiability { NoBreakdowns, NoSurvivals };

// The censored likelihood has no finite maximiser for the supplied data.
class NonIdentifiable : public std::runtime_error {
public:
    explicit NonIdentifiable(Identifiability reason)
        : std::runtime_error(reason == Identifiability::NoBreakdowns
                                 ? "no breakdowns recorded"
                                 : "no censored (non-breakdown) records"),
          reason_(reason) {}

    Identifiability reason() const noexcept { return reason_; }

private:
    Identifiability reason_;
};

// Design matrix is rank deficient. `columns` names the collinear set.
class SingularDesign : public std::runtime_error {
public:
    explicit SingularDesign(std::vector<std::string> columns)
        : std::runtime_error(describe(columns)), columns_(std::move(columns)) {}

    const std::vector<std::string>& columns() const noexcept { return columns_; }

private:
    static std::string describe(const std::vector<std::string>& cols) {
        std::string msg = "singular design: collinear columns {";
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) msg += ", ";
            msg += cols[i];
        }
        return msg + "}";
    }

    std::vector<std::string> columns_;
};

// Malformed input file; line and column are 1-based, 0 when not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        std::string msg = "line " + std::to_string(line);
        if (column) msg += ", column " + std::to_string(column);
        return msg + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

}  // namespace stochcap
