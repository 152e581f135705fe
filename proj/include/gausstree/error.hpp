#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gausstree {

/// Base class for every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// Sample columns that make an estimator undefined (zero norm, collinear, singular).
class DegenerateSample : public Error {
public:
    explicit DegenerateSample(const std::string& what, std::optional<std::size_t> column = std::nullopt)
        : Error(column ? what + " (column " + std::to_string(*column) + ")" : what), column_(column) {}

    std::optional<std::size_t> column() const noexcept { return column_; }

private:
    std::optional<std::size_t> column_;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class SingularSubmatrix : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class TargetUnreachable : public Error {
public:
    TargetUnreachable(const std::string& what, std::size_t achieved)
        : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}

    std::size_t achieved() const noexcept { return achieved_; }

private:
    std::size_t achieved_;
};

class SearchExhausted : public Error {
public:
    using Error::Error;
};

} // namespace gausstree
