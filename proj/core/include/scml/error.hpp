#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scml {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileNotFound : public Error {
public:
    explicit FileNotFound(const std::string& path) : Error("file not found: " + path), path_(path) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV cell. `row` is the 0-based data row (header excluded), `col` the 0-based column.
class ParseError : public Error {
public:
    ParseError(std::size_t row, std::size_t col, const std::string& what)
        : Error("parse error at row " + std::to_string(row) + ", column " + std::to_string(col) + ": " + what),
          row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class EmptyDataset : public Error {
public:
    EmptyDataset() : Error("dataset contains no rows") {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class KTooLarge : public InvalidArgument {
public:
    KTooLarge(std::size_t k, std::size_t n)
        : InvalidArgument("k=" + std::to_string(k) + " requires more than " + std::to_string(k) +
                          " points, got n=" + std::to_string(n)) {}
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

class TooFewLandmarks : public Error {
public:
    using Error::Error;
};

class TooFewPoints : public Error {
public:
    using Error::Error;
};

class EmptyClassAfterSampling : public Error {
public:
    explicit EmptyClassAfterSampling(int label)
        : Error("class " + std::to_string(label) + " has no sampled members"), label_(label) {}
    int label() const noexcept { return label_; }

private:
    int label_;
};

}  // namespace scml
