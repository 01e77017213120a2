#pragma once

#include <stdexcept>
#include <string>

namespace ptme {

enum class ErrorKind {
    InvalidArgument,
    Io,
    Parse,
    DegenerateGeometry,
    InsufficientData,
    Numerical,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, what) {}
};

struct DegenerateGeometry : Error {
    explicit DegenerateGeometry(const std::string& what) : Error(ErrorKind::DegenerateGeometry, what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error(ErrorKind::InsufficientData, what) {}
};

struct NumericalFailure : Error {
    explicit NumericalFailure(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

}  // namespace ptme
