#pragma once

#include <stdexcept>
#include <string>

namespace blast {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class NonFiniteInput : public Error {
public:
    explicit NonFiniteInput(const std::string& msg) : Error(msg) {}
};

class RankMismatch : public Error {
public:
    explicit RankMismatch(const std::string& msg) : Error(msg) {}
};

// thrown when an optimizer step produces a non-finite factor entry
class NonFiniteUpdate : public Error {
public:
    NonFiniteUpdate(const std::string& msg, int iter)
        : Error(msg + " at iteration " + std::to_string(iter)), iteration(iter) {}
    int iteration;
};

class SolveFailure : public Error {
public:
    explicit SolveFailure(const std::string& msg) : Error(msg) {}
};

class NotPositiveDefinite : public SolveFailure {
public:
    explicit NotPositiveDefinite(const std::string& msg) : SolveFailure(msg) {}
};

class UnsupportedDtype : public Error {
public:
    explicit UnsupportedDtype(const std::string& msg) : Error(msg) {}
};

class NotTwoDimensional : public Error {
public:
    explicit NotTwoDimensional(const std::string& msg) : Error(msg) {}
};

class CorruptHeader : public Error {
public:
    explicit CorruptHeader(const std::string& msg) : Error(msg) {}
};

class VersionMismatch : public Error {
public:
    explicit VersionMismatch(const std::string& msg) : Error(msg) {}
};

class ShapeMismatch : public Error {
public:
    explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

class IoFailure : public Error {
public:
    explicit IoFailure(const std::string& msg) : Error(msg) {}
};

}  // namespace blast
