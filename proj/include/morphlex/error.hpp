#pragma once

#include <stdexcept>
#include <string>

namespace morphlex {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or record (vector files, TSVs, model and rule files).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix shapes that do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Not enough usable data to train, fit or evaluate.
class DataError : public Error {
public:
    using Error::Error;
};

/// No character n-gram of a form was found in the n-gram table.
class CompositionError : public Error {
public:
    using Error::Error;
};

class UnknownTagError : public Error {
public:
    using Error::Error;
};

class NoRuleError : public Error {
public:
    using Error::Error;
};

class NoAnalysisError : public Error {
public:
    using Error::Error;
};

/// A word has no vector (not in the space and not composable).
class UnresolvableError : public Error {
public:
    using Error::Error;
};

/// Every translation route failed for a source form.
class UntranslatableError : public Error {
public:
    using Error::Error;
};

}  // namespace morphlex
