#pragma once

#include <stdexcept>
#include <string>

namespace morphseg {

/// Malformed input file (duplicate token, bad affix spelling, bad TSV row).
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input parses but violates a cross-resource invariant (affix missing from vocab).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a library call, e.g. an empty word.
class argument_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A token needed for serialization is not in the vocabulary.
class serialization_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data has the wrong shape for the requested operation: too few words,
/// a single-class training split, degenerate statistics samples.
class data_shape_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid run configuration (overlapping label sets, undefined mode/kind combination).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A file or resource could not be opened or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace morphseg
