#pragma once

#include <stdexcept>
#include <string>

namespace asplund {

/// A value fell outside the domain of a LIP operation (e.g. a grey level >= M).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The caller asked for something ill-formed: empty regions, mismatched
/// channel counts, a tolerance that would discard every point.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reading or writing an image/map failed, or the file format is unsupported.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace asplund
