#pragma once

#include <stdexcept>
#include <string>

namespace bellrec {

// Precondition violated by the caller (bad angle range, bad probabilities, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// A computation left its numerical tolerance envelope.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what) : std::runtime_error(what) {}
};

class NotPsdError : public NumericalFailure {
 public:
  explicit NotPsdError(const std::string& what) : NumericalFailure(what) {}
};

}  // namespace bellrec
