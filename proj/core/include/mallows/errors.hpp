#pragma once

#include <stdexcept>
#include <string>

namespace mallows {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotABijection : public Error {
 public:
  using Error::Error;
};

class DuplicateValue : public Error {
 public:
  using Error::Error;
};

class BadParameter : public Error {
 public:
  using Error::Error;
};

class BadStatistic : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class Diverges : public Error {
 public:
  using Error::Error;
};

// A simulation exceeded a configured step cap. Truncating instead would bias
// every moment computed downstream, so these are always hard errors.
class ResourceCapExceeded : public Error {
 public:
  using Error::Error;
};

class ExcursionTooLong : public ResourceCapExceeded {
 public:
  using ResourceCapExceeded::ResourceCapExceeded;
};

class ReturnTooLong : public ResourceCapExceeded {
 public:
  using ResourceCapExceeded::ResourceCapExceeded;
};

}  // namespace mallows
