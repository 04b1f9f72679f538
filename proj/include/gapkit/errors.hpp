#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gapkit {

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A predicate or search would have to enumerate more combinations than the
// configured cap allows. `work` is the number of box points the call would
// have visited (for meet-in-the-middle paths: table plus scan sizes).
class CapExceededError : public Error {
 public:
  CapExceededError(unsigned long long work, unsigned long long cap)
      : Error("enumeration cap exceeded: work=" + std::to_string(work) +
              " cap=" + std::to_string(cap)),
        work(work),
        cap(cap) {}
  unsigned long long work;
  unsigned long long cap;
};

class ZeroInverseError : public Error {
 public:
  ZeroInverseError() : Error("inverse of zero requested") {}
};

class NotSingularError : public Error {
 public:
  NotSingularError() : Error("matrix is invertible mod p; no null vector exists") {}
};

class NotInvertibleError : public Error {
 public:
  explicit NotInvertibleError(const std::string& what_) : Error(what_) {}
};

class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what_) : Error(what_) {}
};

class OverflowError : public Error {
 public:
  explicit OverflowError(const std::string& what_) : Error(what_) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what_) : Error(what_) {}
};

class NoRootError : public Error {
 public:
  explicit NoRootError(const std::string& what_) : Error(what_) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what_) : Error(what_) {}
};

}  // namespace gapkit
