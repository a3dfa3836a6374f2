#ifndef PSEUDOMCF_ERRORS_HPP_
#define PSEUDOMCF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pseudomcf {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation precondition (mismatched signature, bad index, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

// Induced metric is (numerically) singular at some node.
class DegenerateMetricError : public Error {
 public:
  DegenerateMetricError(const std::string& what, std::size_t node)
      : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// |<H,H>| below tolerance where a principal normal is required.
class NullMeanCurvatureError : public Error {
 public:
  NullMeanCurvatureError(const std::string& what, std::size_t node)
      : Error(what), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// Argument outside the domain where a closed-form law is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace pseudomcf

#endif  // PSEUDOMCF_ERRORS_HPP_
