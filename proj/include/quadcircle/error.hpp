#pragma once

#include <stdexcept>
#include <string>

namespace qc {

/// Base class for every error raised by the library. The `kind()` tag is
/// what the command-line front end maps onto exit codes.
class Error : public std::runtime_error {
 public:
  enum class Kind { InvalidArgument, Domain, ResourceLimit, Overflow, Parse, Internal };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(Kind::InvalidArgument, w) {}
};

/// A formula was asked for outside the range where it holds.
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(Kind::Domain, w) {}
};

/// A residue-system loop or enumeration would exceed its work guard. Raised
/// before any summation starts, so partial values never escape.
struct ResourceLimit : Error {
  explicit ResourceLimit(const std::string& w) : Error(Kind::ResourceLimit, w) {}
};

struct ArithmeticOverflow : Error {
  explicit ArithmeticOverflow(const std::string& w) : Error(Kind::Overflow, w) {}
};

struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(Kind::Parse, w) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& w) : Error(Kind::Internal, w) {}
};

}  // namespace qc
