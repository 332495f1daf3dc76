#pragma once

#include <stdexcept>
#include <string>

namespace tbpoint {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong vector lengths, non-finite data, bad enum values.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A linear system whose matrix is too ill-conditioned to trust its solution.
class NearSingular : public Error {
 public:
  NearSingular(const std::string& what, double cond)
      : Error(what), cond_(cond) {}
  double cond() const noexcept { return cond_; }

 private:
  double cond_;
};

/// Numerical rank below n-1 where a simple zero is required.
class RankDeficiencyMismatch : public Error {
 public:
  RankDeficiencyMismatch(const std::string& what, int rank)
      : Error(what), rank_(rank) {}
  int rank() const noexcept { return rank_; }

 private:
  int rank_;
};

class DegenerateNormalization : public Error {
 public:
  using Error::Error;
};

class MissingDerivatives : public Error {
 public:
  using Error::Error;
};

class ConditionIFailed : public Error {
 public:
  using Error::Error;
};

class SingularNuSystem : public Error {
 public:
  using Error::Error;
};

}  // namespace tbpoint
