#pragma once

#include <stdexcept>
#include <string>

namespace siv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

// ascending state labels are ambiguous
class DegenerateStates : public Error {
 public:
  using Error::Error;
};

class FitFailed : public Error {
 public:
  using Error::Error;
};

class SingularNormalMatrix : public FitFailed {
 public:
  using FitFailed::FitFailed;
};

class MaxIterations : public FitFailed {
 public:
  using FitFailed::FitFailed;
};

class UnknownModel : public Error {
 public:
  using Error::Error;
};

class StepTooLarge : public Error {
 public:
  using Error::Error;
};

class UncalibratedGate : public Error {
 public:
  using Error::Error;
};

}  // namespace siv
