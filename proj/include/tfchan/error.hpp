#pragma once

#include <stdexcept>
#include <string>

namespace tfchan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A time-frequency shift or lattice parameter that does not fall on the grid.
class OffGrid : public Error {
 public:
  OffGrid(const std::string& what, double nearest) : Error(what), nearest_(nearest) {}
  double nearest() const { return nearest_; }

 private:
  double nearest_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class WrapAroundRisk : public Error {
 public:
  using Error::Error;
};

/// The window's ambiguity function vanishes (numerically) on the bump support.
class NonvanishingViolation : public Error {
 public:
  NonvanishingViolation(const std::string& what, double eta, double u, double value)
      : Error(what), eta_(eta), u_(u), value_(value) {}
  double eta() const { return eta_; }
  double u() const { return u_; }
  double value() const { return value_; }

 private:
  double eta_, u_, value_;
};

class FramePreconditionUnmet : public Error {
 public:
  FramePreconditionUnmet(const std::string& what, double a_est)
      : Error(what), a_est_(a_est) {}
  double a_est() const { return a_est_; }

 private:
  double a_est_;
};

/// Error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace tfchan
