#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace radial {

/// Hypothesis clause violated by a rejected problem.
enum class Clause {
  kDimension,          // n integer >= 2
  kOrder,              // 1 < p <= 2
  kDimensionVsOrder,   // n > p
  kGrowth,             // q > 2
  kOuterGrowth,        // Q > q (double-power family)
  kNonlinearityShape,  // b > 0 inside, b = 0 at -d_minus and d_plus
  kDelta,              // delta > -p
  kWeightPositive,     // h > 0
  kWeightLimits,       // h0, h_inf finite and positive
  kWeightDerivative,   // limsup h'(r) r < inf near 0, h'(r) r^(1+varpi) -> 0
  kVarpi,              // varpi > 0
  kSupercritical,      // l > p*
  kOracleOnly,         // family only allowed in oracle mode
};

std::string_view clause_name(Clause clause);

class InvalidSpec : public std::runtime_error {
 public:
  InvalidSpec(Clause clause, const std::string& detail)
      : std::runtime_error(std::string(clause_name(clause)) + ": " + detail), clause_(clause) {}

  Clause clause() const noexcept { return clause_; }

 private:
  Clause clause_;
};

/// Base of every failure raised by the numerical pipeline (CLI exit code 3).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateLimit : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class QuadratureFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class StepFailure : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NonFiniteState : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class BadSeed : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class InconsistentAngle : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class UnresolvedBracket : public NumericalFailure {
 public:
  UnresolvedBracket(int k, const std::string& detail)
      : NumericalFailure("unresolved bracket for k=" + std::to_string(k) + ": " + detail), k_(k) {}
  int k() const noexcept { return k_; }

 private:
  int k_;
};

class GridTooCoarse : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NoCrossing : public NumericalFailure {
 public:
  NoCrossing(int k, const std::string& detail)
      : NumericalFailure("no crossing for k=" + std::to_string(k) + ": " + detail), k_(k) {}
  int k() const noexcept { return k_; }

 private:
  int k_;
};

/// Closed-form family requested outside the setting where it solves the equation.
class UnsupportedFamily : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ViolationFound : public NumericalFailure {
 public:
  ViolationFound(double t, const std::string& detail)
      : NumericalFailure("invariance violated at t=" + std::to_string(t) + ": " + detail), t_(t) {}
  double t() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace radial
