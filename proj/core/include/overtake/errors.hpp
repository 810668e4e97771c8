#pragma once

#include <stdexcept>
#include <string>

namespace overtake
{

/// Base class for every error raised by the planner.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of an operation (e.g. s beyond the road).
class DomainError : public Error
{
  public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error
{
  public:
    using Error::Error;
};

/// Scenario or configuration content failed validation; `field()` names the culprit.
class ValidationError : public Error
{
  public:
    ValidationError (std::string field, const std::string &what)
        : Error (field + ": " + what), field_ (std::move (field))
    {
    }
    const std::string &field () const noexcept { return field_; }

  private:
    std::string field_;
};

/// The spatio-temporal graph has no path from the start to any goal node.
class EmptyGraphPathError : public Error
{
  public:
    using Error::Error;
};

/// A normal-equation system was singular or badly conditioned.
class IllConditionedError : public Error
{
  public:
    IllConditionedError (const std::string &what, double condition)
        : Error (what), condition_ (condition)
    {
    }
    double condition () const noexcept { return condition_; }

  private:
    double condition_;
};

/// Planar speed fell below the flatness guard; heading and steering are undefined.
class DegenerateSpeedError : public Error
{
  public:
    DegenerateSpeedError (double t, const std::string &what) : Error (what), time_ (t) {}
    double time () const noexcept { return time_; }

  private:
    double time_;
};

/// Linearization requested at a steering angle where tan() is singular.
class LinearizationError : public Error
{
  public:
    using Error::Error;
};

/// No candidate passed both the collision and the feasibility screens.
class NoFeasibleTrajectoryError : public Error
{
  public:
    using Error::Error;
};

/// Closed-loop tracking drifted too far from the reference.
class DivergenceError : public Error
{
  public:
    DivergenceError (std::size_t step, const std::string &what) : Error (what), step_ (step) {}
    std::size_t step () const noexcept { return step_; }

  private:
    std::size_t step_;
};

} // namespace overtake
