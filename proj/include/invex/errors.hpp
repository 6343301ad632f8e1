#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace invex {

/// Base of every error thrown by the toolkit.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was not met by the caller.
class contract_violation : public error {
public:
  using error::error;
};

/// A map was evaluated (or asked to be evaluated) outside its domain.
class domain_error : public error {
public:
  using error::error;
};

class differentiation_failure : public error {
public:
  differentiation_failure(const std::string& what, int coordinate)
      : error(what), coordinate_(coordinate) {}
  int coordinate() const noexcept { return coordinate_; }

private:
  int coordinate_;
};

class inversion_failure : public error {
public:
  using error::error;
};

/// Iteration budget exhausted; carries the best iterate seen.
class non_convergence : public error {
public:
  non_convergence(const std::string& what, Eigen::VectorXd best)
      : error(what), best_(std::move(best)) {}
  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }

private:
  Eigen::VectorXd best_;
};

class infeasible_state : public error {
public:
  using error::error;
};

/// Bracketing solver failed; carries the last bracket.
class solver_error : public error {
public:
  solver_error(const std::string& what, double lo, double hi)
      : error(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

private:
  double lo_;
  double hi_;
};

/// The supplied g does not invert f at a sampled point.
class invalid_pair : public error {
public:
  invalid_pair(const std::string& what, std::size_t sample)
      : error(what), sample_(sample) {}
  std::size_t sample() const noexcept { return sample_; }

private:
  std::size_t sample_;
};

class config_error : public error {
public:
  config_error(const std::string& what, int line, std::string field)
      : error(what), line_(line), field_(std::move(field)) {}
  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  int line_;
  std::string field_;
};

}  // namespace invex
