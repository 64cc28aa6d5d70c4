#pragma once

#include <stdexcept>
#include <string>

namespace bl {

// One code per failure class; the C API forwards these verbatim.
enum class errc {
  invalid_argument,
  parse_error,
  disconnected_graph,
  nonpositive_weight,
  fewer_than_two_vertices,
  dimension_mismatch,
  solver_not_converged,
  size_limit_exceeded,
  timeout,
  too_many_timeouts,
  infeasible_size,
  rejection_budget_exceeded,
  not_tenable,
  index_out_of_range,
  invalid_probability,
  odd_degree_sum,
  degenerate_weights,
  no_admissible_tuples,
  infeasible_surplus,
  resolution_too_coarse,
  unresolvable_identification,
  horizon_too_short,
  empty_kernel,
  too_many_breakpoints,
  missing_parameterization,
  insufficient_samples,
  unknown_key,
  io_error,
  internal,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace bl
