#pragma once

#include <cstdint>
#include <vector>

#include "error.hpp"

namespace bl {

// Square symmetric distance matrix over point ids 0..n-1.
struct DistanceMatrix {
  std::uint32_t n = 0;
  std::vector<double> d;

  double at(std::uint32_t i, std::uint32_t j) const { return d[std::size_t(i) * n + j]; }
  double& at(std::uint32_t i, std::uint32_t j) { return d[std::size_t(i) * n + j]; }
  static DistanceMatrix zero(std::uint32_t n) { return {n, std::vector<double>(std::size_t(n) * n, 0.0)}; }
};

// Right-continuous step path: value[i] on [time[i], time[i+1]), last piece
// closed at T.
struct StepPath {
  std::vector<double> times;          // times[0] == 0, strictly increasing
  std::vector<std::uint32_t> values;  // same length as times
  double horizon = 0.0;
};

// Finite metric-measure space with a path and a local-time field: the
// discrete stand-in for the quadruples compared by the extended
// Gromov-Hausdorff machinery.
struct Quadruple {
  DistanceMatrix space;
  std::vector<double> mass;
  StepPath path;
  std::vector<double> time_grid;                 // shared grid for local times
  std::vector<std::vector<double>> local_times;  // per point, values on time_grid
  std::uint32_t root = 0;
};

struct Correspondence {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
};

struct ProkhorovResult {
  double value = 0.0;
  bool exact = true;
};

// Prokhorov distance between atomic measures on a common finite metric
// space: bisection over epsilon, the set condition checked exactly by
// max-flow. Above 60 atoms a certified greedy-coupling upper bound is
// returned with exact=false.
ProkhorovResult prokhorov_distance(const std::vector<double>& mu, const std::vector<double>& nu,
                                   const DistanceMatrix& metric);

// Skorokhod J1 between step paths on a common space: infimum over monotone
// breakpoint alignments of (time displacement sup + metric displacement
// sup), exact via the alignment-lattice DP over candidate time shifts.
double skorokhod_j1(const StepPath& a, const StepPath& b, const DistanceMatrix& metric);

double correspondence_distortion(const Correspondence& c, const DistanceMatrix& da,
                                 const DistanceMatrix& db);

struct DkBounds {
  double prokhorov = 0.0;
  double skorokhod = 0.0;
  double pair_displacement = 0.0;
  double local_time_sup = 0.0;
  bool prokhorov_exact = true;

  double total() const { return prokhorov + skorokhod + pair_displacement + local_time_sup; }
};

// Upper bound on the quadruple distance for a GIVEN correspondence: both
// spaces are coupled in their correspondence sum space (matched pairs at
// half the distortion) and the four terms are evaluated there.
DkBounds dk_upper_bound(const Quadruple& qa, const Quadruple& qb, const Correspondence& c,
                        bool rooted = true);

// Pairs matched by equal normalized time between two parameterizations
// (point id per grid time); every point of both sides is covered via its
// first occurrence.
Correspondence contour_correspondence(const std::vector<std::uint32_t>& param_a,
                                      const std::vector<std::uint32_t>& param_b);

}  // namespace bl
