#pragma once

#include <string>
#include <vector>

#include "rfxy/model.hpp"

namespace rfxy::harness {

enum class Formulation { kManifold, kAngular };

struct BenchRow {
  std::string operation;
  Formulation formulation;
  double mean_seconds;
};

/// Mean wall time per call of each objective kernel in both formulations:
/// cost, cost + retraction, Euclidean gradient, Riemannian gradient,
/// Euclidean Hessian-vector and Riemannian Hessian-vector (the Riemannian
/// rows include the Euclidean work they depend on). Single-threaded.
/// Throws std::invalid_argument for repetitions < 100.
std::vector<BenchRow> bench_kernels(const Instance& inst, int repetitions,
                                    std::uint64_t seed = 7);

/// Mean time of (operation, formulation); throws std::out_of_range if absent.
double bench_time(const std::vector<BenchRow>& rows, const std::string& operation,
                  Formulation formulation);

std::string format_bench_table(const std::vector<BenchRow>& rows);

}  // namespace rfxy::harness
