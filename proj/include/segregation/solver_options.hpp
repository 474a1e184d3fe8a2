#pragma once

#include "discrete_ops.hpp"

namespace segregation {

struct SolverOptions {
  double newton_tol = 1e-9;
  double cg_tol = 1e-10;
  double eig_tol = 1e-8;
  int max_newton = 200;
  int max_backtracks = 30;
  int gauss_seidel_sweeps = 50;

  LinearSolveOptions linear() const { return {cg_tol, 0}; }
};

}  // namespace segregation
