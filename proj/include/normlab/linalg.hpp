#pragma once

#include <vector>

#include <Eigen/Dense>

#include "normlab/jet.hpp"

namespace nlab {

using Matrix = Eigen::MatrixXd;
using VectorX = Eigen::VectorXd;

constexpr double kSingularCondition = 1e12;

// 2-norm condition number from the singular values.
double condition_number(const Matrix& m);

// Inverse of `m`; SingularMetric when the condition number exceeds 1e12.
Matrix invert_checked(const Matrix& m);

// Row-major n×n matrix of jets and its inverse, with d(G⁻¹) = −G⁻¹ dG G⁻¹.
std::vector<Jet1> invert_jet(const std::vector<Jet1>& g, int n);

Matrix values_of(const std::vector<Jet1>& m, int n);

}  // namespace nlab
