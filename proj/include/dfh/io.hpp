#pragma once

#include "dfh/quadmodel.hpp"
#include "dfh/sets.hpp"
#include "dfh/study.hpp"

#include <ostream>
#include <string>

namespace dfh::io {

/// Header x1,...,xn then one point per row.
void write_points_csv(std::ostream& os, const PointSet& points);

/// Header alpha0,alpha1..alphan,h11,h12,...,hnn over the upper triangle.
void write_model_csv(std::ostream& os, const QuadraticModel& q);

/// Header `beta,error_spec,error_fro,bound,evals`, one row per beta.
void write_report_csv(std::ostream& os, const ConvergenceReport& report);

/// Parses rows separated by ';' and entries by ',' (for example "1,0;0,1").
/// Throws std::invalid_argument on ragged or non-numeric input.
Matrix parse_matrix(const std::string& text);

/// Parses a comma-separated vector.
Vector parse_vector(const std::string& text);

}  // namespace dfh::io
