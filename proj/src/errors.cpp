#include "dfh/errors.hpp"

#include <sstream>

namespace dfh {

namespace {

std::string rank_message(const std::string& name, std::size_t rank, std::size_t required) {
  std::ostringstream os;
  os << "rank deficient: direction set " << name << " has rank " << rank
     << ", full row rank " << required << " required";
  return os.str();
}

std::string oracle_message(const Vector& point, const std::string& reason) {
  std::ostringstream os;
  os << "oracle failure at (";
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    if (i != 0) os << ", ";
    os << point[i];
  }
  os << "): " << reason;
  return os.str();
}

}  // namespace

RankDeficientError::RankDeficientError(std::string set_name, std::size_t rank, std::size_t required)
    : Error(rank_message(set_name, rank, required)), set_name_(std::move(set_name)), rank_(rank) {}

OracleError::OracleError(const Vector& point, const std::string& reason)
    : Error(oracle_message(point, reason)), point_(point) {}

}  // namespace dfh
