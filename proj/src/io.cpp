#include "dfh/io.hpp"

#include <charconv>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dfh::io {

namespace {

class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& os) : os_(os), old_(os.precision()) {
    os_.precision(std::numeric_limits<double>::max_digits10);
  }
  ~PrecisionGuard() { os_.precision(old_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  std::ostream& os_;
  std::streamsize old_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) throw std::invalid_argument("empty number");
  s = s.substr(b, e - b + 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

void write_points_csv(std::ostream& os, const PointSet& points) {
  PrecisionGuard guard(os);
  for (std::size_t i = 0; i < points.dim(); ++i) os << (i ? "," : "") << 'x' << i + 1;
  os << '\n';
  for (const auto& p : points.points()) {
    for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << '\n';
  }
}

void write_model_csv(std::ostream& os, const QuadraticModel& q) {
  PrecisionGuard guard(os);
  const Eigen::Index n = q.alpha.size();
  os << "alpha0";
  for (Eigen::Index i = 0; i < n; ++i) os << ",alpha" << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) os << ",h" << i + 1 << j + 1;
  }
  os << '\n' << q.alpha0;
  for (Eigen::Index i = 0; i < n; ++i) os << ',' << q.alpha[i];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) os << ',' << q.H(i, j);
  }
  os << '\n';
}

void write_report_csv(std::ostream& os, const ConvergenceReport& report) {
  PrecisionGuard guard(os);
  os << "beta,error_spec,error_fro,bound,evals\n";
  for (const auto& r : report.rows) {
    os << r.beta << ',' << r.error_spec << ',' << r.error_fro << ',' << r.bound << ',' << r.evals << '\n';
  }
}

Vector parse_vector(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw std::invalid_argument("empty vector");
  Vector v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(parts[i]);
  return v;
}

Matrix parse_matrix(const std::string& text) {
  const auto rows = split(text, ';');
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  std::vector<Vector> parsed;
  for (const auto& r : rows) parsed.push_back(parse_vector(r));
  const Eigen::Index cols = parsed.front().size();
  Matrix m(static_cast<Eigen::Index>(parsed.size()), cols);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].size() != cols) throw std::invalid_argument("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
  }
  return m;
}

}  // namespace dfh::io
