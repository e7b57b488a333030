#include "mmgeo/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mmgeo::io {

using nlohmann::json;

std::string format_double(double v) {
  // shortest decimal that round-trips
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

Eigen::MatrixXd dist_from_points(const json& pts, const std::string& metric,
                                 double circumference) {
  const int n = static_cast<int>(pts.size());
  std::vector<std::vector<double>> x(n);
  for (int i = 0; i < n; ++i) {
    if (pts[i].is_array())
      x[i] = pts[i].get<std::vector<double>>();
    else
      x[i] = {pts[i].get<double>()};
  }
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (metric == "euclidean") {
        double acc = 0.0;
        for (std::size_t k = 0; k < x[i].size(); ++k) {
          const double t = x[i][k] - x[j][k];
          acc += t * t;
        }
        d(i, j) = std::sqrt(acc);
      } else if (metric == "circle") {
        const double gap = std::abs(x[i][0] - x[j][0]);
        const double m = std::fmod(gap, circumference);
        d(i, j) = std::min(m, circumference - m);
      } else {
        throw std::invalid_argument("unknown metric: " + metric);
      }
    }
  return d;
}

}  // namespace

FinitePmmSpace space_from_json(const std::string& text) {
  json j = json::parse(text);
  FinitePmmSpace s;
  const int n = j.at("n").get<int>();
  s.mass.resize(n);
  const auto& mass = j.at("mass");
  if (static_cast<int>(mass.size()) != n) throw std::invalid_argument("mass length != n");
  for (int i = 0; i < n; ++i) s.mass(i) = mass[i].get<double>();
  s.base = j.at("base").get<int>();

  const auto& dist = j.at("dist");
  if (dist.is_array()) {
    if (static_cast<int>(dist.size()) != n) throw std::invalid_argument("dist rows != n");
    s.dist.resize(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(dist[i].size()) != n) throw std::invalid_argument("dist cols != n");
      for (int jj = 0; jj < n; ++jj) s.dist(i, jj) = dist[i][jj].get<double>();
    }
  } else {
    const std::string metric = dist.at("metric").get<std::string>();
    const double circ = dist.value("circumference", 1.0);
    s.dist = dist_from_points(dist.at("points"), metric, circ);
    if (s.dist.rows() != n) throw std::invalid_argument("points length != n");
  }
  return s;
}

FinitePmmSpace load_space(const std::string& path) { return space_from_json(read_file(path)); }

std::string space_to_json(const FinitePmmSpace& space) {
  // hand-rolled serialization through format_double for byte stability
  std::ostringstream os;
  os << "{\"n\": " << space.n() << ", \"dist\": [";
  for (int i = 0; i < space.n(); ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < space.n(); ++j)
      os << (j ? ", " : "") << format_double(space.dist(i, j));
    os << "]";
  }
  os << "], \"mass\": [";
  for (int i = 0; i < space.n(); ++i)
    os << (i ? ", " : "") << format_double(space.mass(i));
  os << "], \"base\": " << space.base << "}\n";
  return os.str();
}

void save_space(const FinitePmmSpace& space, const std::string& path) {
  write_file(path, space_to_json(space));
}

Eigen::VectorXd load_vector(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<double> vals;
  // try JSON array first
  if (!text.empty() && text.find('[') != std::string::npos) {
    json j = json::parse(text);
    for (const auto& v : j) vals.push_back(v.get<double>());
  } else {
    std::istringstream is(text);
    double v;
    while (is >> v) vals.push_back(v);
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<Eigen::Index>(i)) = vals[i];
  return out;
}

std::string trace_to_csv(const flow::FlowTrace& trace, const std::vector<double>& residuals) {
  std::ostringstream os;
  os << "time,entropy,speed,fisher,residual\n";
  for (std::size_t k = 0; k < trace.states.size(); ++k) {
    const double speed = k < trace.step_w2.size() ? trace.step_w2[k] / trace.tau : 0.0;
    const double res = k < residuals.size() ? residuals[k] : 0.0;
    os << format_double(trace.times[k]) << ',' << format_double(trace.entropies[k]) << ','
       << format_double(speed) << ',' << format_double(trace.fishers[k]) << ','
       << format_double(res) << '\n';
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for write: " + path);
  f << content;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace mmgeo::io
