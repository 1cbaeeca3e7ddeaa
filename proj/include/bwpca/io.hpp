#ifndef BWPCA_IO_HPP
#define BWPCA_IO_HPP

#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bwpca/dataset.hpp"
#include "bwpca/geodesic.hpp"
#include "bwpca/gpca.hpp"
#include "bwpca/tpca.hpp"

namespace bwpca {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

inline Json matrix_to_json(const Matrix& m) {
  Json arr = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) arr.push_back(m(i, j));
  return arr;
}

inline Matrix matrix_from_json(const Json& arr, int dim) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim * dim)
    throw std::runtime_error("matrix_from_json: expected " +
                             std::to_string(dim * dim) + " entries");
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = arr[i * dim + j].get<double>();
  return m;
}

// Infinite interval ends serialize as null.
inline Json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

inline double bound_from_json(const Json& j, double sign) {
  if (j.is_null()) return sign * std::numeric_limits<double>::infinity();
  return j.get<double>();
}

inline Json segment_to_json(const GeodesicSegment& seg) {
  return Json{{"dim", seg.base.dim()},
              {"A", matrix_to_json(seg.base.mat())},
              {"X", matrix_to_json(seg.direction)},
              {"t_min", bound_to_json(seg.t_min)},
              {"t_max", bound_to_json(seg.t_max)},
              {"epsilon", seg.epsilon}};
}

inline GeodesicSegment segment_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  return GeodesicSegment{FiberRep(matrix_from_json(j.at("A"), dim)),
                         matrix_from_json(j.at("X"), dim),
                         bound_from_json(j.at("t_min"), -1.0),
                         bound_from_json(j.at("t_max"), +1.0),
                         j.at("epsilon").get<double>()};
}

inline Json component_to_json(const PrincipalComponent& c) {
  Json j = segment_to_json(c.segment);
  j["order"] = c.order;
  j["cost"] = c.cost;
  j["projection_times"] = c.projection_times;
  j["converged"] = c.converged;
  if (c.intersection_time)
    j["intersection_time"] = *c.intersection_time;
  else
    j["intersection_time"] = nullptr;
  return j;
}

inline Json tpca_to_json(const TpcaResult& r) {
  Json dirs = Json::array();
  for (const auto& d : r.principal_directions) dirs.push_back(matrix_to_json(d));
  return Json{{"barycenter", matrix_to_json(r.barycenter.mat())},
              {"barycenter_converged", r.barycenter_converged},
              {"principal_directions", dirs},
              {"eigenvalues", r.eigenvalues},
              {"scores", r.scores}};
}

// ---------------------------------------------------------------------------
// Dataset persistence
// ---------------------------------------------------------------------------

inline Json dataset_to_json(const GaussianDataset& data) {
  Json mats = Json::array();
  for (const auto& s : data.matrices()) mats.push_back(matrix_to_json(s.mat()));
  return Json{{"dim", data.dim()}, {"matrices", mats}};
}

inline GaussianDataset dataset_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<SpdMatrix> mats;
  int row = 0;
  for (const auto& arr : j.at("matrices")) {
    try {
      mats.emplace_back(matrix_from_json(arr, dim));
    } catch (const std::exception& e) {
      throw std::runtime_error("dataset matrix " + std::to_string(row) +
                               ": " + e.what());
    }
    ++row;
  }
  return GaussianDataset(std::move(mats));
}

/// CSV dataset: first line "dim=d", then one matrix per row, row-major.
inline std::string dataset_to_csv(const GaussianDataset& data) {
  std::ostringstream out;
  out.precision(17);
  out << "dim=" << data.dim() << "\n";
  for (const auto& s : data.matrices()) {
    const Matrix& m = s.mat();
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) {
        if (i + j > 0) out << ",";
        out << m(i, j);
      }
    out << "\n";
  }
  return out.str();
}

inline GaussianDataset dataset_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim=", 0) != 0)
    throw std::runtime_error("CSV dataset: missing 'dim=d' header line");
  int dim = 0;
  try {
    dim = std::stoi(line.substr(4));
  } catch (const std::exception&) {
    throw std::runtime_error("CSV dataset: malformed header '" + line + "'");
  }
  std::vector<SpdMatrix> mats;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("CSV dataset line " + std::to_string(lineno) +
                                 ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != dim * dim)
      throw std::runtime_error("CSV dataset line " + std::to_string(lineno) +
                               ": expected " + std::to_string(dim * dim) +
                               " values, got " + std::to_string(vals.size()));
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = vals[i * dim + j];
    try {
      mats.emplace_back(m);
    } catch (const std::exception& e) {
      throw std::runtime_error("CSV dataset line " + std::to_string(lineno) +
                               " (matrix " + std::to_string(mats.size()) +
                               "): " + e.what());
    }
  }
  return GaussianDataset(std::move(mats));
}

inline GaussianDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
    return dataset_from_csv(in);
  Json j;
  in >> j;
  return dataset_from_json(j);
}

inline void save_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
}

inline void save_report(const Json& report, const std::string& path) {
  save_text(path, report.dump(2) + "\n");
}

/// RFC-4180 quoting for CSV cells.
inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

// ---------------------------------------------------------------------------
// SVG scatter of 2x2 datasets in cone coordinates with component curves
// ---------------------------------------------------------------------------

inline std::string render_svg(const GaussianDataset& data,
                              const std::vector<GeodesicSegment>& components) {
  if (data.dim() != 2)
    throw std::invalid_argument("render_svg: only d = 2 datasets");
  struct Pt {
    double u, v;
  };
  std::vector<Pt> pts;
  for (const auto& s : data.matrices()) {
    const auto c = spd_to_cone(s);
    pts.push_back({c.y, c.z});
  }
  std::vector<std::vector<Pt>> curves;
  for (const auto& seg : components) {
    std::vector<Pt> curve;
    const double lo = std::max(seg.t_min, -50.0);
    const double hi = std::min(seg.t_max, 50.0);
    for (int i = 0; i <= 200; ++i) {
      const double t = lo + (hi - lo) * i / 200.0;
      const auto c = spd_to_cone(geodesic_eval(seg, t));
      curve.push_back({c.y, c.z});
    }
    curves.push_back(std::move(curve));
  }
  double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300;
  auto grow = [&](const Pt& p) {
    ulo = std::min(ulo, p.u);
    uhi = std::max(uhi, p.u);
    vlo = std::min(vlo, p.v);
    vhi = std::max(vhi, p.v);
  };
  for (const auto& p : pts) grow(p);
  const double margin = 0.1 * std::max(uhi - ulo, vhi - vlo) + 1e-6;
  ulo -= margin;
  uhi += margin;
  vlo -= margin;
  vhi += margin;
  const double w = 600, hgt = 600;
  auto sx = [&](double u) { return (u - ulo) / (uhi - ulo) * w; };
  auto sy = [&](double v) { return hgt - (v - vlo) / (vhi - vlo) * hgt; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << hgt << "\" viewBox=\"0 0 " << w << " " << hgt
      << "\">\n";
  const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd"};
  for (size_t ci = 0; ci < curves.size(); ++ci) {
    svg << "<polyline fill=\"none\" stroke=\"" << colors[ci % 4]
        << "\" stroke-width=\"2\" points=\"";
    for (const auto& p : curves[ci]) {
      const double x = sx(p.u), y = sy(p.v);
      if (x < -1e4 || x > 1e4 || y < -1e4 || y > 1e4) continue;
      svg << x << "," << y << " ";
    }
    svg << "\"/>\n";
  }
  for (const auto& p : pts)
    svg << "<circle cx=\"" << sx(p.u) << "\" cy=\"" << sy(p.v)
        << "\" r=\"4\" fill=\"#333\"/>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace bwpca

#endif  // BWPCA_IO_HPP
