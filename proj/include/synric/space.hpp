#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "synric/common.hpp"

namespace synric {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Edge {
  int i = 0;
  int j = 0;
  double length = 0.0;
};

/// Discrete probability measure over the points of a space.
struct ProbVector {
  Vec p;

  int size() const { return static_cast<int>(p.size()); }
  double sum() const {
    KahanSum s;
    for (int i = 0; i < p.size(); ++i) s.add(p[i]);
    return s.value();
  }
  bool valid(double tol = 1e-12) const {
    if (p.size() == 0) return false;
    if (p.minCoeff() < 0.0) return false;
    return std::abs(sum() - 1.0) <= tol;
  }
};

/// Finite metric measure space: symmetric geodesic distance matrix, positive
/// cell masses, mesh edges for the heat generator, optional sample coordinates.
struct FiniteMMS {
  Mat dist;
  Vec weight;
  std::vector<Edge> adjacency;
  std::vector<std::array<double, 2>> labels;

  int n() const { return static_cast<int>(dist.rows()); }

  double diameter() const { return dist.size() ? dist.maxCoeff() : 0.0; }

  double min_positive_dist() const {
    double m = kInf;
    for (int i = 0; i < n(); ++i)
      for (int j = i + 1; j < n(); ++j)
        if (dist(i, j) > 0.0) m = std::min(m, dist(i, j));
    return m;
  }

  double total_mass() const {
    KahanSum s;
    for (int i = 0; i < weight.size(); ++i) s.add(weight[i]);
    return s.value();
  }

  /// Characteristic cell size: the longest mesh edge. Falls back to the
  /// smallest positive distance when no adjacency is present.
  double mesh_size() const {
    if (adjacency.empty()) return min_positive_dist();
    double h = 0.0;
    for (const auto& e : adjacency) h = std::max(h, e.length);
    return h;
  }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool valid() const { return issues.empty(); }
};

/// Checks every structural invariant of a FiniteMMS and reports violations.
/// The full O(n^3) triangle sweep is limited to n <= triangle_limit; larger
/// spaces get a deterministic strided sample of triples.
inline ValidationReport validate(const FiniteMMS& space, int triangle_limit = 800) {
  ValidationReport rep;
  const int n = space.n();
  char buf[160];

  if (n == 0) {
    rep.issues.emplace_back("space has no points");
    return rep;
  }
  if (space.dist.rows() != space.dist.cols()) {
    rep.issues.emplace_back("distance matrix is not square");
    return rep;
  }
  if (space.weight.size() != n) {
    rep.issues.emplace_back("weight vector length differs from point count");
    return rep;
  }

  const double dmax = space.dist.maxCoeff();
  const double tol = 1e-9 * std::max(dmax, 1e-300);

  for (int i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0) {
      std::snprintf(buf, sizeof(buf), "dist[%d][%d] = %.17g, expected 0", i, i, space.dist(i, i));
      rep.issues.emplace_back(buf);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (space.dist(i, j) != space.dist(j, i)) {
        std::snprintf(buf, sizeof(buf), "dist[%d][%d] != dist[%d][%d] (asymmetric)", i, j, j, i);
        rep.issues.emplace_back(buf);
      }
      if (space.dist(i, j) <= 0.0) {
        std::snprintf(buf, sizeof(buf), "dist[%d][%d] = %.17g, expected > 0 off the diagonal", i,
                      j, space.dist(i, j));
        rep.issues.emplace_back(buf);
      }
      if (rep.issues.size() > 64) return rep;
    }
  }

  // Triangle inequality d(i,j) <= d(i,k) + d(k,j) within 1e-9 * max(dist).
  const int stride = n <= triangle_limit ? 1 : (n / triangle_limit + 1);
  for (int i = 0; i < n; i += stride) {
    for (int j = i + 1; j < n; j += stride) {
      const double dij = space.dist(i, j);
      for (int k = 0; k < n; ++k) {
        if (dij > space.dist(i, k) + space.dist(k, j) + tol) {
          std::snprintf(buf, sizeof(buf),
                        "triangle inequality fails: d(%d,%d)=%.12g > d(%d,%d)+d(%d,%d)=%.12g", i,
                        j, dij, i, k, k, j, space.dist(i, k) + space.dist(k, j));
          rep.issues.emplace_back(buf);
          if (rep.issues.size() > 64) return rep;
          break;
        }
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!(space.weight[i] > 0.0)) {
      std::snprintf(buf, sizeof(buf), "weight[%d] = %.17g, expected > 0", i, space.weight[i]);
      rep.issues.emplace_back(buf);
    }
  }
  if (!std::isfinite(space.total_mass()))
    rep.issues.emplace_back("total mass is not finite");

  for (const auto& e : space.adjacency) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) {
      std::snprintf(buf, sizeof(buf), "adjacency edge (%d,%d) out of range", e.i, e.j);
      rep.issues.emplace_back(buf);
      continue;
    }
    if (std::abs(e.length - space.dist(e.i, e.j)) > tol) {
      std::snprintf(buf, sizeof(buf), "edge (%d,%d) length %.12g != dist %.12g", e.i, e.j,
                    e.length, space.dist(e.i, e.j));
      rep.issues.emplace_back(buf);
    }
    if (rep.issues.size() > 64) return rep;
  }
  return rep;
}

inline ProbVector dirac(const FiniteMMS& space, int i) {
  if (i < 0 || i >= space.n())
    throw Error("dirac: index " + std::to_string(i) + " out of range [0," +
                std::to_string(space.n()) + ")");
  ProbVector d;
  d.p = Vec::Zero(space.n());
  d.p[i] = 1.0;
  return d;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace detail

/// CSV layout: header "# mms n=<n>", n rows of n distances, one row of n weights.
inline FiniteMMS read_mms_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open space file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  int n = 0;
  if (std::sscanf(line.c_str(), "# mms n=%d", &n) != 1 || n <= 0)
    throw Error(path + ":1: expected header '# mms n=<n>'");

  FiniteMMS space;
  space.dist = Mat::Zero(n, n);
  space.weight = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw Error(path + ": truncated distance block at row " + std::to_string(i));
    auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) != n)
      throw Error(path + ":" + std::to_string(i + 2) + ": expected " + std::to_string(n) +
                  " distance entries, got " + std::to_string(cells.size()));
    for (int j = 0; j < n; ++j) space.dist(i, j) = std::stod(cells[j]);
  }
  if (!std::getline(in, line)) throw Error(path + ": missing weight row");
  auto cells = detail::split_csv_line(line);
  if (static_cast<int>(cells.size()) != n)
    throw Error(path + ": expected " + std::to_string(n) + " weights, got " +
                std::to_string(cells.size()));
  for (int j = 0; j < n; ++j) space.weight[j] = std::stod(cells[j]);
  return space;
}

inline void write_mms_csv(const FiniteMMS& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write space file: " + path);
  const int n = space.n();
  out << "# mms n=" << n << "\n";
  char buf[32];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", space.dist(i, j));
      out << buf << (j + 1 == n ? "\n" : ",");
    }
  }
  for (int j = 0; j < n; ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", space.weight[j]);
    out << buf << (j + 1 == n ? "\n" : ",");
  }
}

/// Edge list rows "i,j,length".
inline std::vector<Edge> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge file: " + path);
  std::vector<Edge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != 3)
      throw Error(path + ":" + std::to_string(lineno) + ": expected 'i,j,length'");
    edges.push_back({std::stoi(cells[0]), std::stoi(cells[1]), std::stod(cells[2])});
  }
  return edges;
}

}  // namespace synric
