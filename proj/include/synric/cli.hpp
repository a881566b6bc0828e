#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "synric/config.hpp"
#include "synric/report.hpp"

namespace synric {

/// Marks failures of internal machinery rather than of user input.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// Resolved invocation of one CLI command.
struct RunConfig {
  std::string command;
  std::string space_path, edges_path, model_path, budget_path;
  std::string out_path, curve_path;
  std::vector<int> pair;
  int point = -1;
  std::vector<double> t_grid;
  std::vector<double> radii;
  double tol = -1.0;
  double K = 0.0;
  std::vector<double> ts;
  double smooth = -1.0;
  int workers = 1;
  long seed = 0;
};

namespace detail {

inline Json config_echo(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (!c.space_path.empty()) j["space"] = c.space_path;
  if (!c.edges_path.empty()) j["edges"] = c.edges_path;
  if (!c.model_path.empty()) j["model"] = c.model_path;
  if (!c.budget_path.empty()) j["budget"] = c.budget_path;
  if (!c.pair.empty()) j["pair"] = c.pair;
  if (c.point >= 0) j["point"] = c.point;
  if (!c.t_grid.empty()) j["tgrid"] = c.t_grid;
  if (!c.radii.empty()) j["radii"] = c.radii;
  if (c.tol >= 0.0) j["tol"] = c.tol;
  if (c.command == "cd-check") {
    j["K"] = c.K;
    j["ts"] = c.ts;
    j["smooth"] = c.smooth;
  }
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  return j;
}

inline void emit(const RunConfig& c, const Json& result) {
  Json j;
  j["version"] = kVersion;
  j["config"] = config_echo(c);
  j["result"] = result;
  const std::string text = j.dump(2) + "\n";
  if (c.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(c.out_path);
    if (!out) throw Error("cannot write report: " + c.out_path);
    out << text;
  }
}

inline void write_curve_csv(const std::string& path, const ThetaEstimate& est,
                            const std::vector<std::pair<double, double>>& curve) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write curve: " + path);
  out << "t,W,raw_quotient\n";
  char buf[96];
  for (size_t i = 0; i < curve.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", curve[i].first, curve[i].second,
                  est.raw[i]);
    out << buf;
  }
}

struct LoadedSpace {
  FiniteMMS space;
  std::optional<ModelManifold> model;
};

inline LoadedSpace load_space(const RunConfig& c, bool need_adjacency) {
  LoadedSpace ls;
  if (!c.model_path.empty()) {
    const auto mc = load_model_config(c.model_path);
    if (mc.res_a <= 0) throw Error(c.model_path + ": missing 'resolution'");
    ls.space = discretize(mc.model, mc.res_a, mc.res_b);
    ls.model = mc.model;
  } else if (!c.space_path.empty()) {
    ls.space = read_mms_csv(c.space_path);
    if (!c.edges_path.empty()) ls.space.adjacency = read_edge_list(c.edges_path);
    if (need_adjacency && ls.space.adjacency.empty())
      throw Error("command '" + c.command + "' needs mesh adjacency; pass --edges or --model");
  } else {
    throw Error("command '" + c.command + "' needs --space or --model");
  }
  return ls;
}

inline void need_pair(const RunConfig& c) {
  if (c.pair.size() != 2) throw Error("command '" + c.command + "' needs --pair i,j");
}

}  // namespace detail

/// Executes one command. Returns the process exit code: 0 success,
/// 2 validation failure, 3 numeric-confidence flag raised, 1 internal error.
inline int run(const RunConfig& c) {
  try {
    if (c.command == "validate") {
      auto ls = detail::load_space(c, false);
      const auto rep = validate(ls.space);
      detail::emit(c, to_json(rep));
      return rep.valid() ? 0 : 2;
    }

    if (c.command == "theta" || c.command == "sturm-verify") {
      detail::need_pair(c);
      if (c.t_grid.empty()) throw Error("command '" + c.command + "' needs --tgrid");
      auto ls = detail::load_space(c, true);
      const auto op = build_witten(ls.space);
      TransportOptions topts;
      topts.support_cutoff = 1e-16;
      const auto est = theta_plus(ls.space, op, c.pair[0], c.pair[1], c.t_grid, topts);
      Json result = to_json(est);
      bool flagged = est.low_confidence;
      if (c.command == "sturm-verify") {
        if (!ls.model) throw Error("sturm-verify needs --model");
        const auto bounds =
            sturm_bounds(*ls.model, ls.space.labels[c.pair[0]], ls.space.labels[c.pair[1]]);
        const double tol = std::max(0.1 * std::abs(est.value), 0.05);
        const bool inside = est.value >= bounds.lower - tol &&
                            (std::isinf(bounds.upper) || est.value <= bounds.upper + tol);
        result["bounds"] = to_json(bounds);
        result["sandwich_tol"] = tol;
        result["sandwich_pass"] = inside;
        flagged = flagged || !inside;
      }
      if (!c.curve_path.empty()) {
        const auto curve = contraction_curve(ls.space, op, c.pair[0], c.pair[1], c.t_grid, topts);
        detail::write_curve_csv(c.curve_path, est, curve);
      }
      detail::emit(c, result);
      return flagged ? 3 : 0;
    }

    if (c.command == "theta-star") {
      if (c.point < 0) throw Error("theta-star needs --point");
      if (c.radii.empty()) throw Error("theta-star needs --radii");
      auto ls = detail::load_space(c, true);
      const auto op = build_witten(ls.space);
      TransportOptions topts;
      topts.support_cutoff = 1e-16;
      const auto res =
          theta_star(ls.space, op, c.point, c.radii, ThetaGridPolicy{}, topts, c.workers);
      detail::emit(c, to_json(res));
      return 0;
    }

    if (c.command == "iso-group") {
      auto ls = detail::load_space(c, false);
      const auto group = enumerate_isometries(ls.space, c.tol);
      const auto scan = rigidity_scan(ls.space, group);
      detail::emit(c, to_json(group, scan));
      return 0;
    }

    if (c.command == "bochner-bound") {
      if (c.budget_path.empty()) throw Error("bochner-bound needs --budget");
      const auto bc = load_budget_config(c.budget_path);
      Json result = to_json(group_order_bound(bc.budget));
      if (bc.delta1 > 0.0 || bc.C_G > 0.0)
        result["ricci_variant"] = to_json(ricci_variant_threshold(bc.budget, bc.delta1, bc.C_G));
      detail::emit(c, result);
      return 0;
    }

    if (c.command == "cd-check") {
      detail::need_pair(c);
      if (c.ts.empty()) throw Error("cd-check needs --ts");
      auto ls = detail::load_space(c, true);
      if (!ls.model) throw Error("cd-check needs --model");
      const auto op = build_witten(ls.space);
      const double h = op.mesh_h;
      const double smooth = c.smooth > 0.0 ? c.smooth : 4.0 * h * h;
      const auto mu0 = heat_flow(op, dirac(ls.space, c.pair[0]), smooth).density;
      const auto mu1 = heat_flow(op, dirac(ls.space, c.pair[1]), smooth).density;
      TransportOptions topts;
      topts.support_cutoff = 1e-16;
      const auto rep = cd_convexity_check(ls.space, *ls.model, mu0, mu1, c.K, c.ts, topts);
      Json result = to_json(rep);
      result["smooth"] = smooth;
      detail::emit(c, result);
      return 0;
    }

    throw Error("unknown command: " + c.command);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace synric
