#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "synric/bochner.hpp"
#include "synric/model.hpp"

namespace synric {

/// Flat key=value file; '#' starts a comment, blank lines ignored.
inline std::map<std::string, std::string> parse_keyvalue(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

struct ModelConfig {
  ModelManifold model;
  int res_a = 0;
  int res_b = 0;
};

namespace detail {

inline void set_series_coef(FourierSeries& series, bool is_cos, int k, double val) {
  auto& v = is_cos ? series.cos_coef : series.sin_coef;
  if (static_cast<int>(v.size()) <= k) v.resize(k + 1, 0.0);
  v[k] = val;
}

}  // namespace detail

/// Model config keys: kind (circle|sphere|torus), radius, a, b,
/// resolution ("256" or "24x48"), and potential coefficients
///   circle:  v.cos.K / v.sin.K      coefficient of cos(K theta) / sin(K theta)
///   sphere:  v.cospow.K             coefficient of cos(theta)^K
///   torus:   vx.cos.K, vx.sin.K, vy.cos.K, vy.sin.K   (period = side length)
inline ModelConfig load_model_config(const std::string& path) {
  const auto kv = parse_keyvalue(path);
  ModelConfig cfg;
  const auto get = [&](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const auto* kind = get("kind");
  if (!kind) throw Error(path + ": missing 'kind'");
  if (*kind == "circle")
    cfg.model.kind = ModelKind::Circle;
  else if (*kind == "sphere")
    cfg.model.kind = ModelKind::Sphere;
  else if (*kind == "torus")
    cfg.model.kind = ModelKind::Torus;
  else
    throw Error(path + ": unknown kind '" + *kind + "'");

  if (const auto* r = get("radius")) cfg.model.radius = std::stod(*r);
  if (const auto* a = get("a")) cfg.model.side_a = std::stod(*a);
  if (const auto* b = get("b")) cfg.model.side_b = std::stod(*b);

  if (const auto* res = get("resolution")) {
    const auto x = res->find('x');
    if (x == std::string::npos) {
      cfg.res_a = std::stoi(*res);
    } else {
      cfg.res_a = std::stoi(res->substr(0, x));
      cfg.res_b = std::stoi(res->substr(x + 1));
    }
  }

  for (const auto& [key, val] : kv) {
    const double value = [&] {
      return key.rfind("v.", 0) == 0 || key.rfind("vx.", 0) == 0 || key.rfind("vy.", 0) == 0
                 ? std::stod(val)
                 : 0.0;
    }();
    if (key.rfind("v.cos.", 0) == 0)
      detail::set_series_coef(cfg.model.v_angle, true, std::stoi(key.substr(6)), value);
    else if (key.rfind("v.sin.", 0) == 0)
      detail::set_series_coef(cfg.model.v_angle, false, std::stoi(key.substr(6)), value);
    else if (key.rfind("v.cospow.", 0) == 0) {
      const int k = std::stoi(key.substr(9));
      if (static_cast<int>(cfg.model.v_polar.coef.size()) <= k)
        cfg.model.v_polar.coef.resize(k + 1, 0.0);
      cfg.model.v_polar.coef[k] = value;
    } else if (key.rfind("vx.cos.", 0) == 0)
      detail::set_series_coef(cfg.model.v_x, true, std::stoi(key.substr(7)), value);
    else if (key.rfind("vx.sin.", 0) == 0)
      detail::set_series_coef(cfg.model.v_x, false, std::stoi(key.substr(7)), value);
    else if (key.rfind("vy.cos.", 0) == 0)
      detail::set_series_coef(cfg.model.v_y, true, std::stoi(key.substr(7)), value);
    else if (key.rfind("vy.sin.", 0) == 0)
      detail::set_series_coef(cfg.model.v_y, false, std::stoi(key.substr(7)), value);
  }

  // Potential kinds must match the manifold kind.
  if (cfg.model.kind != ModelKind::Circle && !cfg.model.v_angle.zero())
    throw Error(path + ": v.cos/v.sin potentials apply to circles only");
  if (cfg.model.kind != ModelKind::Sphere && !cfg.model.v_polar.zero())
    throw Error(path + ": v.cospow potentials apply to spheres only");
  if (cfg.model.kind != ModelKind::Torus && !(cfg.model.v_x.zero() && cfg.model.v_y.zero()))
    throw Error(path + ": vx/vy potentials apply to tori only");
  return cfg;
}

struct BudgetConfig {
  GeometryBudget budget;
  double delta1 = 0.0;  // 0 = absent
  double C_G = 0.0;     // 0 = absent
};

/// Budget config keys: n, N, i0, Lambda1, Lambda2, Lambda3, V, D, E, w, A, B,
/// and the optional non-constructive inputs delta1, C_G.
inline BudgetConfig load_budget_config(const std::string& path) {
  const auto kv = parse_keyvalue(path);
  BudgetConfig cfg;
  const auto get = [&](const std::string& key, double* out) {
    const auto it = kv.find(key);
    if (it != kv.end()) *out = std::stod(it->second);
  };
  if (const auto it = kv.find("n"); it != kv.end()) cfg.budget.n = std::stoi(it->second);
  get("N", &cfg.budget.N);
  get("i0", &cfg.budget.i0);
  get("Lambda1", &cfg.budget.Lambda1);
  get("Lambda2", &cfg.budget.Lambda2);
  get("Lambda3", &cfg.budget.Lambda3);
  get("V", &cfg.budget.V);
  get("D", &cfg.budget.D);
  get("E", &cfg.budget.E);
  get("w", &cfg.budget.w);
  get("A", &cfg.budget.A);
  get("B", &cfg.budget.B);
  get("delta1", &cfg.delta1);
  get("C_G", &cfg.C_G);
  return cfg;
}

}  // namespace synric
