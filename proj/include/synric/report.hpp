#pragma once

#include <json.hpp>

#include "synric/bochner.hpp"
#include "synric/curvature.hpp"
#include "synric/isometry.hpp"
#include "synric/space.hpp"

namespace synric {

using Json = nlohmann::ordered_json;

/// JSON-safe number: infinities become the strings "inf"/"-inf".
inline Json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

inline Json to_json(const ValidationReport& rep) {
  Json j;
  j["valid"] = rep.valid();
  j["issues"] = rep.issues;
  return j;
}

inline Json to_json(const SturmBounds& b) {
  Json j;
  j["lower"] = json_number(b.lower);
  j["upper"] = json_number(b.upper);
  j["sigma"] = b.sigma;
  j["d"] = b.d;
  return j;
}

inline Json to_json(const ThetaEstimate& est) {
  Json j;
  j["pair"] = {est.x, est.y};
  j["d"] = est.d;
  j["t_grid"] = est.t_grid;
  j["raw"] = est.raw;
  j["value"] = est.value;
  j["residual"] = est.fit_residual;
  j["order"] = est.order;
  j["low_confidence"] = est.low_confidence;
  return j;
}

inline Json to_json(const ThetaStarResult& res) {
  Json j;
  j["value"] = res.value;
  Json seq = Json::array();
  for (const auto& row : res.sequence) {
    Json r;
    r["radius"] = row.radius;
    r["value"] = row.value;
    r["pairs"] = row.pairs;
    r["argmax_pair"] = {row.argmax[0], row.argmax[1]};
    seq.push_back(r);
  }
  j["sequence"] = seq;
  return j;
}

inline Json to_json(const IsometryGroup& group, const RigidityScan& scan,
                    size_t element_limit = 10000) {
  Json j;
  j["order"] = group.elements.size();
  j["tol"] = group.tol;
  Json gens = Json::array();
  for (int gi : group.generator_indices) gens.push_back(group.elements[gi].perm);
  j["generators"] = gens;
  if (group.elements.size() <= element_limit) {
    Json elems = Json::array();
    for (const auto& e : group.elements) elems.push_back(e.perm);
    j["elements"] = elems;
  }
  j["rigidity_lambda"] = scan.trivial_group ? Json("inf") : json_number(scan.lambda);
  return j;
}

inline Json to_json(const SmallnessReport& rep) {
  Json j;
  j["norm"] = rep.norm;
  j["threshold"] = rep.threshold;
  j["margin"] = rep.margin;
  j["pass"] = rep.pass;
  return j;
}

inline Json to_json(const ConstantsReport& rep) {
  Json j;
  j["C1"] = rep.tan_constants.c1;
  j["C2"] = rep.tan_constants.c2;
  j["delta0"] = rep.tan_constants.delta0;
  j["delta"] = rep.threshold.delta;
  j["delta_branches"] = {{"delta0", rep.threshold.branch_delta0},
                         {"arctan", rep.threshold.branch_arctan},
                         {"sobolev_a", rep.threshold.branch_sobolev_a},
                         {"sobolev_b", rep.threshold.branch_sobolev_b}};
  j["delta_packing"] = rep.delta_packing;
  j["packing"] = {{"ratio", rep.packing.ratio},
                  {"volume_big", rep.packing.volume_big},
                  {"volume_small", rep.packing.volume_small}};
  j["L"] = rep.L;
  j["L1"] = rep.L1.str();
  return j;
}

inline Json to_json(const RicciVariantThreshold& th) {
  Json j;
  j["delta"] = th.delta;
  j["epsilon"] = th.epsilon;
  j["volume_times_E"] = th.volume_times_e;
  j["delta_branches"] = {{"delta1", th.branch_delta1},
                         {"sobolev_a", th.branch_sobolev_a},
                         {"sobolev_b", th.branch_sobolev_b}};
  j["note"] =
      "delta1 and C_G are non-constructive inputs supplied by the caller; "
      "the measure bound is the comparison volume V(n, Lambda1, D) times E";
  return j;
}

inline Json to_json(const CdCheckReport& rep) {
  Json j;
  j["w2"] = rep.w2;
  j["entropy0"] = rep.entropy0;
  j["entropy1"] = rep.entropy1;
  j["pass"] = rep.pass;
  j["worst_violation"] = json_number(rep.worst_violation);
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    Json q;
    q["t"] = p.t;
    q["entropy"] = p.entropy_t;
    q["chord"] = p.chord;
    q["slack"] = p.slack;
    q["pass"] = p.pass;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

}  // namespace synric
