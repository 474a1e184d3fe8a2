#pragma once

#include <json.hpp>

#include "diagnostics.hpp"
#include "scalar_solver.hpp"
#include "uniqueness.hpp"

namespace segregation {

inline void to_json(nlohmann::json& j, const ViolationSummary& v) {
  j = nlohmann::json{{"count", v.count}, {"max_magnitude", v.max_magnitude}};
}

inline void from_json(const nlohmann::json& j, ViolationSummary& v) {
  j.at("count").get_to(v.count);
  j.at("max_magnitude").get_to(v.max_magnitude);
}

inline void to_json(nlohmann::json& j, const DiagnosticsReport& r) {
  j = nlohmann::json{{"overlap_matrix", r.overlap_matrix},
                     {"sub_violations", r.sub_violations},
                     {"super_violations", r.super_violations},
                     {"noninvasion", r.noninvasion},
                     {"energy", r.energy},
                     {"box_violations", r.box_violations},
                     {"h1_norms", r.h1_norms}};
}

inline void from_json(const nlohmann::json& j, DiagnosticsReport& r) {
  j.at("overlap_matrix").get_to(r.overlap_matrix);
  j.at("sub_violations").get_to(r.sub_violations);
  j.at("super_violations").get_to(r.super_violations);
  j.at("noninvasion").get_to(r.noninvasion);
  j.at("energy").get_to(r.energy);
  j.at("box_violations").get_to(r.box_violations);
  j.at("h1_norms").get_to(r.h1_norms);
}

inline void to_json(nlohmann::json& j, const NDReport& r) {
  j = nlohmann::json{{"margin", r.margin},
                     {"rayleigh_iterations", r.rayleigh_iterations},
                     {"nu_max", r.nu_max},
                     {"shift", r.shift}};
}

inline void to_json(nlohmann::json& j, const UniquenessReport& r) {
  j = nlohmann::json{{"trials", r.trials},
                     {"max_pairwise_h1_distance", r.max_pairwise_h1_distance},
                     {"all_converged", r.all_converged},
                     {"max_distance_to_center", r.max_distance_to_center},
                     {"iterations", r.iterations}};
}

}  // namespace segregation
