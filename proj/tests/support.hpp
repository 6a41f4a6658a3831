// Shared builders for unit tests.
#pragma once

#include <random>
#include <string>

#include "mosaic/geo.hpp"

namespace mosaic::testing {

inline geo::SocSenService make_service(std::string id, geo::GeoPoint loc, double dir_deg,
                                       double alpha_deg = 60.0, double visd_m = 100.0,
                                       double t = 0.0) {
    return {std::move(id), loc, geo::TimeSpan::instant(t), {dir_deg, alpha_deg, visd_m}};
}

inline const geo::GeoPoint kMelbourne{-37.8101008, 144.9634339};

inline geo::SceneQuery make_query(geo::GeoPoint center, double half_m = 200.0,
                                  double t0 = -3600.0, double t1 = 3600.0) {
    return {center, half_m, half_m, t0, t1};
}

}  // namespace mosaic::testing
