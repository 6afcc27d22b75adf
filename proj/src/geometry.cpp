#include "gtr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gtr {

namespace {

void check_cosine(double c, const char* name) {
    if (!(c >= -1.0 && c <= 1.0)) {
        throw std::domain_error(std::string(name) + " must lie in [-1, 1]");
    }
}

}  // namespace

UnitVector3 UnitVector3::normalized(double x, double y, double z) {
    const double norm = std::hypot(x, y, z);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("cannot normalize a zero or non-finite vector");
    }
    // A vector that is already unit length to rounding error keeps its bits;
    // dividing by 1 +- ulp would drift them and break the byte round trip of
    // serialized scenarios.
    if (std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
        return UnitVector3(x, y, z);
    }
    return UnitVector3(x / norm, y / norm, z / norm);
}

UnitVector3 UnitVector3::from_spherical(double polar, double azimuth) {
    const double sp = std::sin(polar);
    return UnitVector3(sp * std::cos(azimuth), sp * std::sin(azimuth), std::cos(polar));
}

double dot(const UnitVector3& a, const UnitVector3& b) {
    return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

double landing_coordinate(const UnitVector3& state, const MeasurementAxis& axis) {
    const UnitVector3& a = axis.yes_anchor();
    // A state sitting at an anchor lands exactly on that endpoint. The dot
    // product of a normalized vector with itself can round below 1, which
    // would leak break-point mass into the wrong elastic fragment.
    if (state == a) return 1.0;
    if (state == -a) return -1.0;
    return std::clamp(dot(state, a), -1.0, 1.0);
}

bool gram_realizable(double cos_theta_a, double cos_theta_b, double cos_theta) {
    check_cosine(cos_theta_a, "cos_theta_a");
    check_cosine(cos_theta_b, "cos_theta_b");
    check_cosine(cos_theta, "cos_theta");
    constexpr double tol = 1e-10;
    const double minor2 = 1.0 - cos_theta_a * cos_theta_a;
    const double det = 1.0 + 2.0 * cos_theta_a * cos_theta_b * cos_theta
                       - cos_theta_a * cos_theta_a - cos_theta_b * cos_theta_b
                       - cos_theta * cos_theta;
    return minor2 >= -tol && det >= -tol;
}

EmbeddedGeometry embed(const ScenarioGeometry& g) {
    if (!gram_realizable(g.cos_theta_a, g.cos_theta_b, g.cos_theta)) {
        throw std::domain_error("cosine triple is not realizable on the unit sphere");
    }
    const double ca = g.cos_theta_a;
    const double cb = g.cos_theta_b;
    const double c = g.cos_theta;

    const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    const UnitVector3 state = UnitVector3::normalized(0.0, 0.0, 1.0);
    const UnitVector3 a_yes = UnitVector3::normalized(sa, 0.0, ca);

    double bx, by;
    if (sa > 1e-12) {
        bx = (c - ca * cb) / sa;
        by = std::sqrt(std::max(0.0, 1.0 - cb * cb - bx * bx));
    } else {
        // a_yes is (anti)parallel to the state; the Gram check already
        // forced c == ca*cb, so b is free in the orthogonal direction.
        bx = std::sqrt(std::max(0.0, 1.0 - cb * cb));
        by = 0.0;
    }
    const UnitVector3 b_yes = UnitVector3::normalized(bx, by, cb);
    return EmbeddedGeometry{state, a_yes, b_yes};
}

}  // namespace gtr
