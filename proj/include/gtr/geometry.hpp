#pragma once

#include <stdexcept>

namespace gtr {

/// Point on the unit 2-sphere. Immutable; norm is 1 to within 1e-9.
class UnitVector3 {
public:
    static UnitVector3 normalized(double x, double y, double z);
    static UnitVector3 from_spherical(double polar, double azimuth);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    UnitVector3 operator-() const { return UnitVector3(-x_, -y_, -z_); }
    friend bool operator==(const UnitVector3&, const UnitVector3&) = default;

private:
    UnitVector3(double x, double y, double z) : x_(x), y_(y), z_(z) {}

    double x_, y_, z_;
};

double dot(const UnitVector3& a, const UnitVector3& b);

/// Axis of a dichotomic measurement: the "yes" anchor point; the "no"
/// anchor is its antipode.
class MeasurementAxis {
public:
    explicit MeasurementAxis(UnitVector3 yes_anchor) : yes_(yes_anchor) {}

    const UnitVector3& yes_anchor() const { return yes_; }
    UnitVector3 no_anchor() const { return -yes_; }
    MeasurementAxis swapped() const { return MeasurementAxis(-yes_); }

private:
    UnitVector3 yes_;
};

/// Cosines of the angles state-to-A-anchor, state-to-B-anchor and
/// A-anchor-to-B-anchor. Only triples realizable by actual unit vectors
/// (positive semidefinite Gram matrix) describe a scenario.
struct ScenarioGeometry {
    double cos_theta_a = 1.0;
    double cos_theta_b = 1.0;
    double cos_theta = 1.0;
};

struct EmbeddedGeometry {
    UnitVector3 state;
    UnitVector3 a_yes;
    UnitVector3 b_yes;
};

/// Coordinate at which the state lands when projected orthogonally onto
/// the measurement elastic: the dot product with the yes anchor, clamped
/// into [-1, 1].
double landing_coordinate(const UnitVector3& state, const MeasurementAxis& axis);

/// True iff the Gram matrix [[1,cA,cB],[cA,1,c],[cB,c,1]] is positive
/// semidefinite within 1e-10. Inputs outside [-1,1] are a domain error.
bool gram_realizable(double cos_theta_a, double cos_theta_b, double cos_theta);

/// Canonical unit-vector realization of a cosine triple. Throws
/// std::domain_error when the triple fails gram_realizable.
EmbeddedGeometry embed(const ScenarioGeometry& geometry);

}  // namespace gtr
