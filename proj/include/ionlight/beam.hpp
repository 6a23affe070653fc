#pragma once

#include <stdexcept>

#include "ionlight/constants.hpp"

namespace ionlight::beam {

enum class Axis { x, z };

// One Raman beam: an elliptical TEM00 Gaussian with simple astigmatism
// (independent foci for the two principal transverse axes). The beam frame
// shares the lab axes up to the sign of the propagation direction; x is the
// tight transverse axis, z the loose one, y the propagation axis.
struct BeamGeometry {
  double power = 0.0;            // W
  double wavelength = 0.0;       // m
  double waist_x = 0.0;          // focal waist along x (m)
  double waist_z = 0.0;          // focal waist along z (m)
  double focal_y_x = 0.0;        // y of the x-axis focus (m)
  double focal_y_z = 0.0;        // y of the z-axis focus (m)
  double phase0 = 0.0;           // constant phase offset (rad)
  int propagation_sign = +1;     // +1 or -1 along the shared lab y axis

  double wavevector() const { return 2.0 * constants::pi / wavelength; }
  double rayleigh_range(Axis axis) const {
    const double w = axis == Axis::x ? waist_x : waist_z;
    return constants::pi * w * w / wavelength;
  }
  double waist(Axis axis) const { return axis == Axis::x ? waist_x : waist_z; }
  double focal_y(Axis axis) const {
    return axis == Axis::x ? focal_y_x : focal_y_z;
  }

  void validate() const {
    if (!(power > 0.0)) throw std::invalid_argument("beam power must be > 0");
    if (!(wavelength > 0.0))
      throw std::invalid_argument("beam wavelength must be > 0");
    if (!(waist_x > 0.0 && waist_z > 0.0))
      throw std::invalid_argument("beam waists must be > 0");
    if (propagation_sign != 1 && propagation_sign != -1)
      throw std::invalid_argument("propagation_sign must be +1 or -1");
  }
};

// A point in the beam frame (m).
struct BeamFramePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Field {
  double amplitude;  // sqrt(W)/m units; square integrates to power/2
  double phase;      // rad
};

// Spot semi-axis w(y) = w_f * sqrt(1 + ((y - y_f)/y_R)^2).
double spot_size(const BeamGeometry& beam, Axis axis, double y);

// 1/R(y) = (y - y_f) / ((y - y_f)^2 + y_R^2); regular at the focus.
double inverse_radius_of_curvature(const BeamGeometry& beam, Axis axis,
                                   double y);

// Axial phase anomaly: half the sum of arctan((y - y_f)/y_R) over both axes.
double gouy_phase(const BeamGeometry& beam, double y);

// Closed-form field (amplitude, phase) at a beam-frame point. This is the
// oracle the series expansions are tested against.
Field field_at(const BeamGeometry& beam, const BeamFramePoint& p);

}  // namespace ionlight::beam
