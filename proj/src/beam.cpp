#include "ionlight/beam.hpp"

#include <cmath>

namespace ionlight::beam {

double spot_size(const BeamGeometry& beam, Axis axis, double y) {
  const double u = (y - beam.focal_y(axis)) / beam.rayleigh_range(axis);
  return beam.waist(axis) * std::sqrt(1.0 + u * u);
}

double inverse_radius_of_curvature(const BeamGeometry& beam, Axis axis,
                                   double y) {
  const double d = y - beam.focal_y(axis);
  const double yR = beam.rayleigh_range(axis);
  return d / (d * d + yR * yR);
}

double gouy_phase(const BeamGeometry& beam, double y) {
  const double ux = (y - beam.focal_y_x) / beam.rayleigh_range(Axis::x);
  const double uz = (y - beam.focal_y_z) / beam.rayleigh_range(Axis::z);
  return 0.5 * (std::atan(ux) + std::atan(uz));
}

Field field_at(const BeamGeometry& beam, const BeamFramePoint& p) {
  // p is already expressed in this beam's frame; any lab-to-beam flip of the
  // propagation axis is applied by the caller via propagation_sign.
  const double wx = spot_size(beam, Axis::x, p.y);
  const double wz = spot_size(beam, Axis::z, p.y);
  const double k = beam.wavevector();

  Field f;
  f.amplitude = std::sqrt(beam.power / (constants::pi * wx * wz)) *
                std::exp(-p.x * p.x / (wx * wx) - p.z * p.z / (wz * wz));
  f.phase = -k * p.y + gouy_phase(beam, p.y) -
            0.5 * k *
                (p.x * p.x * inverse_radius_of_curvature(beam, Axis::x, p.y) +
                 p.z * p.z * inverse_radius_of_curvature(beam, Axis::z, p.y)) +
            beam.phase0;
  return f;
}

}  // namespace ionlight::beam
