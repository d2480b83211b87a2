#include "levitodyn/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levitodyn/errors.hpp"

namespace levitodyn {

namespace {

void check_axis(int axis) {
  if (axis < 1 || axis > 3) {
    throw InvalidArgument("rotation axis must be 1, 2 or 3");
  }
}

void check_gimbal(double beta, double threshold) {
  if (std::abs(std::sin(beta)) < threshold) {
    std::ostringstream msg;
    msg << "Euler angle beta = " << beta << " is within the gimbal-lock band (|sin beta| < "
        << threshold << ")";
    throw GimbalLock(msg.str());
  }
}

double nearest_branch(double angle, double reference) {
  const double two_pi = 2.0 * kPi;
  return angle + two_pi * std::round((reference - angle) / two_pi);
}

}  // namespace

InertiaTensor::InertiaTensor(double i1, double i2, double i3) : moments_(i1, i2, i3) {
  if (!(i1 > 0.0 && i2 > 0.0 && i3 > 0.0)) {
    throw InvalidArgument("principal moments of inertia must be strictly positive");
  }
  // Relative slack so that exactly-degenerate (planar) bodies pass.
  const double slack = 1e-12 * (i1 + i2 + i3);
  if (i1 + i2 < i3 - slack || i2 + i3 < i1 - slack || i1 + i3 < i2 - slack) {
    throw InvalidArgument("principal moments violate the triangle inequality");
  }
}

Mat3 axis_rotation(int axis, double angle) {
  check_axis(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r;
  switch (axis) {
    case 1:
      r << 1, 0, 0, 0, c, -s, 0, s, c;
      break;
    case 2:
      r << c, 0, s, 0, 1, 0, -s, 0, c;
      break;
    default:
      r << c, -s, 0, s, c, 0, 0, 0, 1;
      break;
  }
  return r;
}

Mat3 rotation_from_euler(const EulerAngles& phi) {
  const double ca = std::cos(phi.alpha), sa = std::sin(phi.alpha);
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  const double cg = std::cos(phi.gamma), sg = std::sin(phi.gamma);
  Mat3 f;
  f << ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb,
       sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb,
       -sb * cg, sb * sg, cb;
  return f;
}

EulerAngles euler_from_rotation(const Mat3& rotation, const EulerAngles* reference) {
  const double cb = std::clamp(rotation(2, 2), -1.0, 1.0);
  EulerAngles phi;
  phi.beta = std::acos(cb);
  const double sb = std::sin(phi.beta);
  if (sb > 1e-12) {
    phi.alpha = std::atan2(rotation(1, 2), rotation(0, 2));
    phi.gamma = std::atan2(rotation(2, 1), -rotation(2, 0));
  } else {
    // Only alpha +/- gamma is defined; put everything into alpha.
    phi.gamma = reference ? reference->gamma : 0.0;
    const double sum = std::atan2(rotation(1, 0), rotation(0, 0));
    phi.alpha = (cb > 0.0) ? sum - phi.gamma : sum + phi.gamma - kPi;
  }
  if (reference) {
    phi.alpha = nearest_branch(phi.alpha, reference->alpha);
    phi.gamma = nearest_branch(phi.gamma, reference->gamma);
  }
  return phi;
}

Mat3 n_matrix(const EulerAngles& phi) {
  const double ca = std::cos(phi.alpha), sa = std::sin(phi.alpha);
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  Mat3 n;
  n << 0.0, -sa, ca * sb,
       0.0, ca, sa * sb,
       1.0, 0.0, cb;
  return n;
}

Mat3 n_matrix_inverse(const EulerAngles& phi, double threshold) {
  check_gimbal(phi.beta, threshold);
  const double ca = std::cos(phi.alpha), sa = std::sin(phi.alpha);
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  Mat3 inv;
  inv << -ca * cb / sb, -sa * cb / sb, 1.0,
         -sa, ca, 0.0,
         ca / sb, sa / sb, 0.0;
  return inv;
}

Mat3 body_rate_matrix(const EulerAngles& phi) {
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  const double cg = std::cos(phi.gamma), sg = std::sin(phi.gamma);
  Mat3 b;
  b << -sb * cg, sg, 0.0,
       sb * sg, cg, 0.0,
       cb, 0.0, 1.0;
  return b;
}

Mat3 body_rate_matrix_derivative(const EulerAngles& phi, int angle) {
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  const double cg = std::cos(phi.gamma), sg = std::sin(phi.gamma);
  Mat3 d = Mat3::Zero();
  if (angle == 1) {
    d << -cb * cg, 0.0, 0.0,
         cb * sg, 0.0, 0.0,
         -sb, 0.0, 0.0;
  } else if (angle == 2) {
    d << sb * sg, cg, 0.0,
         sb * cg, -sg, 0.0,
         0.0, 0.0, 0.0;
  }
  return d;
}

namespace {

// Inverse of body_rate_matrix, valid away from gimbal lock.
Mat3 body_rate_inverse(const EulerAngles& phi, double threshold) {
  check_gimbal(phi.beta, threshold);
  const double cb = std::cos(phi.beta), sb = std::sin(phi.beta);
  const double cg = std::cos(phi.gamma), sg = std::sin(phi.gamma);
  Mat3 inv;
  inv << -cg / sb, sg / sb, 0.0,
         sg, cg, 0.0,
         cb * cg / sb, -cb * sg / sb, 1.0;
  return inv;
}

}  // namespace

Vec3 lab_angular_momentum(const EulerAngles& phi, const AngularMomenta& pi, double threshold) {
  return n_matrix_inverse(phi, threshold).transpose() * pi.vector();
}

AngularMomenta momenta_from_lab(const EulerAngles& phi, const Vec3& lab_momentum) {
  return AngularMomenta::from_vector(n_matrix(phi).transpose() * lab_momentum);
}

double rotational_kinetic_energy(const EulerAngles& phi, const AngularMomenta& pi,
                                 const InertiaTensor& inertia, double threshold) {
  const Vec3 body = body_rate_inverse(phi, threshold).transpose() * pi.vector();
  return 0.5 * body.dot(body.cwiseQuotient(inertia.moments()));
}

Vec3 euler_rates(const EulerAngles& phi, const AngularMomenta& pi, const InertiaTensor& inertia,
                 double threshold) {
  const Mat3 binv = body_rate_inverse(phi, threshold);
  const Vec3 body = binv.transpose() * pi.vector();
  return binv * body.cwiseQuotient(inertia.moments());
}

Vec3 kinetic_energy_angle_gradient(const EulerAngles& phi, const AngularMomenta& pi,
                                   const InertiaTensor& inertia, double threshold) {
  // T = L_b^T I^-1 L_b / 2 with L_b = B^-T pi, so dT/dq = -L_b^T (dB/dq) phidot.
  const Mat3 binv = body_rate_inverse(phi, threshold);
  const Vec3 body = binv.transpose() * pi.vector();
  const Vec3 rates = binv * body.cwiseQuotient(inertia.moments());
  Vec3 grad = Vec3::Zero();
  for (int angle = 1; angle <= 2; ++angle) {
    grad[angle] = -body.dot(body_rate_matrix_derivative(phi, angle) * rates);
  }
  return grad;
}

Mat3 rotational_mass_matrix(const EulerAngles& phi, const InertiaTensor& inertia) {
  const Mat3 b = body_rate_matrix(phi);
  return b.transpose() * inertia.matrix() * b;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v[2], v[1],
       v[2], 0.0, -v[0],
       -v[1], v[0], 0.0;
  return s;
}

Mat3 rotation_generator(int axis) {
  check_axis(axis);
  return skew(Vec3::Unit(axis - 1));
}

}  // namespace levitodyn
