#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <numbers>

#include "mhl/errors.hpp"
#include "mhl/radar/types.hpp"

namespace mhl::radar {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

struct Gaussian {
  Vec4 mean = Vec4::Zero();
  Mat4 cov = Mat4::Identity();
};

struct Innovation {
  Vec2 nu = Vec2::Zero();
  Mat2 S = Mat2::Identity();
  double d2 = 0.0;          // squared Mahalanobis distance
  double likelihood = 0.0;  // N(nu; 0, S)
};

/// Constant-velocity model over (x, y, vx, vy) with white acceleration noise.
struct CvModel {
  double sigmaA = 1.0;
  double sigmaZ = 20.0;

  static Mat4 transition(double dt) {
    Mat4 F = Mat4::Identity();
    F(0, 2) = dt;
    F(1, 3) = dt;
    return F;
  }

  Mat4 processNoise(double dt) const {
    const double q = sigmaA * sigmaA;
    const double a = q * dt * dt * dt * dt / 4, b = q * dt * dt * dt / 2, c = q * dt * dt;
    Mat4 Q = Mat4::Zero();
    Q(0, 0) = Q(1, 1) = a;
    Q(0, 2) = Q(2, 0) = Q(1, 3) = Q(3, 1) = b;
    Q(2, 2) = Q(3, 3) = c;
    return Q;
  }

  Mat2 measurementNoise() const { return Mat2::Identity() * sigmaZ * sigmaZ; }

  Gaussian predict(const Gaussian& s, double dt) const {
    const Mat4 F = transition(dt);
    return {F * s.mean, F * s.cov * F.transpose() + processNoise(dt)};
  }

  Innovation innovate(const Gaussian& predicted, const Vec2& z) const {
    Innovation in;
    in.nu = z - predicted.mean.head<2>();
    in.S = predicted.cov.topLeftCorner<2, 2>() + measurementNoise();
    Eigen::LLT<Mat2> llt(in.S);
    if (llt.info() != Eigen::Success) throw Error(Errc::SingularCovariance, "innovation covariance is not SPD");
    in.d2 = in.nu.dot(llt.solve(in.nu));
    const double det = in.S.determinant();
    in.likelihood = std::exp(-0.5 * in.d2) / (2.0 * std::numbers::pi * std::sqrt(det));
    return in;
  }

  Gaussian update(const Gaussian& predicted, const Vec2& z) const {
    const Innovation in = innovate(predicted, z);
    Eigen::Matrix<double, 4, 2> PHt = predicted.cov.leftCols<2>();
    Eigen::Matrix<double, 4, 2> K = PHt * in.S.inverse();
    Gaussian out;
    out.mean = predicted.mean + K * in.nu;
    // Joseph form keeps the covariance symmetric.
    Eigen::Matrix<double, 4, 4> IKH = Mat4::Identity();
    IKH.leftCols<2>() -= K;
    out.cov = IKH * predicted.cov * IKH.transpose() + K * measurementNoise() * K.transpose();
    return out;
  }

  Gaussian initiate(const Vec2& z, double velocityStd) const {
    Gaussian g;
    g.mean << z.x(), z.y(), 0.0, 0.0;
    g.cov = Mat4::Zero();
    const double pz = std::max(sigmaZ * sigmaZ, 1e-6);
    g.cov(0, 0) = g.cov(1, 1) = pz;
    g.cov(2, 2) = g.cov(3, 3) = velocityStd * velocityStd;
    return g;
  }
};

/// Closed gate: the boundary passes.
inline bool inGate(double d2, double gamma) { return d2 <= gamma; }

inline Gaussian toGaussian(const TargetPositionFact& f) {
  Gaussian g;
  for (int i = 0; i < 4; ++i) g.mean(i) = f.mean[i];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) g.cov(r, c) = f.cov[r * 4 + c];
  return g;
}

inline void storeGaussian(const Gaussian& g, TargetPositionFact& f) {
  for (int i = 0; i < 4; ++i) f.mean[i] = g.mean(i);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) f.cov[r * 4 + c] = g.cov(r, c);
}

/// The fact's state carried forward to `tick`.
inline Gaussian predictTo(const CvModel& m, const TargetPositionFact& f, Tick tick, double scanPeriod) {
  return m.predict(toGaussian(f), static_cast<double>(tick - f.lastDetection) * scanPeriod);
}

}  // namespace mhl::radar
