// types.hpp — shared linear-algebra aliases, the standard symplectic form,
// and the error hierarchy used across the toolkit.

#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hamshade {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};
struct GradientUnavailable : Error {
    using Error::Error;
};
struct HessianUnavailable : Error {
    using Error::Error;
};
struct InverseUnavailable : Error {
    using Error::Error;
};
struct StepRejected : Error {
    using Error::Error;
};
struct SingularStart : Error {
    using Error::Error;
};
struct SingularPoint : Error {
    using Error::Error;
};
struct SingularOnOrbit : Error {
    using Error::Error;
};
struct DegenerateForm : Error {
    using Error::Error;
};
struct NoReturn : Error {
    using Error::Error;
};
struct TangentialCrossing : Error {
    using Error::Error;
};
struct NoConvergence : Error {
    using Error::Error;
};
struct SingularJacobian : Error {
    using Error::Error;
};
struct EigenFailure : Error {
    using Error::Error;
};
struct NudgeOutOfReach : Error {
    using Error::Error;
};
struct RankCollapse : Error {
    using Error::Error;
};
struct OrbitEscaped : Error {
    using Error::Error;
};
struct OutOfWindow : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct InsufficientSteps : Error {
    using Error::Error;
};

/// Chain-validation errors carry the offending index.
/// Malformed input documents and command-line configuration.
struct ConfigError : Error {
    using Error::Error;
};

struct JumpTooLarge : Error {
    int index;
    JumpTooLarge(int i, const std::string& what) : Error(what), index(i) {}
};
struct TimeTooShort : Error {
    int index;
    TimeTooShort(int i, const std::string& what) : Error(what), index(i) {}
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]] on R^{2n}.
inline Mat symplectic_J(int two_n) {
    if (two_n % 2 != 0) throw DimensionMismatch("symplectic_J: dimension must be even");
    const int n = two_n / 2;
    Mat J = Mat::Zero(two_n, two_n);
    J.topRightCorner(n, n) = Mat::Identity(n, n);
    J.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
    return J;
}

/// Applies J without forming the matrix: (q, p) -> (p, -q) blocks.
inline Vec apply_J(const Vec& v) {
    const int two_n = static_cast<int>(v.size());
    if (two_n % 2 != 0) throw DimensionMismatch("apply_J: vector length must be even");
    const int n = two_n / 2;
    Vec out(two_n);
    out.head(n) = v.tail(n);
    out.tail(n) = -v.head(n);
    return out;
}

/// ω(u, v) = uᵀ J v for the standard form.
inline double omega(const Vec& u, const Vec& v) {
    return u.dot(apply_J(v));
}

/// Max-abs norm of MᵀJM − J; zero exactly when M is symplectic.
inline double symplectic_defect(const Mat& M) {
    const Mat J = symplectic_J(static_cast<int>(M.rows()));
    return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

/// 2x2 rotation by angle theta.
inline Mat rot2(double theta) {
    Mat R(2, 2);
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

/// Rotation by theta acting on coordinates (i, j) of an identity matrix in R^d.
inline Mat rotation_in_plane(int d, int i, int j, double theta) {
    Mat R = Mat::Identity(d, d);
    const double c = std::cos(theta), s = std::sin(theta);
    R(i, i) = c;
    R(i, j) = -s;
    R(j, i) = s;
    R(j, j) = c;
    return R;
}

inline bool all_finite(const Vec& v) {
    return v.allFinite();
}

}  // namespace hamshade
