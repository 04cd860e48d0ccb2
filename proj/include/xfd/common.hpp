#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xfd {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Index = std::ptrdiff_t;

/// Counter-clockwise quarter turn: (r_x, r_y) -> (-r_y, r_x).
inline Vec2 perp(const Vec2& r) { return {-r.y(), r.x()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define XFD_DEFINE_ERROR(Name)                \
    class Name : public Error {               \
    public:                                   \
        using Error::Error;                   \
    }

XFD_DEFINE_ERROR(InvalidArgument);
XFD_DEFINE_ERROR(RootFindingFailure);
XFD_DEFINE_ERROR(EmptyFluid);
XFD_DEFINE_ERROR(SingularSystem);
XFD_DEFINE_ERROR(NewtonDiverged);
XFD_DEFINE_ERROR(SolidLeftDomain);
XFD_DEFINE_ERROR(ParseError);
XFD_DEFINE_ERROR(ValidationError);
XFD_DEFINE_ERROR(IoError);

#undef XFD_DEFINE_ERROR

#define XFD_REQUIRE(cond, Exc, msg)      \
    do {                                 \
        if (!(cond)) throw Exc(msg);     \
    } while (0)

} // namespace xfd
