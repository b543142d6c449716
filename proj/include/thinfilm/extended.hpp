#pragma once

#include <cmath>
#include <limits>

#if defined(__SIZEOF_FLOAT128__) && __has_include(<quadmath.h>)
#define THINFILM_HAVE_FLOAT128 1
#include <quadmath.h>
#else
#define THINFILM_HAVE_FLOAT128 0
#endif

namespace thinfilm {

/// Widest scalar available for the algebraic viscosity maps. The inverse map
/// has a square-root knee at zeta = eta0, so near tau = 0 the root sits within
/// a few double ULPs of eta0; the extended instantiation resolves it anyway.
#if THINFILM_HAVE_FLOAT128
using extended_real = __float128;
#else
using extended_real = long double;
#endif

namespace num {

using std::exp;
using std::expm1;
using std::fabs;
using std::isfinite;
using std::log;
using std::log1p;
using std::sqrt;

#if THINFILM_HAVE_FLOAT128
inline __float128 exp(__float128 x) { return expq(x); }
inline __float128 expm1(__float128 x) { return expm1q(x); }
inline __float128 fabs(__float128 x) { return fabsq(x); }
inline bool isfinite(__float128 x) { return isnanq(x) == 0 && isinfq(x) == 0; }
inline __float128 log(__float128 x) { return logq(x); }
inline __float128 log1p(__float128 x) { return log1pq(x); }
inline __float128 sqrt(__float128 x) { return sqrtq(x); }
#endif

template <class Real>
constexpr Real real_epsilon() {
  return std::numeric_limits<Real>::epsilon();
}

#if THINFILM_HAVE_FLOAT128
// 2^-112 spelled without the Q literal suffix (absent under strict -std).
template <>
constexpr __float128 real_epsilon<__float128>() {
  __float128 eps = 1;
  for (int i = 0; i < 112; ++i) eps /= 2;
  return eps;
}
#endif

} // namespace num

} // namespace thinfilm
