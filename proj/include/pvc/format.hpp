#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "pvc/types.hpp"

namespace pvc {

/// 17 significant digits; non-finite values become JSON null.
inline std::string fmt17(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt17(cplx z) { return "[" + fmt17(z.real()) + "," + fmt17(z.imag()) + "]"; }

}  // namespace pvc
