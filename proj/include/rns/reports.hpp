#pragma once

// Deterministic emission helpers: scientific-notation strings for measures
// far below double range (recovered from -log lambda), exact rational
// serialization, and fixed-format floating point for CSV cells.

#include "rns/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace rns {

// lambda = exp(-neg_log) rendered as "m.mmmmmme-ddd" without underflow
inline std::string sci_from_neg_log(double neg_log, int digits = 6) {
    if (!std::isfinite(neg_log)) return "nan";
    const double log10v = -neg_log / std::numbers::ln10;
    double e = std::floor(log10v);
    double mant = std::pow(10.0, log10v - e);
    if (mant >= 10.0) {
        mant /= 10.0;
        e += 1.0;
    }
    if (mant < 1.0 && mant > 0.0) {
        mant *= 10.0;
        e -= 1.0;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%+ld", digits, mant, static_cast<long>(e));
    return buf;
}

inline std::string csv_double(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// exact "num/den" (integers render without the slash)
inline std::string rational_csv(const Rational& r) {
    const mpq_class q = r.value();
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string scalar_csv(const Rational& r) { return rational_csv(r); }
inline std::string scalar_csv(const Enclosure& e) { return csv_double(e.to_double(), 17); }
inline std::string scalar_csv(const BigEnclosure& e) { return csv_double(e.to_double(), 17); }

}  // namespace rns
