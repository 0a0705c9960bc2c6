#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>

namespace qal {

using Rational = boost::rational<std::int64_t>;

inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

}  // namespace qal
