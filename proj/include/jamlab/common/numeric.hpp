#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace jamlab {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

// Symmetric Hamming window, w[n] = 0.54 - 0.46 cos(2 pi n / (len - 1)).
std::vector<double> hamming(std::size_t len);

}  // namespace jamlab
