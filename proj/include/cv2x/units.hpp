#pragma once

#include <cmath>
#include <limits>

namespace cv2x {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

inline double mw_to_dbm(double mw) {
  return mw > 0.0 ? 10.0 * std::log10(mw) : -std::numeric_limits<double>::infinity();
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace cv2x
