#ifndef TWCC_ANGLE_SAMPLE_HPP
#define TWCC_ANGLE_SAMPLE_HPP

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "twcc/common.hpp"
#include "twcc/errors.hpp"

namespace twcc {

using AngleMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// n x 3 angles in [0, 2pi). A centered sample remembers the circular means
/// that were subtracted from each column.
class AngleSample {
 public:
  AngleSample() = default;

  explicit AngleSample(AngleMatrix rows) : rows_(std::move(rows)) {
    if (!rows_.allFinite()) {
      throw Error(ErrorCode::NonFinite, "angle sample contains non-finite values");
    }
    rows_ = rows_.unaryExpr([](double x) { return reduce_angle(x); });
  }

  AngleSample(AngleMatrix rows, const Eigen::Vector3d& offsets)
      : AngleSample(std::move(rows)) {
    offsets_ = offsets;
  }

  const AngleMatrix& rows() const { return rows_; }
  Eigen::Index size() const { return rows_.rows(); }
  bool centered() const { return offsets_.has_value(); }
  const std::optional<Eigen::Vector3d>& offsets() const { return offsets_; }

 private:
  AngleMatrix rows_;
  std::optional<Eigen::Vector3d> offsets_;
};

}  // namespace twcc

#endif  // TWCC_ANGLE_SAMPLE_HPP
