#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace slrd {

inline constexpr int kMaxDim = 3;

using IVec = std::array<std::int64_t, kMaxDim>;

enum class ErrorKind { validation, domain, numerical, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);
const char* error_kind_name(ErrorKind kind);
const char* version();

/// Closed integer box lo..hi per axis in the first dim coordinates.
struct IntBox {
  int dim = 0;
  IVec lo{};
  IVec hi{};

  static IntBox cube(int dim, std::int64_t half_width);

  std::int64_t extent(int axis) const { return hi[axis] - lo[axis] + 1; }
  std::size_t cell_count() const;
  bool contains(const IVec& i) const;
  bool contains(const IntBox& other) const;
  std::size_t index(const IVec& i) const;
  IVec point(std::size_t index) const;
  bool operator==(const IntBox& other) const;
};

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace slrd
