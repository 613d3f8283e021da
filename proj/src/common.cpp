#include "slrd/common.hpp"

namespace slrd {

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

const char* version() { return SLRD_VERSION; }

IntBox IntBox::cube(int dim, std::int64_t half_width) {
  IntBox b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) {
    b.lo[a] = -half_width;
    b.hi[a] = half_width;
  }
  return b;
}

std::size_t IntBox::cell_count() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) {
    if (hi[a] < lo[a]) return 0;
    n *= static_cast<std::size_t>(extent(a));
  }
  return n;
}

bool IntBox::contains(const IVec& i) const {
  for (int a = 0; a < dim; ++a)
    if (i[a] < lo[a] || i[a] > hi[a]) return false;
  return true;
}

bool IntBox::contains(const IntBox& other) const {
  if (other.dim != dim) return false;
  for (int a = 0; a < dim; ++a)
    if (other.lo[a] < lo[a] || other.hi[a] > hi[a]) return false;
  return true;
}

std::size_t IntBox::index(const IVec& i) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a)
    idx = idx * static_cast<std::size_t>(extent(a)) + static_cast<std::size_t>(i[a] - lo[a]);
  return idx;
}

IVec IntBox::point(std::size_t index) const {
  IVec p{};
  for (int a = dim - 1; a >= 0; --a) {
    const auto e = static_cast<std::size_t>(extent(a));
    p[a] = lo[a] + static_cast<std::int64_t>(index % e);
    index /= e;
  }
  return p;
}

bool IntBox::operator==(const IntBox& other) const {
  if (dim != other.dim) return false;
  for (int a = 0; a < dim; ++a)
    if (lo[a] != other.lo[a] || hi[a] != other.hi[a]) return false;
  return true;
}

}  // namespace slrd
