#pragma once

// Dense storage for structured blocks with a two-layer ghost fringe on
// every side. Nodes are stored ξ-fastest, then η, then ζ; the components
// of a node are contiguous.

#include <array>
#include <cassert>
#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace jetles {

inline constexpr int kFringe = 2;

enum Axis : int { kXi = 0, kEta = 1, kZeta = 2 };
enum Side : int { kLow = 0, kHigh = 1 };

struct Extents {
  int nxi = 0;
  int neta = 0;
  int nzeta = 0;

  int operator[](int axis) const { return axis == kXi ? nxi : axis == kEta ? neta : nzeta; }
  std::size_t nodes() const {
    return static_cast<std::size_t>(nxi) * static_cast<std::size_t>(neta) *
           static_cast<std::size_t>(nzeta);
  }
  friend bool operator==(const Extents&, const Extents&) = default;
};

// Inclusive-exclusive local index range per axis.
struct Box {
  std::array<int, 3> lo{};
  std::array<int, 3> hi{};

  bool empty() const { return hi[0] <= lo[0] || hi[1] <= lo[1] || hi[2] <= lo[2]; }
  bool contains(int i, int j, int k) const {
    return i >= lo[0] && i < hi[0] && j >= lo[1] && j < hi[1] && k >= lo[2] && k < hi[2];
  }
};

template <int NComp>
class BlockArray {
 public:
  static constexpr int kComponents = NComp;

  BlockArray() = default;
  explicit BlockArray(Extents interior, double fill = 0.0)
      : dims_(interior),
        ext_{interior.nxi + 2 * kFringe, interior.neta + 2 * kFringe, interior.nzeta + 2 * kFringe},
        data_(static_cast<std::size_t>(ext_[0]) * ext_[1] * ext_[2] * NComp, fill) {}

  const Extents& extents() const { return dims_; }
  int extended(int axis) const { return ext_[axis]; }
  std::size_t node_count() const { return static_cast<std::size_t>(ext_[0]) * ext_[1] * ext_[2]; }

  // Node stride along an axis, in nodes.
  std::ptrdiff_t stride(int axis) const {
    return axis == kXi ? 1 : axis == kEta ? ext_[0] : static_cast<std::ptrdiff_t>(ext_[0]) * ext_[1];
  }

  std::size_t node(int i, int j, int k) const {
    assert(i >= -kFringe && i < dims_.nxi + kFringe);
    assert(j >= -kFringe && j < dims_.neta + kFringe);
    assert(k >= -kFringe && k < dims_.nzeta + kFringe);
    return static_cast<std::size_t>(i + kFringe) +
           static_cast<std::size_t>(ext_[0]) *
               (static_cast<std::size_t>(j + kFringe) +
                static_cast<std::size_t>(ext_[1]) * static_cast<std::size_t>(k + kFringe));
  }

  double* at(int i, int j, int k) { return data_.data() + NComp * node(i, j, k); }
  const double* at(int i, int j, int k) const { return data_.data() + NComp * node(i, j, k); }
  double* at_node(std::size_t n) { return data_.data() + NComp * n; }
  const double* at_node(std::size_t n) const { return data_.data() + NComp * n; }

  double& operator()(int i, int j, int k, int c = 0) { return at(i, j, k)[c]; }
  double operator()(int i, int j, int k, int c = 0) const { return at(i, j, k)[c]; }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  Box interior() const { return Box{{0, 0, 0}, {dims_.nxi, dims_.neta, dims_.nzeta}}; }
  Box allocated() const {
    return Box{{-kFringe, -kFringe, -kFringe},
               {dims_.nxi + kFringe, dims_.neta + kFringe, dims_.nzeta + kFringe}};
  }

  // Set while a halo receive into that fringe is outstanding.
  bool fringe_pending(int axis, int side) const { return pending_[2 * axis + side]; }
  void set_fringe_pending(int axis, int side, bool v) { pending_[2 * axis + side] = v; }

 private:
  Extents dims_{};
  std::array<int, 3> ext_{};
  std::vector<double> data_;
  std::array<bool, 6> pending_{};
};

template <class F>
void for_each_node(const Box& b, F&& f) {
  for (int k = b.lo[2]; k < b.hi[2]; ++k)
    for (int j = b.lo[1]; j < b.hi[1]; ++j)
      for (int i = b.lo[0]; i < b.hi[0]; ++i) f(i, j, k);
}

}  // namespace jetles
