#ifndef PSEUDOMCF_MESH_HPP_
#define PSEUDOMCF_MESH_HPP_

// Structured parameter grids and finite-difference operators.
//
// Fields are stored node-major: every node owns a contiguous block of
// m^rank * width doubles, where m is the domain dimension, rank the number of
// tangent indices (first index outermost) and width the number of value
// components (1 for scalars, n for ambient vectors).

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pseudomcf::mesh {

struct AxisSpec {
  double lo = 0.0;
  double hi = 1.0;
  int count = 8;
  bool periodic = false;

  bool operator==(const AxisSpec&) const = default;
};

class ParamDomain {
 public:
  // Throws UsageError for empty axis lists, count < 8 or hi <= lo.
  explicit ParamDomain(std::vector<AxisSpec> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const AxisSpec& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
  const std::vector<AxisSpec>& axes() const { return axes_; }
  // Periodic axes identify lo with hi, so hi itself is never sampled.
  double spacing(int a) const;
  double coordinate(int a, int i) const;
  std::size_t node_count() const { return node_count_; }
  std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
  int index_along(std::size_t node, int a) const;
  std::vector<int> multi_index(std::size_t node) const;
  std::vector<double> coordinates(std::size_t node) const;
  bool fully_periodic() const;
  std::vector<int> shape() const;

  bool operator==(const ParamDomain& other) const { return axes_ == other.axes_; }

 private:
  std::vector<AxisSpec> axes_;
  std::vector<std::size_t> strides_;  // last axis fastest
  std::size_t node_count_ = 0;
};

// m^rank, the number of tangent index tuples.
std::size_t tuple_count(int m, int rank);
// Flat position of an index tuple, first index most significant.
std::size_t flat_index(int m, std::span<const int> idx);
std::vector<int> unflatten_index(int m, int rank, std::size_t flat);

class GridField {
 public:
  GridField(ParamDomain domain, int rank, int width);

  const ParamDomain& domain() const { return domain_; }
  int rank() const { return rank_; }
  int width() const { return width_; }
  int tangent_dim() const { return domain_.dim(); }
  std::size_t block() const { return block_; }
  std::size_t tuples() const { return block_ / static_cast<std::size_t>(width_); }
  std::size_t nodes() const { return domain_.node_count(); }

  std::span<double> node(std::size_t k) { return {data_.data() + k * block_, block_}; }
  std::span<const double> node(std::size_t k) const { return {data_.data() + k * block_, block_}; }
  // Value components of tuple t at node k.
  std::span<double> value(std::size_t k, std::size_t t) {
    return {data_.data() + k * block_ + t * static_cast<std::size_t>(width_),
            static_cast<std::size_t>(width_)};
  }
  std::span<const double> value(std::size_t k, std::size_t t) const {
    return {data_.data() + k * block_ + t * static_cast<std::size_t>(width_),
            static_cast<std::size_t>(width_)};
  }
  double& operator()(std::size_t k, std::size_t comp) { return data_[k * block_ + comp]; }
  double operator()(std::size_t k, std::size_t comp) const { return data_[k * block_ + comp]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const GridField& other) const;

 private:
  ParamDomain domain_;
  int rank_;
  int width_;
  std::size_t block_;
  std::vector<double> data_;
};

using Chart = std::function<std::vector<double>(std::span<const double> params)>;

// Samples chart at every node into a rank-0 field of the given width. A chart
// that throws or returns a wrong-sized or non-finite value raises UsageError
// naming the node coordinates.
GridField build_grid(const ParamDomain& domain, int width, const Chart& chart);

// Half-width of the central stencils for a given accuracy order (2 or 4).
int stencil_half_width(int order);

// Integer-weight stencil: derivative = sum_j weights[j] * f(i + first + j) / (denominator * h^d).
struct StencilRow {
  int first = 0;
  std::vector<long> weights;
  long denominator = 1;
};

// Row used at a node sitting `from_left` nodes from the left end of a
// non-periodic axis (pass from_left >= half-width for the central row).
// derivative is 1 or 2. Right-end rows are the mirror images.
StencilRow stencil_row(int derivative, int order, int from_left);

// First derivative along `axis`, same shape as the input.
GridField partial(const GridField& field, int axis, int order = 4);
// Pure second derivative along `axis` with a dedicated second-difference stencil.
GridField second_partial(const GridField& field, int axis, int order = 4);
// Rank+1 field whose new leading index is the differentiation direction.
GridField gradient(const GridField& field, int order = 4);
// Rank+2 field of second derivatives built from composed first derivatives,
// mixed entries symmetrized so (i,j) and (j,i) are bitwise equal.
GridField hessian(const GridField& field, int order = 4);

struct NodeMask {
  std::vector<unsigned char> inside;
  std::size_t count = 0;
  bool degenerate = false;  // no node survives

  bool operator[](std::size_t k) const { return inside[k] != 0; }
};

// Nodes at least `width` nodes away from every non-periodic boundary.
NodeMask interior_mask(const ParamDomain& domain, int width);

// Nodes whose coordinate keeps a physical distance margin[a] from both ends of
// every non-periodic axis a; used to compare grids over one fixed region.
NodeMask margin_mask(const ParamDomain& domain, std::span<const double> margin);

// Intersection of two masks on the same domain.
NodeMask intersect(const NodeMask& a, const NodeMask& b);

// Interior sup / mean of a per-node scalar.
struct NodeStats {
  double sup = 0.0;
  double mean = 0.0;
  std::size_t count = 0;
};
NodeStats masked_stats(std::span<const double> per_node, const NodeMask& mask);

// One row per node: parameters, then every component of the node block.
void write_csv(std::ostream& out, const GridField& field, const std::vector<std::string>& component_names = {});

}  // namespace pseudomcf::mesh

#endif  // PSEUDOMCF_MESH_HPP_
