#include "pseudomcf/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

#include "pseudomcf/errors.hpp"
#include "pseudomcf/parallel.hpp"

namespace pseudomcf::mesh {

ParamDomain::ParamDomain(std::vector<AxisSpec> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw UsageError("parameter domain needs at least one axis");
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    const auto& ax = axes_[a];
    if (ax.count < 8) {
      throw UsageError("axis " + std::to_string(a) + " has " + std::to_string(ax.count) +
                       " samples, at least 8 required");
    }
    if (!(ax.hi > ax.lo)) throw UsageError("axis " + std::to_string(a) + " has empty interval");
  }
  strides_.assign(axes_.size(), 1);
  for (int a = dim() - 2; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] =
        strides_[static_cast<std::size_t>(a + 1)] * static_cast<std::size_t>(axes_[a + 1].count);
  }
  node_count_ = strides_[0] * static_cast<std::size_t>(axes_[0].count);
}

double ParamDomain::spacing(int a) const {
  const auto& ax = axis(a);
  return (ax.hi - ax.lo) / (ax.periodic ? ax.count : ax.count - 1);
}

double ParamDomain::coordinate(int a, int i) const { return axis(a).lo + i * spacing(a); }

int ParamDomain::index_along(std::size_t node, int a) const {
  return static_cast<int>((node / stride(a)) % static_cast<std::size_t>(axis(a).count));
}

std::vector<int> ParamDomain::multi_index(std::size_t node) const {
  std::vector<int> idx(axes_.size());
  for (int a = 0; a < dim(); ++a) idx[static_cast<std::size_t>(a)] = index_along(node, a);
  return idx;
}

std::vector<double> ParamDomain::coordinates(std::size_t node) const {
  std::vector<double> x(axes_.size());
  for (int a = 0; a < dim(); ++a) x[static_cast<std::size_t>(a)] = coordinate(a, index_along(node, a));
  return x;
}

bool ParamDomain::fully_periodic() const {
  for (const auto& ax : axes_)
    if (!ax.periodic) return false;
  return true;
}

std::vector<int> ParamDomain::shape() const {
  std::vector<int> s;
  for (const auto& ax : axes_) s.push_back(ax.count);
  return s;
}

std::size_t tuple_count(int m, int rank) {
  std::size_t t = 1;
  for (int r = 0; r < rank; ++r) t *= static_cast<std::size_t>(m);
  return t;
}

std::size_t flat_index(int m, std::span<const int> idx) {
  std::size_t f = 0;
  for (int i : idx) f = f * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
  return f;
}

std::vector<int> unflatten_index(int m, int rank, std::size_t flat) {
  std::vector<int> idx(static_cast<std::size_t>(rank));
  for (int r = rank - 1; r >= 0; --r) {
    idx[static_cast<std::size_t>(r)] = static_cast<int>(flat % static_cast<std::size_t>(m));
    flat /= static_cast<std::size_t>(m);
  }
  return idx;
}

GridField::GridField(ParamDomain domain, int rank, int width)
    : domain_(std::move(domain)), rank_(rank), width_(width) {
  if (rank < 0 || width < 1) throw UsageError("grid field needs rank >= 0 and width >= 1");
  block_ = tuple_count(domain_.dim(), rank_) * static_cast<std::size_t>(width_);
  data_.assign(block_ * domain_.node_count(), 0.0);
}

bool GridField::same_shape(const GridField& other) const {
  return rank_ == other.rank_ && width_ == other.width_ && domain_ == other.domain_;
}

namespace {

std::string describe_node(const ParamDomain& d, std::size_t node) {
  std::ostringstream os;
  os << "node " << node << " (";
  const auto x = d.coordinates(node);
  for (std::size_t a = 0; a < x.size(); ++a) os << (a ? ", " : "") << x[a];
  os << ")";
  return os.str();
}

}  // namespace

GridField build_grid(const ParamDomain& domain, int width, const Chart& chart) {
  GridField out(domain, 0, width);
  // Sequential so that the first failing node is reported deterministically.
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    const auto params = domain.coordinates(k);
    std::vector<double> p;
    try {
      p = chart(params);
    } catch (const std::exception& e) {
      throw UsageError("chart evaluation failed at " + describe_node(domain, k) + ": " + e.what());
    }
    if (static_cast<int>(p.size()) != width) {
      throw UsageError("chart returned " + std::to_string(p.size()) + " components at " +
                       describe_node(domain, k) + ", expected " + std::to_string(width));
    }
    for (int c = 0; c < width; ++c) {
      if (!std::isfinite(p[static_cast<std::size_t>(c)])) {
        throw UsageError("chart returned a non-finite value at " + describe_node(domain, k));
      }
      out(k, static_cast<std::size_t>(c)) = p[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

int stencil_half_width(int order) {
  if (order == 2) return 1;
  if (order == 4) return 2;
  throw UsageError("stencil order must be 2 or 4, got " + std::to_string(order));
}

StencilRow stencil_row(int derivative, int order, int from_left) {
  const int hw = stencil_half_width(order);
  const bool central = from_left >= hw;
  if (derivative == 1 && order == 2) {
    if (central) return {-1, {-1, 0, 1}, 2};
    return {0, {-3, 4, -1}, 2};
  }
  if (derivative == 1 && order == 4) {
    if (central) return {-2, {1, -8, 0, 8, -1}, 12};
    if (from_left == 0) return {0, {-25, 48, -36, 16, -3}, 12};
    return {-1, {-3, -10, 18, -6, 1}, 12};
  }
  if (derivative == 2 && order == 2) {
    if (central) return {-1, {1, -2, 1}, 1};
    return {0, {2, -5, 4, -1}, 1};
  }
  if (derivative == 2 && order == 4) {
    if (central) return {-2, {-1, 16, -30, 16, -1}, 12};
    if (from_left == 0) return {0, {45, -154, 214, -156, 61, -10}, 12};
    return {-1, {10, -15, -4, 14, -6, 1}, 12};
  }
  throw UsageError("unsupported stencil: derivative " + std::to_string(derivative));
}

namespace {

struct AxisRows {
  std::vector<StencilRow> left;  // rows for from_left = 0 .. hw-1
  StencilRow central;
  int hw = 0;
};

AxisRows rows_for(int derivative, int order) {
  AxisRows r;
  r.hw = stencil_half_width(order);
  for (int i = 0; i < r.hw; ++i) r.left.push_back(stencil_row(derivative, order, i));
  r.central = stencil_row(derivative, order, r.hw);
  return r;
}

GridField apply_along(const GridField& field, int axis, int derivative, int order) {
  const auto& dom = field.domain();
  if (axis < 0 || axis >= dom.dim()) {
    throw UsageError("axis " + std::to_string(axis) + " out of range for a " +
                     std::to_string(dom.dim()) + "-d domain");
  }
  const AxisRows rows = rows_for(derivative, order);
  const int n = dom.axis(axis).count;
  const bool periodic = dom.axis(axis).periodic;
  const int needed = periodic ? 2 * rows.hw + 1 : static_cast<int>(rows.left.empty() ? rows.central.weights.size() : rows.left[0].weights.size());
  if (n < needed) {
    throw UsageError("axis " + std::to_string(axis) + " has " + std::to_string(n) +
                     " samples, stencil needs " + std::to_string(needed));
  }
  const double h = dom.spacing(axis);
  const double hd = derivative == 1 ? h : h * h;
  const auto stride = static_cast<std::ptrdiff_t>(dom.stride(axis));
  const std::size_t block = field.block();
  GridField out(dom, field.rank(), field.width());
  const double* src = field.data().data();
  double* dst = out.data().data();

  parallel_for(dom.node_count(), [&](std::size_t k) {
    const int i = dom.index_along(k, axis);
    const StencilRow* row = &rows.central;
    int sign = 1;
    bool mirrored = false;
    if (!periodic) {
      if (i < rows.hw) {
        row = &rows.left[static_cast<std::size_t>(i)];
      } else if (i >= n - rows.hw) {
        row = &rows.left[static_cast<std::size_t>(n - 1 - i)];
        mirrored = true;
        sign = derivative == 1 ? -1 : 1;
      }
    }
    const double scale = 1.0 / (static_cast<double>(row->denominator) * hd);
    const double* center = src + k * block;
    double* o = dst + k * block;
    for (std::size_t c = 0; c < block; ++c) o[c] = 0.0;
    for (std::size_t j = 0; j < row->weights.size(); ++j) {
      const long w = row->weights[j];
      if (w == 0) continue;
      int off = row->first + static_cast<int>(j);
      if (mirrored) off = -off;
      int target = i + off;
      if (periodic) target = ((target % n) + n) % n;
      const double* nb = src + (k + static_cast<std::size_t>((target - i) * stride)) * block;
      const double wd = static_cast<double>(w);
      for (std::size_t c = 0; c < block; ++c) o[c] += wd * (nb[c] - center[c]);
    }
    for (std::size_t c = 0; c < block; ++c) o[c] *= sign * scale;
  });
  return out;
}

}  // namespace

GridField partial(const GridField& field, int axis, int order) {
  return apply_along(field, axis, 1, order);
}

GridField second_partial(const GridField& field, int axis, int order) {
  return apply_along(field, axis, 2, order);
}

GridField gradient(const GridField& field, int order) {
  const int m = field.tangent_dim();
  GridField out(field.domain(), field.rank() + 1, field.width());
  const std::size_t in_block = field.block();
  for (int a = 0; a < m; ++a) {
    const auto d = partial(field, a, order);
    for (std::size_t k = 0; k < field.nodes(); ++k) {
      auto src = d.node(k);
      auto dst = out.node(k);
      for (std::size_t c = 0; c < in_block; ++c) dst[static_cast<std::size_t>(a) * in_block + c] = src[c];
    }
  }
  return out;
}

GridField hessian(const GridField& field, int order) {
  const int m = field.tangent_dim();
  GridField out(field.domain(), field.rank() + 2, field.width());
  const std::size_t in_block = field.block();
  std::vector<GridField> first;
  for (int a = 0; a < m; ++a) first.push_back(partial(field, a, order));
  auto put = [&](int i, int j, const GridField& src, double weight, bool accumulate) {
    const std::size_t off = (static_cast<std::size_t>(i) * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)) * in_block;
    for (std::size_t k = 0; k < field.nodes(); ++k) {
      auto s = src.node(k);
      auto d = out.node(k);
      for (std::size_t c = 0; c < in_block; ++c) {
        d[off + c] = accumulate ? d[off + c] + weight * s[c] : weight * s[c];
      }
    }
  };
  for (int i = 0; i < m; ++i) {
    put(i, i, partial(first[static_cast<std::size_t>(i)], i, order), 1.0, false);
    for (int j = i + 1; j < m; ++j) {
      const auto dij = partial(first[static_cast<std::size_t>(j)], i, order);
      const auto dji = partial(first[static_cast<std::size_t>(i)], j, order);
      put(i, j, dij, 0.5, false);
      put(i, j, dji, 0.5, true);
      // Mirror the symmetrized entry so (i,j) and (j,i) are bitwise equal.
      const std::size_t a = (static_cast<std::size_t>(i) * m + j) * in_block;
      const std::size_t b = (static_cast<std::size_t>(j) * m + i) * in_block;
      for (std::size_t k = 0; k < field.nodes(); ++k) {
        auto d = out.node(k);
        for (std::size_t c = 0; c < in_block; ++c) d[b + c] = d[a + c];
      }
    }
  }
  return out;
}

NodeMask interior_mask(const ParamDomain& domain, int width) {
  NodeMask mask;
  mask.inside.assign(domain.node_count(), 1);
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    for (int a = 0; a < domain.dim(); ++a) {
      const auto& ax = domain.axis(a);
      if (ax.periodic) continue;
      const int i = domain.index_along(k, a);
      if (i < width || i > ax.count - 1 - width) {
        mask.inside[k] = 0;
        break;
      }
    }
    mask.count += mask.inside[k];
  }
  mask.degenerate = mask.count == 0;
  return mask;
}

NodeMask margin_mask(const ParamDomain& domain, std::span<const double> margin) {
  if (margin.size() != static_cast<std::size_t>(domain.dim())) throw UsageError("margin_mask: one margin per axis required");
  NodeMask mask;
  mask.inside.assign(domain.node_count(), 1);
  for (std::size_t k = 0; k < domain.node_count(); ++k) {
    for (int a = 0; a < domain.dim(); ++a) {
      const auto& ax = domain.axis(a);
      if (ax.periodic) continue;
      const double x = domain.coordinate(a, domain.index_along(k, a));
      const double slack = 1e-9 * domain.spacing(a);
      const double d = margin[static_cast<std::size_t>(a)];
      if (x < ax.lo + d - slack || x > ax.hi - d + slack) {
        mask.inside[k] = 0;
        break;
      }
    }
    mask.count += mask.inside[k];
  }
  mask.degenerate = mask.count == 0;
  return mask;
}

NodeMask intersect(const NodeMask& a, const NodeMask& b) {
  if (a.inside.size() != b.inside.size()) throw UsageError("intersect: masks of different size");
  NodeMask out;
  out.inside.resize(a.inside.size());
  for (std::size_t k = 0; k < a.inside.size(); ++k) {
    out.inside[k] = static_cast<unsigned char>(a.inside[k] && b.inside[k]);
    out.count += out.inside[k];
  }
  out.degenerate = out.count == 0;
  return out;
}

NodeStats masked_stats(std::span<const double> per_node, const NodeMask& mask) {
  NodeStats s;
  double total = 0.0;
  for (std::size_t k = 0; k < per_node.size(); ++k) {
    if (!mask[k]) continue;
    s.sup = std::max(s.sup, per_node[k]);
    total += per_node[k];
    ++s.count;
  }
  s.mean = s.count ? total / static_cast<double>(s.count) : 0.0;
  return s;
}

void write_csv(std::ostream& out, const GridField& field, const std::vector<std::string>& names) {
  const auto& dom = field.domain();
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int a = 0; a < dom.dim(); ++a) os << (a ? "," : "") << "x" << a;
  for (std::size_t c = 0; c < field.block(); ++c) {
    os << ",";
    if (c < names.size()) {
      os << names[c];
    } else {
      os << "c" << c;
    }
  }
  os << "\n";
  for (std::size_t k = 0; k < field.nodes(); ++k) {
    const auto x = dom.coordinates(k);
    for (std::size_t a = 0; a < x.size(); ++a) os << (a ? "," : "") << x[a];
    for (double v : field.node(k)) os << "," << v;
    os << "\n";
  }
  out << os.str();
}

}  // namespace pseudomcf::mesh
