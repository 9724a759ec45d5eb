#include "specloc/contours.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specloc/operators.hpp"

namespace specloc::contours {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
const Complex kI(0.0, 1.0);

// Regularised incomplete beta I_u(7, 7) and its derivative.
double grade(double u) {
  static const double binom[14] = {1, 13, 78, 286, 715, 1287, 1716, 1716, 1287, 715, 286, 78, 13, 1};
  double s = 0.0;
  for (int k = 7; k <= 13; ++k) s += binom[k] * std::pow(u, k) * std::pow(1.0 - u, 13 - k);
  return s;
}

double grade_derivative(double u) { return 12012.0 * std::pow(u * (1.0 - u), 6); }

Node make_node(const Segment& seg, double u, int intervals, Complex rot) {
  Node node;
  if (seg.kind == SegmentKind::circle) {
    node.z = seg.point(u);
    node.weight = seg.derivative(u) / static_cast<double>(intervals);
  } else {
    const double s = grade(u);
    node.z = seg.point(s);
    node.weight = seg.derivative(s) * (grade_derivative(u) / static_cast<double>(intervals));
  }
  node.z *= rot;
  node.weight *= rot;
  return node;
}

void check_intervals(int perSegment) {
  if (perSegment < 16) {
    std::ostringstream os;
    os << "contour needs at least 16 nodes per segment, got " << perSegment;
    throw InputError(os.str());
  }
}

}  // namespace

Complex Segment::point(double s) const {
  switch (kind) {
    case SegmentKind::circle: return center + radius * std::exp(2.0 * kPi * kI * s);
    case SegmentKind::verticalSegment: return {x0, y0 + (y1 - y0) * s};
    default: {
      const double x = xFrom + (xTo - xFrom) * s;
      return {x, sign * alpha * std::pow(x, p)};
    }
  }
}

Complex Segment::derivative(double s) const {
  switch (kind) {
    case SegmentKind::circle: return 2.0 * kPi * kI * radius * std::exp(2.0 * kPi * kI * s);
    case SegmentKind::verticalSegment: return {0.0, y1 - y0};
    default: {
      const double x = xFrom + (xTo - xFrom) * s;
      const double dy = (p == 0.0) ? 0.0 : sign * alpha * p * std::pow(x, p - 1.0);
      return (xTo - xFrom) * Complex(1.0, dy);
    }
  }
}

double Contour::closure_defect() const {
  double d = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& next = segments[(i + 1) % segments.size()];
    d = std::max(d, std::abs(segments[i].point(1.0) - next.point(0.0)));
  }
  return d;
}

std::vector<Node> quadrature_nodes(const Contour& contour, int perSegment) {
  check_intervals(perSegment);
  const Complex rot = operators::unit_direction(contour.rotation);
  std::vector<Node> nodes;
  nodes.reserve(contour.segments.size() * static_cast<std::size_t>(perSegment));
  for (const auto& seg : contour.segments)
    for (int j = 0; j < perSegment; ++j)
      nodes.push_back(make_node(seg, static_cast<double>(j) / perSegment, perSegment, rot));
  return nodes;
}

std::vector<Node> doubling_nodes(const Contour& contour, int perSegment) {
  check_intervals(perSegment);
  const int fine = 2 * perSegment;
  const Complex rot = operators::unit_direction(contour.rotation);
  std::vector<Node> nodes;
  nodes.reserve(contour.segments.size() * static_cast<std::size_t>(perSegment));
  for (const auto& seg : contour.segments)
    for (int j = 1; j < fine; j += 2)
      nodes.push_back(make_node(seg, static_cast<double>(j) / fine, fine, rot));
  return nodes;
}

Contour circle(Complex center, double radius, int nodeCount) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("circle: radius must be > 0");
  if (!std::isfinite(center.real()) || !std::isfinite(center.imag())) throw InputError("circle: center must be finite");
  Contour c;
  Segment s;
  s.kind = SegmentKind::circle;
  s.center = center;
  s.radius = radius;
  c.segments.push_back(s);
  c.nodesPerSegment = nodeCount;
  c.nodes = quadrature_nodes(c, nodeCount);
  return c;
}

Contour gap_contour(double xLeft, double xRight, double alpha, double p, double theta,
                    int nodesPerSegment) {
  if (!(xLeft > 0.0) || !(xLeft < xRight) || !std::isfinite(xRight)) {
    std::ostringstream os;
    os << "gap_contour: need 0 < xLeft < xRight, got xLeft = " << xLeft << ", xRight = " << xRight;
    throw InputError(os.str());
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("gap_contour: alpha must be > 0");
  if (!(p >= 0.0 && p < 1.0)) throw InputError("gap_contour: p must lie in [0, 1)");
  const double yR = alpha * std::pow(xRight, p);
  const double yL = alpha * std::pow(xLeft, p);
  Contour c;
  c.rotation = theta;
  Segment right;
  right.kind = SegmentKind::verticalSegment;
  right.x0 = xRight;
  right.y0 = -yR;
  right.y1 = yR;
  Segment upper;
  upper.kind = SegmentKind::parabolaArc;
  upper.xFrom = xRight;
  upper.xTo = xLeft;
  upper.alpha = alpha;
  upper.p = p;
  upper.sign = 1.0;
  Segment left;
  left.kind = SegmentKind::verticalSegment;
  left.x0 = xLeft;
  left.y0 = yL;
  left.y1 = -yL;
  Segment lower = upper;
  lower.xFrom = xLeft;
  lower.xTo = xRight;
  lower.sign = -1.0;
  c.segments = {right, upper, left, lower};
  c.nodesPerSegment = nodesPerSegment;
  c.nodes = quadrature_nodes(c, nodesPerSegment);
  return c;
}

double min_resolvent_margin(const numerics::SchurResolvent& T, const Contour& contour) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& node : contour.nodes) m = std::min(m, T.sigma_min(node.z));
  return m;
}

double min_resolvent_margin(const ComplexMatrix& T, const Contour& contour) {
  return min_resolvent_margin(numerics::SchurResolvent(T), contour);
}

Complex winding_number(const Contour& contour, Complex w0) {
  Complex s(0.0, 0.0);
  for (const auto& node : contour.nodes) s += node.weight / (node.z - w0);
  return s / (2.0 * kPi * kI);
}

void write_nodes_csv(std::ostream& os, const std::vector<Node>& nodes, bool header) {
  if (header) os << "re,im,weight_re,weight_im\n";
  os.precision(17);
  for (const auto& n : nodes)
    os << n.z.real() << ',' << n.z.imag() << ',' << n.weight.real() << ',' << n.weight.imag() << '\n';
}

}  // namespace specloc::contours
