#pragma once

#include <ostream>
#include <vector>

#include "specloc/numerics.hpp"

namespace specloc::contours {

enum class SegmentKind { circle, verticalSegment, parabolaArc };

/// One smooth piece of a contour, parametrised over s in [0, 1] in the
/// contour's own (unrotated) coordinates.
struct Segment {
  SegmentKind kind = SegmentKind::circle;
  // circle
  Complex center{0.0, 0.0};
  double radius = 0.0;
  // vertical segment x = x0, y from y0 to y1
  double x0 = 0.0;
  double y0 = 0.0;
  double y1 = 0.0;
  // parabola arc y = sign * alpha * x^p, x from xFrom to xTo
  double xFrom = 0.0;
  double xTo = 0.0;
  double alpha = 0.0;
  double p = 0.0;
  double sign = 1.0;

  Complex point(double s) const;
  Complex derivative(double s) const;
};

struct Node {
  Complex z;
  Complex weight;  // dz weight of the quadrature rule, 0 at corners
};

/// Closed, positively oriented piecewise path with a trapezoid-type rule on
/// every segment. Circles use the uniform periodic trapezoid rule. Open
/// segments use the trapezoid rule after the grading map
/// s = I_u(7, 7) (regularised incomplete beta), which vanishes to high order at
/// both ends and keeps corner contributions spectrally small; corner points
/// stay in the node list with weight 0 so margin checks see them.
struct Contour {
  std::vector<Segment> segments;
  double rotation = 0.0;
  int nodesPerSegment = 32;
  std::vector<Node> nodes;  // for nodesPerSegment, rotated

  /// Max gap between consecutive segment endpoints.
  double closure_defect() const;
};

/// Nodes of the rule with `perSegment` intervals per segment.
std::vector<Node> quadrature_nodes(const Contour& contour, int perSegment);

/// Nodes that the rule with 2 * perSegment intervals adds to the rule with
/// perSegment intervals, carrying their weights in the finer rule. The finer
/// rule gives every shared node half its old weight.
std::vector<Node> doubling_nodes(const Contour& contour, int perSegment);

/// Positively oriented circle. Throws InputError unless radius > 0 and nodeCount >= 16.
Contour circle(Complex center, double radius, int nodeCount = 64);

/// Boundary of {xLeft <= x <= xRight, |y| <= alpha x^p}, rotated by e^{i theta}.
/// Traversed counterclockwise: up the right edge, along the upper arc to the
/// left, down the left edge, back along the lower arc.
Contour gap_contour(double xLeft, double xRight, double alpha, double p, double theta,
                    int nodesPerSegment = 32);

/// min over nodes of sigmaMin(T - z).
double min_resolvent_margin(const ComplexMatrix& T, const Contour& contour);

/// Same, reusing a Schur factorisation of T.
double min_resolvent_margin(const numerics::SchurResolvent& T, const Contour& contour);

/// (1 / 2 pi i) sum w / (z - w0).
Complex winding_number(const Contour& contour, Complex w0);

/// Columns: re,im,weight_re,weight_im.
void write_nodes_csv(std::ostream& os, const std::vector<Node>& nodes, bool header = true);

}  // namespace specloc::contours
