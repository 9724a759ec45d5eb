#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "specloc/numerics.hpp"
#include "specloc/operators.hpp"

namespace specloc::enclosure {

/// Per-region radii whose maximum is the certified r0.
struct R0Parts {
  double outer = 0.0;   // pi/2 <= |arg z| <= phi: d >= |z|
  double sector = 0.0;  // psi <= |arg z| <= pi/2: d >= |z| sin(psi)
  double strip = 0.0;   // |arg z| <= psi, outside or on the lobe: d >= alpha x^p
  double r0 = 0.0;
};

/// Radius beyond which every point of the sector between the neighbouring
/// bisectors, outside the lobe |y| <= alpha x^p, has ||S (G - z)^{-1}|| <= epsilon.
///
/// Requires b < alpha, b/alpha < epsilon < 1 and
/// 0 < psi < min(-phiMinus, phiPlus, pi/2), with -pi <= phiMinus < 0 < phiPlus <= pi.
/// Each part is the closed-form root of a monotone condition in |z|; when the
/// condition fails at the rounded root, bisection to 1e-9 relative takes over.
R0Parts certified_r0_parts(double b, double p, double alpha, double epsilon, double psi,
                           double phiMinus, double phiPlus);

double certified_r0(double b, double p, double alpha, double epsilon, double psi, double phiMinus,
                    double phiPlus);

struct Lobe {
  double theta = 0.0;
  double alpha = 1.0;
  double p = 0.0;
  /// Half the opening of the largest sector around the ray free of other rays,
  /// capped at pi/2. Used by the refined test.
  double halfAngle = 1.5707963267948966;
};

struct EnclosureRegion {
  double r0 = 0.0;
  std::vector<Lobe> lobes;
  bool refined = false;
  double b = 0.0;  // subordination bound, used by the refined test only
};

/// Ball of radius r0 plus one lobe per ray angle.
EnclosureRegion build_enclosure(const std::vector<double>& thetas, double alpha, double p, double r0);

/// Same region with the refined exclusion switched on.
EnclosureRegion refine(EnclosureRegion region, double b);

/// Neighbour half-angles (phiMinus, phiPlus) of each ray in ascending angle
/// order; a single ray gets (-pi, pi).
std::vector<std::pair<double, double>> neighbour_half_angles(std::vector<double> thetas);

/// Closed-region membership. In refined mode, points that the refined
/// resolvent condition proves to be regular are removed from the region.
bool contains(const EnclosureRegion& region, Complex z);

/// True when the refined condition alone certifies z as a resolvent point
/// (independent of r0 and alpha).
bool refined_excluded(const EnclosureRegion& region, Complex z);

/// Euclidean distance from z to the standard (non-refined) region.
double distance_to_region(const EnclosureRegion& region, Complex z);

struct Violator {
  Complex z;
  double distance = 0.0;
};

struct EnclosureReport {
  bool allInside = true;
  std::vector<Complex> eigenvalues;
  std::vector<Violator> violators;
};

EnclosureReport verify_spectrum_enclosure(const operators::PerturbedSystem& system,
                                          const EnclosureRegion& region);

/// Same check on a precomputed eigenvalue list.
EnclosureReport verify_spectrum_enclosure(const std::vector<Complex>& eigenvalues,
                                          const EnclosureRegion& region);

struct ResolventDiagnostic {
  Complex z;
  double distToSigmaG = 0.0;
  double normGresolvent = 0.0;   // ||(G - z)^{-1}||
  double normSGresolvent = 0.0;  // ||S (G - z)^{-1}||
  double normTresolvent = 0.0;   // 1 / sigmaMin(T - z), +inf on the spectrum
  double normSTresolvent = 0.0;  // ||S (T - z)^{-1}||
  double epsilonUsed = 0.0;
  bool applicable = false;       // ||S (G - z)^{-1}|| <= epsilon < 1
  bool inResolventSet = false;
  bool tBoundHolds = false;      // ||(T - z)^{-1}|| <= ||(G - z)^{-1}|| / (1 - eps)
  bool stBoundHolds = false;     // ||S (T - z)^{-1}|| <= eps / (1 - eps)
  double tSlack = 0.0;           // relative slack of the first bound
  double stSlack = 0.0;          // relative slack of the second bound
};

/// Throws SingularError when sigmaMin(G - z) < 1e-12. Bounds are only
/// evaluated when the diagnostic is applicable.
ResolventDiagnostic resolvent_diagnostic(const operators::PerturbedSystem& system, Complex z,
                                         double epsilon);

/// Lobe boundary polylines in each lobe's own coordinates.
/// Columns: theta,x,y_upper,y_lower.
void write_lobe_csv(std::ostream& os, const EnclosureRegion& region, double xMax, int samples);

}  // namespace specloc::enclosure
