#pragma once

#include <map>
#include <string>
#include <vector>

#include "finsler/averaging.hpp"
#include "finsler/curves.hpp"
#include "finsler/transport.hpp"

namespace finsler {

enum class Verdict { yes, no, inconclusive };

std::string to_string(Verdict v);

// A residual with the tolerance it was judged against. Verdicts use a decade
// band: yes at <= tol, no at >= 10*tol, inconclusive between.
struct ResidualEntry {
  std::string name;
  double value;
  double tolerance;
};

Verdict banded_verdict(double residual, double tol);

struct ClassifyOptions {
  int sample_points = 5;
  int sample_dirs = 16;
  int curve_count = 8;
  double tol = 1e-6;
  uint64_t seed = 42;
  int quadrature_nodes = 64;
  std::vector<double> t_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> loop_sizes = {0.05, 0.1, 0.2, 0.4};
  int loop_count = 8;
  OdeOptions ode;
};

struct BerwaldTest {
  Verdict verdict;
  double direct_residual;    // max spread of chern coefficients over directions
  double averaged_residual;  // max |chern(x, y) - averaged(x)|
  double scale;              // magnitude the tolerance was scaled by
  int points, dirs;
};

// A structure is affine-modelled exactly when the chern coefficients do not
// depend on the fiber direction; tested directly (direction sweep) and
// against the indicatrix average.
BerwaldTest berwald_test(const FinslerStructure& fs, int sample_points,
                         int sample_dirs, double tol, uint64_t seed = 42,
                         int quadrature_nodes = 64);

struct LandsbergTest {
  Verdict verdict;
  double max_residual;  // max |A-dot| component over samples
  int points, dirs;
};

LandsbergTest landsberg_test(const FinslerStructure& fs, int sample_points,
                             int sample_dirs, double tol, uint64_t seed = 42);

struct RigidityTest {
  Verdict verdict;         // yes = transports preserve the indicatrix
  double max_drift;
  double mean_drift;
  int curves;
  int samples_per_curve;
};

// Transports indicatrix samples by the Levi-Civita connection of the metric
// field h along each curve and measures |F(x_end, S_end) - 1|.
RigidityTest rigidity_test(const FinslerStructure& fs, const MetricField& h,
                           const std::vector<CurvePtr>& curves, double tol,
                           int samples_per_curve = 16,
                           const OdeOptions& ode = {});

struct InterpolationRow {
  double t;
  double max_drift;
  Verdict verdict;
};

struct InterpolationTest {
  std::vector<InterpolationRow> rows;
  bool radially_ordered;   // interpolated indicatrices never cross
  double min_slope, max_slope;  // of t -> F_t over sampled rays
};

// Blends F with the norm of the metric field h: F_t = (1-t) F + t sqrt(h y y).
// Transports each F_t-indicatrix by the Levi-Civita connection of h and
// reports per-t drift plus the radial ordering of the family.
InterpolationTest interpolated_indicatrix_test(
    const FinslerStructure& fs, const MetricField& h,
    const std::vector<double>& t_grid, const std::vector<CurvePtr>& curves,
    double tol, int samples_per_curve = 16, const OdeOptions& ode = {});

struct HolonomySample {
  VectorXd x;
  std::vector<double> loop_a, loop_b;  // rectangle side lengths
  std::vector<MatrixXd> matrices;
  std::vector<MatrixXd> inverse_loop_matrices;
  std::vector<double> determinants;
  std::vector<MatrixXd> log_matrices;
  std::vector<bool> log_defined;
};

// Frame transports of the averaged connection around coordinate rectangles
// anchored at x (n = 2 only). Loop sizes cycle through `loop_sizes` with a
// few aspect ratios.
HolonomySample holonomy_sample(const FinslerStructure& fs, const VectorXd& x,
                               const std::vector<double>& loop_sizes,
                               int loop_count, int quadrature_nodes = 64,
                               const OdeOptions& ode = {});

enum class HolonomyClass {
  trivial,
  metric_preserving,
  special_linear,
  general_linear,
};

std::string to_string(HolonomyClass c);

struct HolonomyClassification {
  HolonomyClass cls;
  double identity_residual;      // max |H - I|
  double form_fit_residual;      // best positive quadratic form fit
  MatrixXd fitted_form;          // unit-norm candidate (when fit attempted)
  bool form_positive;
  double det_residual;           // max |det H - 1|
  std::string note;
};

// Classifies the sampled matrices: identity within tol -> trivial; common
// positive quadratic form within tol -> metric_preserving; unit determinants
// within tol -> special_linear; otherwise general_linear. The class describes
// the sampled loops only, never the full group.
HolonomyClassification holonomy_classify(const HolonomySample& sample,
                                         double tol);

struct VerdictEntry {
  std::string verdict;  // yes / no / inconclusive, or a holonomy class
  double residual;
  double tolerance;
  int samples;
};

struct ClassificationReport {
  std::string metric_id;
  std::map<std::string, VerdictEntry> verdicts;
  std::vector<ResidualEntry> residuals;
  uint64_t seed;
  int sample_points, sample_dirs, curve_count;
};

// Runs the berwald, landsberg, and rigidity tests (holonomy in 2D) with the
// averaged metric as the reference field, sampling inside the chart box.
ClassificationReport classify_structure(const FinslerStructure& fs,
                                        const ClassifyOptions& options);

// Seeded random smooth curves inside the chart box (shared by classification
// drivers and tests).
std::vector<CurvePtr> random_curves(const FinslerStructure& fs, int count,
                                    uint64_t seed, double margin = 0.3);

}  // namespace finsler
