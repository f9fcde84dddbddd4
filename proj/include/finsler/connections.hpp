#pragma once

#include <optional>

#include "finsler/metric.hpp"
#include "finsler/types.hpp"

namespace finsler {

// Connection coefficients G(i,j,k) = Gamma^i_jk, upper index first. Affine
// (y-independent) coefficient arrays leave `y` unset.
enum class ConnectionKind {
  chern,
  berwald,
  levi_civita,
  pullback_affine,
  averaged_affine,
};

struct ConnectionCoefficients {
  ConnectionKind kind;
  VectorXd x;
  std::optional<VectorXd> y;
  Tensor3 gamma;

  bool y_dependent() const { return y.has_value(); }
  int dim() const { return gamma.dim(); }

  double torsion_residual() const {
    double m = 0.0;
    const int n = gamma.dim();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          m = std::max(m, std::abs(gamma(i, j, k) - gamma(i, k, j)));
    return m;
  }
};

struct SprayData {
  VectorXd x, y;
  Tensor3 christoffel;  // gamma^i_jk from x-derivatives of g
  VectorXd spray;       // G^i = gamma^i_jk y^j y^k
};

// Formal Christoffel symbols of the fundamental tensor and the induced spray.
SprayData formal_christoffel(const FinslerStructure& fs, const VectorXd& x,
                             const VectorXd& y);

enum class NonlinearVariant {
  cartan_corrected,  // gamma^i_jk y^k - A^i_jk gamma^k_rs y^r y^s / F
  spray_derivative,  // (1/2) dG^i/dy^j
};

struct NonlinearConnection {
  VectorXd x, y;
  MatrixXd coefficients;  // N^i_j
  NonlinearVariant variant;
};

NonlinearConnection nonlinear_connection(
    const FinslerStructure& fs, const VectorXd& x, const VectorXd& y,
    NonlinearVariant variant = NonlinearVariant::cartan_corrected);

struct ChernConnection {
  ConnectionCoefficients coefficients;
  MatrixXd nonlinear;  // the N^i_j used for horizontal derivatives
  // Structure-equation diagnostics evaluated on the assembled arrays:
  double torsion_residual;       // max |Gamma^i_jk - Gamma^i_kj|
  double horizontal_residual;    // max |delta_k g_ij - Gamma g terms|
  double vertical_residual;      // max |F dg_ij/dy_k - 2 A_ijk|
};

// Chern connection via horizontal Christoffel symbols:
// Gamma^l_jk = 1/2 g^{ls} (delta_j g_sk + delta_k g_sj - delta_s g_jk),
// delta_j = d/dx_j - N^m_j d/dy_m with the corrected nonlinear connection.
ChernConnection chern_coefficients(const FinslerStructure& fs,
                                   const VectorXd& x, const VectorXd& y);

struct BerwaldConnection {
  ConnectionCoefficients coefficients;
  // Defect of metric-compatibility along the flag direction:
  // D_ijk = (nabla_{delta_k} g)_ij + 2 (nabla_l A)_ijk, zero iff the
  // fiber-derivative term compensates the horizontal one.
  Tensor3 h_compatibility_defect;
};

// Berwald connection Gamma^i_jk = 1/2 d^2 G^i / dy_j dy_k from the spray.
BerwaldConnection berwald_coefficients(const FinslerStructure& fs,
                                       const VectorXd& x, const VectorXd& y);

// Re-tags a y-independent coefficient array as a connection on the pulled-back
// bundle; the coefficients are unchanged. Rejects y-dependent input.
ConnectionCoefficients pullback_connection(const ConnectionCoefficients& c);

struct DifferenceTensor {
  Tensor3 difference;      // B^i_jk = Gamma1 - Gamma2
  Tensor3 symmetric;       // S^i_jk
  Tensor3 antisymmetric;   // A^i_jk
  double torsion_identity_residual;  // |2A - (Tor1 - Tor2)|
};

DifferenceTensor difference_tensor(const ConnectionCoefficients& a,
                                   const ConnectionCoefficients& b);

// Landsberg tensor: horizontal Chern derivative of the Cartan tensor along
// the unit flag direction l = y/F.
Tensor3 landsberg_tensor(const FinslerStructure& fs, const VectorXd& x,
                         const VectorXd& y);

// Both nonlinear connection arrays and the Chern linear coefficients at one
// point, sharing the jet evaluation (transport right-hand sides use this).
struct PointConnectionData {
  MatrixXd nonlinear;
  Tensor3 chern;
};
PointConnectionData chern_data(const FinslerStructure& fs, const VectorXd& x,
                               const VectorXd& y);

}  // namespace finsler
