/** @file

    @brief P1 discretization of the energy
      E(v) = (1/p) ||v||_{L^p}^p + (eps2/2) ||grad v||^2 - (f, v)
    with homogeneous Dirichlet data, on every level of a mesh hierarchy.

    The L^p term and the load use vertex (mass-lumped) quadrature, so every
    level function is represented by its interior nodal values and the
    nonlinear term acts node by node.
*/

#ifndef FASD_FEM_HPP
#define FASD_FEM_HPP

#include "fasd/linalg.hpp"
#include "fasd/mesh.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fasd {

enum class Forcing { One, SinSin, Zero };

Forcing parse_forcing(std::string_view name);
std::string to_string(Forcing f);

struct ModelParams {
  double p = 4.0;
  double eps2 = 1.0;
  Forcing forcing = Forcing::One;
};

/// Operators of one level, restricted to interior degrees of freedom.
struct LevelOperators {
  SparseMatrix stiffness;   ///< (grad phi_j, grad phi_i)
  Vector mass;              ///< lumped mass of interior vertices
  Vector load;              ///< (f, phi_i) under the vertex rule
  Vector vertex_mass;       ///< lumped mass of every vertex, boundary included
};

/// Nodal value with its level, the coefficient vector of a v in S_h.
struct LevelFunction {
  int level_index = 0;
  Vector coeffs;
};

/// |t|^{p-2} t and friends, with exact integer powers when p is integral.
class PowerLaw {
public:
  explicit PowerLaw(double p);

  double p() const { return p_; }
  double abs_pow(double t) const;   ///< |t|^p
  double flux(double t) const;      ///< |t|^{p-2} t
  double curvature(double t) const; ///< |t|^{p-2}

private:
  double pow_abs(double a, double e, int ie) const;

  double p_;
  int ip_;  ///< p as an integer, or -1
};

struct DualNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = true;
};

enum class DualNormKind { Stiffness, Euclidean };

class EnergyModel {
public:
  EnergyModel(ModelParams params, std::vector<LevelOperators> levels);

  const ModelParams& params() const { return params_; }
  double p() const { return params_.p; }
  double eps2() const { return params_.eps2; }
  const PowerLaw& power() const { return power_; }

  int num_levels() const { return static_cast<int>(levels_.size()); }
  int finest() const { return num_levels() - 1; }
  const LevelOperators& level(int l) const { return levels_.at(l); }
  int size(int l) const { return static_cast<int>(levels_.at(l).mass.size()); }

  double energy(int level, std::span<const double> u) const;
  /// E(w) - E(u), evaluated term by term so small decrements keep their digits.
  double energy_difference(int level, std::span<const double> u, std::span<const double> w) const;
  Vector gradient(int level, std::span<const double> u) const;
  Vector hessian_diagonal(int level, std::span<const double> u) const;
  Vector hessian_apply(int level, std::span<const double> u, std::span<const double> w) const;
  SparseMatrix hessian_matrix(int level, std::span<const double> u) const;

  /// sqrt(g . A^{-1} g) by CG (tol 1e-10), or ||g||_2 for the Euclidean kind.
  DualNormResult grad_dual_norm(int level, std::span<const double> g,
                                DualNormKind kind = DualNormKind::Stiffness) const;

private:
  void check_size(int level, std::size_t n) const;

  ModelParams params_;
  PowerLaw power_;
  std::vector<LevelOperators> levels_;
};

double forcing_value(Forcing f, const Point& x);

/// Exact P1 stiffness and vertex-rule mass/load on every level.
EnergyModel assemble(const ModelParams& params, const Hierarchy& hierarchy);

LevelOperators assemble_level(const MeshLevel& mesh, Forcing forcing);

} // namespace fasd

#endif // FASD_FEM_HPP
