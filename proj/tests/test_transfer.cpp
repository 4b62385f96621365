#include "fasd/fem.hpp"
#include "fasd/mesh.hpp"
#include "fasd/oracle.hpp"
#include "fasd/problem.hpp"
#include "fasd/transfer.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace fasd;
namespace orc = fasd::oracle;

namespace {

struct Setup {
  Hierarchy mesh;
  EnergyModel model;
  std::vector<TransferPair> transfers;
};

Setup make_setup(int coarse_n, int levels)
{
  Hierarchy h = build_hierarchy(coarse_n, levels);
  EnergyModel m = assemble({4.0, 1.0, Forcing::One}, h);
  std::vector<TransferPair> t = build_transfers(h, m);
  return {std::move(h), std::move(m), std::move(t)};
}

Vector sample(const MeshLevel& mesh, double (*f)(const Point&))
{
  Vector v(mesh.num_interior());
  for (int k = 0; k < mesh.num_interior(); ++k) v[k] = f(mesh.vertices[mesh.interior_vertices[k]]);
  return v;
}

Vector random_vector(int n, std::mt19937& rng)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(n);
  for (double& v : x) v = u(rng);
  return x;
}

} // namespace

TEST_CASE("prolongation stencil")
{
  const Setup s = make_setup(4, 2);
  const TransferPair& t = s.transfers[0];
  const MeshLevel& fine = s.mesh[1];
  CHECK(t.prolongation.rows() == fine.num_interior());
  CHECK(t.prolongation.cols() == s.mesh[0].num_interior());
  const auto& off = t.prolongation.row_offsets();
  for (int i = 0; i < t.prolongation.rows(); ++i) {
    const int nnz = off[i + 1] - off[i];
    CHECK(nnz <= 2);
    const VertexParents& par = fine.parents[fine.interior_vertices[i]];
    if (par.is_copy()) {
      CHECK(nnz == 1);
      CHECK(t.prolongation.values()[off[i]] == 1.0);
    } else {
      for (int k = off[i]; k < off[i + 1]; ++k) CHECK(t.prolongation.values()[k] == 0.5);
    }
  }
}

TEST_CASE("prolongation reproduces linear functions")
{
  const Setup s = make_setup(4, 3);
  auto lin = [](const Point& x) { return x.x + x.y; };
  for (int l = 0; l < 2; ++l) {
    const Vector vf = prolongate(s.transfers[l], sample(s.mesh[l], lin));
    const Vector expect = sample(s.mesh[l + 1], lin);
    for (std::size_t i = 0; i < vf.size(); ++i) {
      // the discrete function is zero on the boundary, so skip nodes next to it
      const MeshLevel& fine = s.mesh[l + 1];
      const VertexParents& par = fine.parents[fine.interior_vertices[i]];
      const bool interior_parents = !s.mesh[l].is_boundary[par.first]
                                    && (par.second < 0 || !s.mesh[l].is_boundary[par.second]);
      if (interior_parents) CHECK(vf[i] == doctest::Approx(expect[i]).epsilon(1e-15));
    }
  }
  CHECK(prolongate(s.transfers[0], Vector(s.mesh[0].num_interior(), 0.0))
        == Vector(s.mesh[1].num_interior(), 0.0));
  CHECK_THROWS_AS(prolongate(s.transfers[0], Vector(3, 0.0)), std::invalid_argument);
}

TEST_CASE("Galerkin consistency of the stiffness matrices")
{
  const Setup s = make_setup(4, 3);
  for (int l = 0; l < 2; ++l) {
    const SparseMatrix& ip = s.transfers[l].prolongation;
    const SparseMatrix galerkin = multiply(ip.transpose(), multiply(s.model.level(l + 1).stiffness, ip));
    const orc::Dense g = orc::to_dense(galerkin);
    const orc::Dense a = orc::to_dense(s.model.level(l).stiffness);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::abs(g[i][j] - a[i][j]) <= 1e-12);
    }
  }
  std::mt19937 rng(1);
  const Vector vc = random_vector(s.mesh[0].num_interior(), rng);
  const Vector vf = prolongate(s.transfers[0], vc);
  CHECK(dot(vf, spmv(s.model.level(1).stiffness, vf))
        == doctest::Approx(dot(vc, spmv(s.model.level(0).stiffness, vc))).epsilon(1e-12));
}

TEST_CASE("restriction is the adjoint of prolongation")
{
  const Setup s = make_setup(4, 2);
  const TransferPair& t = s.transfers[0];
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector vc = random_vector(t.prolongation.cols(), rng);
    const Vector gf = random_vector(t.prolongation.rows(), rng);
    const double lhs = dot(restrict_dual(t, gf), vc);
    const double rhs = dot(gf, prolongate(t, vc));
    CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(lhs)));
  }
  CHECK(restrict_dual(t, Vector(t.prolongation.rows(), 0.0)) == Vector(t.prolongation.cols(), 0.0));
}

TEST_CASE("restriction of a unit dual vector at a copied node")
{
  const Setup s = make_setup(4, 2);
  const TransferPair& t = s.transfers[0];
  const MeshLevel& fine = s.mesh[1];
  const int nc = t.prolongation.cols();
  // fine node 0 is a copy of coarse node 0
  Vector e(t.prolongation.rows(), 0.0);
  e[0] = 1.0;
  const Vector r = restrict_dual(t, e);
  CHECK(fine.parents[fine.interior_vertices[0]].is_copy());
  CHECK(r[0] == 1.0);
  for (int j = 1; j < nc; ++j) CHECK(r[j] == 0.0);

  // a midpoint between two interior coarse nodes sends 1/2 to each
  for (int i = 0; i < t.prolongation.rows(); ++i) {
    const VertexParents& par = fine.parents[fine.interior_vertices[i]];
    if (par.is_copy()) continue;
    const auto& ci = s.mesh[0].interior_index;
    if (!ci[par.first] || !ci[par.second]) continue;
    Vector ei(t.prolongation.rows(), 0.0);
    ei[i] = 1.0;
    const Vector ri = restrict_dual(t, ei);
    CHECK(ri[*ci[par.first]] == 0.5);
    CHECK(ri[*ci[par.second]] == 0.5);
    double total = 0.0;
    for (double x : ri) total += x;
    CHECK(total == 1.0);
    break;
  }
}

TEST_CASE("projections leave coarse functions unchanged")
{
  const Setup s = make_setup(4, 2);
  const TransferPair& t = s.transfers[0];
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector vc = random_vector(t.prolongation.cols(), rng);
    const Vector vf = prolongate(t, vc);
    CHECK(project_primal(t, vf, ProjectionMode::Injection) == vc);
    const Vector q = project_primal(t, vf, ProjectionMode::L2);
    for (std::size_t i = 0; i < vc.size(); ++i) CHECK(std::abs(q[i] - vc[i]) <= 1e-9);
  }
  const Vector z(t.prolongation.rows(), 0.0);
  CHECK(project_primal(t, z, ProjectionMode::Injection) == Vector(t.prolongation.cols(), 0.0));
  CHECK(project_primal(t, z, ProjectionMode::L2) == Vector(t.prolongation.cols(), 0.0));
  CHECK_THROWS_AS(project_primal(t, Vector(2, 0.0), ProjectionMode::L2), std::invalid_argument);
}

TEST_CASE("l2 projection is the lumped-mass orthogonal projection")
{
  const Setup s = make_setup(4, 2);
  const TransferPair& t = s.transfers[0];
  std::mt19937 rng(4);
  const Vector vf = random_vector(t.prolongation.rows(), rng);
  const Vector q = project_primal(t, vf, ProjectionMode::L2);
  const Vector iq = prolongate(t, q);
  // residual vf - I q is M-orthogonal to every coarse basis function
  Vector mr(vf.size());
  for (std::size_t i = 0; i < vf.size(); ++i) mr[i] = t.fine_mass[i] * (vf[i] - iq[i]);
  for (double x : restrict_dual(t, mr)) CHECK(std::abs(x) <= 1e-10);
}

TEST_CASE("injection of sampled smooth functions")
{
  const Setup s = make_setup(4, 3);
  auto f = [](const Point& x) { return std::sin(M_PI * x.x) * std::sin(M_PI * x.y); };
  for (int l = 0; l < 2; ++l) {
    const Vector q = project_primal(s.transfers[l], sample(s.mesh[l + 1], f), ProjectionMode::Injection);
    CHECK(q == sample(s.mesh[l], f));
  }
  CHECK(parse_projection("l2") == ProjectionMode::L2);
  CHECK(to_string(ProjectionMode::Injection) == "injection");
  CHECK_THROWS_AS(parse_projection("L3"), std::invalid_argument);
}

TEST_CASE("composite maps through a problem")
{
  const auto pr = make_problem({4.0, 1.0, Forcing::One}, 2, 4);
  std::mt19937 rng(5);
  for (int l = 0; l < pr->finest(); ++l) {
    const SparseMatrix& r = pr->restriction_from_finest(l);
    const SparseMatrix c = composite_prolongation(pr->transfers(), l, pr->finest());
    CHECK(r.rows() == c.cols());
    const Vector v = random_vector(r.rows(), rng);
    const Vector a = pr->prolongate_to_finest(l, v);
    const Vector b = spmv(c, v);
    const Vector d = spmv_transpose(r, v);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
      CHECK(a[i] == doctest::Approx(d[i]).epsilon(1e-14));
    }
    const Vector g = random_vector(static_cast<int>(a.size()), rng);
    const Vector rg = pr->restrict_from_finest(l, g);
    CHECK(dot(rg, v) == doctest::Approx(dot(g, a)).epsilon(1e-12));
    CHECK(pr->project_from_finest(l, a, ProjectionMode::Injection) == v);
  }
}
