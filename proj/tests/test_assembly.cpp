#include "support.hpp"

#include <gtest/gtest.h>

using namespace richards;

namespace {

std::shared_ptr<const Mesh2D> shared(Mesh2D m) { return std::make_shared<const Mesh2D>(std::move(m)); }

ProblemSpec vgm_dam(std::size_t n, FaceKrMode mode = FaceKrMode::Central)
{
    ProblemSpec p = build_dam(DamModel::Vgm, shared(gen_cartesian(n, n, dam_size, dam_size)));
    p.kr_mode = mode;
    return p;
}

// Heads kept at least 0.1 m away from saturation, where the VGM curves are
// smooth.
Vector random_heads(const ProblemSpec& p, std::uint32_t seed)
{
    std::mt19937 g(seed);
    std::uniform_real_distribution<double> off(0.1, 2.0);
    std::bernoulli_distribution wet(0.5);
    Vector h(p.grid().num_cells());
    for (Index c = 0; c < h.size(); ++c) {
        const double z = p.grid().cells()[c].centroid.z;
        h[c] = wet(g) ? z + off(g) : z - 1.5 * off(g);
    }
    return h;
}

double dense(const SparseMatrix& A, std::size_t i, std::size_t j) { return A(i, j); }

template <class T>
std::vector<T> copy(std::span<const T> s)
{
    return {s.begin(), s.end()};
}

} // namespace

TEST(FaceKr, CentralIsHalfSum)
{
    EXPECT_DOUBLE_EQ(face_kr(1.0, 7.0, 0.2, 0.4, FaceKrMode::Central), 0.3);
    EXPECT_DOUBLE_EQ(face_kr(7.0, 1.0, 0.2, 0.4, FaceKrMode::Central), 0.3);
}

TEST(FaceKr, UpwindTakesLargerHead)
{
    EXPECT_EQ(face_kr(5.0, 3.0, 0.2, 0.4, FaceKrMode::Upwind), 0.2);
    EXPECT_EQ(face_kr(3.0, 5.0, 0.2, 0.4, FaceKrMode::Upwind), 0.4);
}

TEST(FaceKr, UpwindTieFallsBackToCentral)
{
    EXPECT_DOUBLE_EQ(face_kr(4.0, 4.0, 0.2, 0.4, FaceKrMode::Upwind), 0.3);
}

TEST(Assembly, LinearStageMatrixIndependentOfHead)
{
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
        const ProblemSpec p = vgm_dam(6);
        const Discretization d(p, s);
        const Continuation q0{0.0, ContinuationKind::Power};
        const AssemblyOutput a = d.assemble(Vector(d.size(), 10.0), q0);
        const AssemblyOutput b = d.assemble(random_heads(p, 3), q0);
        EXPECT_EQ(copy(a.matrix.values()), copy(b.matrix.values()));
        EXPECT_EQ(copy(a.matrix.col()), copy(b.matrix.col()));
        EXPECT_EQ(a.rhs, b.rhs);
        const AssemblyOutput j = d.assemble_jacobian(random_heads(p, 3), q0);
        EXPECT_EQ(copy(j.matrix.values()), copy(a.matrix.values()));
    }
}

TEST(Assembly, ResidualIsMatrixTimesHeadMinusRhs)
{
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O})
        for (auto kind : {ContinuationKind::Linear, ContinuationKind::Power})
            for (double q : {0.0, 0.3, 1.0}) {
                const ProblemSpec p = vgm_dam(5);
                const Discretization d(p, s);
                const Vector h = random_heads(p, 11);
                const AssemblyOutput a = d.assemble(h, {q, kind});
                const Vector Ah = a.matrix * h;
                const double scale = norm_inf(Ah) + norm_inf(a.rhs);
                for (std::size_t i = 0; i < h.size(); ++i)
                    EXPECT_NEAR(a.residual[i], Ah[i] - a.rhs[i], 1e-13 * scale);
            }
}

TEST(Assembly, TpfaCentralIsSymmetricMMatrix)
{
    const ProblemSpec p = vgm_dam(6);
    const Discretization d(p, Scheme::TPFA);
    for (double q : {0.0, 1.0}) {
        const SparseMatrix A = d.assemble(random_heads(p, 5), {q, ContinuationKind::Linear}).matrix;
        for (std::size_t i = 0; i < A.size(); ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < A.size(); ++j) {
                if (i == j) continue;
                EXPECT_DOUBLE_EQ(dense(A, i, j), dense(A, j, i));
                EXPECT_LE(dense(A, i, j), 0.0);
                off += std::abs(dense(A, i, j));
            }
            EXPECT_GT(dense(A, i, i), 0.0);
            EXPECT_GE(dense(A, i, i), off * (1.0 - 1e-14));
        }
    }
}

TEST(Assembly, JacobianMatchesFiniteDifferences)
{
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O})
        for (FaceKrMode mode : {FaceKrMode::Central, FaceKrMode::Upwind})
            for (auto kind : {ContinuationKind::Linear, ContinuationKind::Power}) {
                const ProblemSpec p = vgm_dam(4, mode);
                const Discretization d(p, s);
                const Continuation cont{1.0, kind};
                const Vector h = random_heads(p, 21);
                const SparseMatrix J = d.assemble_jacobian(h, cont).matrix;
                double jmax = 0.0;
                for (double v : J.values()) jmax = std::max(jmax, std::abs(v));
                for (std::size_t j = 0; j < h.size(); ++j) {
                    const double step = 1e-6 * (1.0 + std::abs(h[j]));
                    Vector hp = h, hm = h;
                    hp[j] += step;
                    hm[j] -= step;
                    const Vector Fp = d.residual(hp, cont), Fm = d.residual(hm, cont);
                    for (std::size_t i = 0; i < h.size(); ++i) {
                        const double fd = (Fp[i] - Fm[i]) / (2.0 * step);
                        EXPECT_NEAR(dense(J, i, j), fd, 1e-5 * jmax)
                            << to_string(s) << " " << to_string(mode) << " " << to_string(kind) << " (" << i << ", "
                            << j << ")";
                    }
                }
            }
}

TEST(Assembly, JacobianSparsityWithinStencil)
{
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
        const ProblemSpec p = vgm_dam(5);
        const Discretization d(p, s);
        const Vector h = random_heads(p, 2);
        const SparseMatrix A = d.assemble(h, {0.0, ContinuationKind::Linear}).matrix;
        const SparseMatrix J = d.assemble_jacobian(h, {1.0, ContinuationKind::Linear}).matrix;
        for (std::size_t i = 0; i < J.size(); ++i)
            for (std::size_t k = J.row_ptr()[i]; k < J.row_ptr()[i + 1]; ++k)
                if (J.values()[k] != 0.0) {
                    const std::size_t j = J.col()[k];
                    bool present = false;
                    for (std::size_t m = A.row_ptr()[i]; m < A.row_ptr()[i + 1]; ++m) present |= A.col()[m] == j;
                    EXPECT_TRUE(present) << i << " " << j;
                }
    }
}

TEST(Assembly, UpwindDerivativeOnlyFromUpwindCell)
{
    const ProblemSpec p = vgm_dam(5, FaceKrMode::Upwind);
    const Discretization d(p, Scheme::TPFA);
    const Vector h = random_heads(p, 9);
    const Continuation cont{1.0, ContinuationKind::Linear};
    std::size_t checked = 0;
    for (Index f = 0; f < p.grid().num_faces(); ++f) {
        const Face& face = p.grid().faces()[f];
        if (face.is_boundary()) continue;
        const auto K = d.face_permeability(f, h, cont);
        if (h[face.cells[0]] > h[face.cells[1]]) {
            EXPECT_EQ(K.d_second, 0.0);
        } else {
            EXPECT_EQ(K.d_first, 0.0);
        }
        ++checked;
    }
    EXPECT_GT(checked, 0u);
}

TEST(Assembly, ResidualInvariantUnderFaceFlip)
{
    const Mesh2D base = gen_triangular(4, 4, dam_size, dam_size);
    for (Index f = 0; f < base.num_faces(); f += 7) {
        if (base.faces()[f].is_boundary()) continue;
        const ProblemSpec a = build_dam(DamModel::Vgm, shared(base));
        const ProblemSpec b = build_dam(DamModel::Vgm, shared(base.with_flipped_face(f)));
        for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
            const Vector h = random_heads(a, static_cast<std::uint32_t>(f));
            const Vector Fa = Discretization(a, s).residual(h, {1.0, ContinuationKind::Linear});
            const Vector Fb = Discretization(b, s).residual(h, {1.0, ContinuationKind::Linear});
            for (std::size_t i = 0; i < Fa.size(); ++i) EXPECT_NEAR(Fa[i], Fb[i], 1e-12 * (1.0 + norm_inf(Fa)));
        }
    }
}

TEST(Assembly, TwoCellNoFlowEquilibrium)
{
    ProblemSpec p = make_problem(shared(gen_cartesian(2, 1, 2.0, 1.0)), Medium{"m", {1, 0, 1}, UnconfinedParams{}});
    const auto left = p.grid().find_tag("left");
    set_boundary(
        p, [&](const Face& f) { return f.tag == *left; }, [](const Face&) { return BoundaryCondition::dirichlet(1.0); });
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
        const Discretization d(p, s);
        const Vector h = check::solve_linear_stage(d);
        EXPECT_NEAR(h[0], 1.0, 1e-14);
        EXPECT_NEAR(h[1], 1.0, 1e-14);
        EXPECT_LE(norm_inf(d.residual(h, {1.0, ContinuationKind::Linear})), 1e-14);
    }
}

TEST(Assembly, DirectSolutionZeroesResidual)
{
    for (const char* mesh : {"cartesian:20x20", "triangular:8x8"})
        for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
            const ProblemSpec p = build_dam(DamModel::Unconfined, mesh);
            const Discretization d(p, s);
            const Vector h = check::solve_linear_stage(d);
            const AssemblyOutput a = d.assemble(h, {0.0, ContinuationKind::Linear});
            EXPECT_LE(norm_inf(a.residual), 1e-10 * norm_inf(a.rhs)) << mesh << " " << to_string(s);
        }
}

TEST(Assembly, NeumannFluxIsPrescribedNotScaled)
{
    // One cell: Dirichlet on the left at the cell head, outward flux g on
    // the top face. The residual is g * length for every q.
    ProblemSpec p = make_problem(shared(gen_cartesian(1, 1, 2.0, 1.0)), Medium{"m", {1, 0, 1}, UnconfinedParams{}});
    const auto left = p.grid().find_tag("left");
    const auto top = p.grid().find_tag("top");
    set_boundary(
        p, [&](const Face& f) { return f.tag == *left; }, [](const Face&) { return BoundaryCondition::dirichlet(0.2); });
    set_boundary(
        p, [&](const Face& f) { return f.tag == *top; }, [](const Face&) { return BoundaryCondition::neumann(0.75); });
    for (Scheme s : {Scheme::TPFA, Scheme::MPFA_O}) {
        const Discretization d(p, s);
        for (double q : {0.0, 0.5, 1.0}) {
            const Vector F = d.residual(Vector{0.2}, {q, ContinuationKind::Power});
            EXPECT_NEAR(F[0], 0.75 * 2.0, 1e-13);
        }
    }
}

TEST(Assembly, SizeMismatchThrows)
{
    const Discretization d(vgm_dam(3), Scheme::TPFA);
    EXPECT_THROW(d.residual(Vector(5, 0.0), {}), std::invalid_argument);
}
