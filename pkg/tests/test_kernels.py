import numpy as np
import pytest

from planelift.kernels import (
    RadialProfileSet,
    SO2RepSpec,
    analytic_basis_count,
    build_induction_kernel,
    build_r3s2_kernel,
    build_so3_kernel,
    build_volume_kernel,
    grid_nullspace_dimension,
    so2_tensor,
    so3_fiber_restriction,
    solve_so2_basis,
)
from planelift.so2_so3 import Rotation3, wigner_d, wigner_d_z


def _rot2(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _random_spec(rng, max_freq=4, max_irreps=2):
    return SO2RepSpec(tuple(int(k) for k in
                            rng.integers(0, max_freq + 1, size=rng.integers(1, max_irreps + 1))))


# ---------------------------------------------------------------------------
# rep specs and tensor structure

def test_spec_dimensions():
    spec = SO2RepSpec((0, 2, 0, 1))
    assert spec.dim == 1 + 2 + 1 + 2
    assert spec.multiplicities() == {0: 2, 1: 1, 2: 1}
    theta = 0.77
    m = spec.matrix(theta)
    assert np.abs(m @ m.T - np.eye(spec.dim)).max() < 1e-14


def test_spec_rejects_negative_frequency():
    with pytest.raises(ValueError):
        SO2RepSpec((-1,))


def test_tensor_change_of_basis():
    rng = np.random.default_rng(0)
    for _ in range(15):
        a, b = _random_spec(rng), _random_spec(rng)
        spec, t = so2_tensor(a, b)
        assert spec.dim == a.dim * b.dim
        assert np.abs(t @ t.T - np.eye(t.shape[0])).max() < 1e-14
        for theta in rng.uniform(0, 2 * np.pi, size=3):
            lhs = t.T @ np.kron(a.matrix(theta), b.matrix(theta)) @ t
            assert np.abs(lhs - spec.matrix(theta)).max() < 1e-12


def test_so3_fiber_restriction_content():
    spec, t = so3_fiber_restriction((0, 2))
    assert spec.freqs == (0, 0, 1, 2)
    for theta in (0.3, 2.5):
        big = np.zeros((6, 6))
        big[0, 0] = 1.0
        big[1:, 1:] = wigner_d_z(2, theta)
        assert np.abs(t.T @ big @ t - spec.matrix(theta)).max() < 1e-10


# ---------------------------------------------------------------------------
# radial profiles

def test_radial_profiles_shape_and_peaks():
    radial = RadialProfileSet(3, 0.6)
    r = np.linspace(0, 0.6, 7)
    vals = radial.evaluate(r)
    assert vals.shape == (3, 7)
    assert np.allclose(vals.max(axis=1), 1.0)


def test_degenerate_radial_set_rejected():
    with pytest.raises(ValueError, match="rank-deficient radial basis"):
        RadialProfileSet(3, 1e-9, width=10.0)  # rings collapse onto each other


# ---------------------------------------------------------------------------
# the solver

def test_isotropic_scalar_kernel():
    basis = solve_so2_basis(SO2RepSpec((0,)), SO2RepSpec((0,)),
                            RadialProfileSet(1, 1.0), m_max=0)
    assert basis.count == 1
    pts = np.random.default_rng(1).normal(size=(10, 2))
    vals = basis.evaluate(0, pts)
    # isotropic: value depends only on the radius
    radii = np.hypot(pts[:, 0], pts[:, 1])
    ref = basis.evaluate(0, np.stack([radii, np.zeros_like(radii)], axis=1))
    assert np.abs(vals - ref).max() < 1e-12


def test_scalar_to_vector_count():
    basis = solve_so2_basis(SO2RepSpec((0,)), SO2RepSpec((1,)),
                            RadialProfileSet(1, 1.0), m_max=2)
    assert basis.count == 2


def test_steerability_residual_sampled():
    rng = np.random.default_rng(2)
    rin, rout = SO2RepSpec((0, 1)), SO2RepSpec((1, 2))
    basis = solve_so2_basis(rin, rout, RadialProfileSet(2, 1.0), m_max=4)
    assert basis.count == 2 * analytic_basis_count(rin, rout, 4)
    pts = rng.normal(size=(25, 2))
    thetas = rng.uniform(0, 2 * np.pi, size=8)
    for idx in range(basis.count):
        for theta in thetas:
            lhs = basis.evaluate(idx, pts @ _rot2(theta).T)
            rhs = np.einsum("ou,nuv,wv->now", rout.matrix(theta),
                            basis.evaluate(idx, pts), rin.matrix(theta))
            assert np.abs(lhs - rhs).max() < 1e-8


def test_solver_matches_grid_oracle():
    rng = np.random.default_rng(3)
    radial = RadialProfileSet(1, 1.0)
    for _ in range(10):
        rin, rout = _random_spec(rng), _random_spec(rng)
        m_max = rin.max_freq + rout.max_freq
        got = solve_so2_basis(rin, rout, radial, m_max).n_angular
        assert got == grid_nullspace_dimension(rin, rout)
        assert got == analytic_basis_count(rin, rout, m_max)


def test_basis_elements_linearly_independent():
    rng = np.random.default_rng(4)
    basis = solve_so2_basis(SO2RepSpec((0, 1)), SO2RepSpec((0, 1)),
                            RadialProfileSet(2, 1.0), m_max=3)
    pts = rng.normal(size=(80, 2))
    flat = basis.evaluate_all(pts).reshape(basis.count, -1)
    assert np.linalg.matrix_rank(flat, tol=1e-8) == basis.count


def test_projection_splits_constraint_violation():
    # projecting onto the solved subspace removes the violation; what is
    # left violates exactly as much as the original did
    rng = np.random.default_rng(5)
    rin, rout = SO2RepSpec((0, 1)), SO2RepSpec((1,))
    radial = RadialProfileSet(2, 1.0)
    basis = solve_so2_basis(rin, rout, radial, m_max=3)
    pts = rng.normal(size=(120, 2))
    sample = basis.evaluate_all(pts).reshape(basis.count, -1)

    def violation(fn):
        worst = 0.0
        for theta in (0.7, 2.1, 4.4):
            lhs = fn(pts @ _rot2(theta).T)
            rhs = np.einsum("ou,nuv,wv->now", rout.matrix(theta), fn(pts),
                            rin.matrix(theta))
            worst = max(worst, np.abs(lhs - rhs).max())
        return worst

    # a random smooth kernel-shaped function with the same radial content
    coeff = rng.normal(size=(2, 4, 2, rout.dim, rin.dim))

    def random_fn(p):
        radii = np.hypot(p[:, 0], p[:, 1])
        phi = np.arctan2(p[:, 1], p[:, 0])
        prof = radial.evaluate(radii)
        out = np.zeros((p.shape[0], rout.dim, rin.dim))
        for pi in range(2):
            for m in range(4):
                ang = np.cos(m * phi)[:, None, None] * coeff[pi, m, 0] \
                    + np.sin(m * phi)[:, None, None] * coeff[pi, m, 1]
                out += prof[pi][:, None, None] * ang
        return out

    target = random_fn(pts).reshape(-1)
    sol, *_ = np.linalg.lstsq(sample.T, target, rcond=None)
    projected = np.einsum("b,bnuv->nuv", sol, basis.evaluate_all(pts))

    def projected_fn(p):
        return np.einsum("b,bnuv->nuv", sol, basis.evaluate_all(p))

    def residual_fn(p):
        return random_fn(p) - projected_fn(p)

    assert violation(projected_fn) < 1e-8
    assert abs(violation(random_fn) - violation(residual_fn)) < 1e-6


# ---------------------------------------------------------------------------
# lifted kernel families

def test_induction_kernel_degree_zero_is_isotropic():
    kernel = build_induction_kernel(SO2RepSpec((0,)), 1, 0, RadialProfileSet(2, 0.5))
    assert kernel.weight_count == 2
    rng = np.random.default_rng(6)
    w = rng.normal(size=(1, 2))
    pts = rng.normal(size=(10, 2)) * 0.3
    n1 = np.array([0.0, 0.0, 1.0])
    n2 = np.array([0.0, 1.0, 0.0])
    assert np.abs(kernel.kappa(w, n1, pts) - kernel.kappa(w, n2, pts)).max() < 1e-12


def test_induction_kernel_input_structure():
    fiber = SO2RepSpec((0, 1))
    kernel = build_induction_kernel(fiber, 1, 6, RadialProfileSet(1, 0.5))
    for ell, basis in enumerate(kernel.bases):
        mults = basis.in_rep.multiplicities()
        # tensor rule: one copy of each harmonic frequency per scalar fiber
        # slot, shifted copies for the frequency-one slot
        expected: dict[int, int] = {}
        for k in range(ell + 1):
            for f in fiber.freqs:
                if k == 0 and f == 0:
                    expected[0] = expected.get(0, 0) + 1
                elif k == 0 or f == 0:
                    kk = max(k, f)
                    expected[kk] = expected.get(kk, 0) + 1
                else:
                    expected[k + f] = expected.get(k + f, 0) + 1
                    if k == f:
                        expected[0] = expected.get(0, 0) + 2
                    else:
                        expected[abs(k - f)] = expected.get(abs(k - f), 0) + 1
        assert mults == expected


def test_induction_kernel_equivariance():
    fiber = SO2RepSpec((0, 1))
    kernel = build_induction_kernel(fiber, 2, 3, RadialProfileSet(2, 0.5, width=0.12))
    rng = np.random.default_rng(7)
    w = rng.normal(size=(2, kernel.weight_count))
    pts = rng.normal(size=(12, 2)) * 0.4
    nhat = np.array([0.3, -0.5, 0.81])
    nhat /= np.linalg.norm(nhat)
    for theta in rng.uniform(0, 2 * np.pi, size=6):
        hz = Rotation3.about_z(theta)
        lhs = kernel.kappa(w, hz.matrix() @ nhat, pts @ _rot2(theta).T)
        rhs = np.einsum("ncv,wv->ncw", kernel.kappa(w, nhat, pts), fiber.matrix(theta))
        assert np.abs(lhs - rhs).max() < 1e-8


def test_induction_kernel_linear_in_weights():
    kernel = build_induction_kernel(SO2RepSpec((0,)), 1, 2, RadialProfileSet(2, 0.5))
    rng = np.random.default_rng(8)
    w1 = rng.normal(size=(1, kernel.weight_count))
    w2 = rng.normal(size=(1, kernel.weight_count))
    pts = rng.normal(size=(9, 2)) * 0.4
    nhat = np.array([0.0, 0.6, 0.8])
    combined = kernel.kappa(w1 + w2, nhat, pts)
    split = kernel.kappa(w1, nhat, pts) + kernel.kappa(w2, nhat, pts)
    assert np.abs(combined - split).max() < 1e-12


def test_so3_kernel_degree_zero_matches_sphere_family():
    fiber = SO2RepSpec((0, 1))
    radial = RadialProfileSet(2, 0.5)
    sphere = build_induction_kernel(fiber, 1, 0, radial)
    so3 = build_so3_kernel(fiber, (0,), 0, radial)
    assert so3.bases[0].count == sphere.bases[0].count


def test_per_degree_basis_dimensions_match_oracle():
    radial = RadialProfileSet(1, 0.5)
    sphere = build_induction_kernel(SO2RepSpec((0, 1)), 1, 2, radial)
    so3 = build_so3_kernel(SO2RepSpec((0,)), (1,), 2, radial)
    for kernel in (sphere, so3):
        for basis in kernel.bases:
            assert basis.n_angular == grid_nullspace_dimension(basis.in_rep, basis.out_rep)


def test_so3_kernel_equivariance():
    fiber = SO2RepSpec((0,))
    kernel = build_so3_kernel(fiber, (0, 1), 2, RadialProfileSet(1, 0.5, width=0.15))
    rng = np.random.default_rng(9)
    w = rng.normal(size=kernel.weight_count)
    pts = rng.normal(size=(10, 2)) * 0.4
    g = Rotation3.random(rng)
    for theta in rng.uniform(0, 2 * np.pi, size=5):
        hz = Rotation3.about_z(theta)
        out_rot = np.zeros((kernel.out_dim, kernel.out_dim))
        pos = 0
        for ell in kernel.out_ells:
            d = 2 * ell + 1
            out_rot[pos:pos + d, pos:pos + d] = wigner_d(ell, hz)
            pos += d
        lhs = kernel.kappa(w, hz.compose(g), pts @ _rot2(theta).T)
        rhs = np.einsum("ou,nuv,wv->now", out_rot, kernel.kappa(w, g, pts),
                        fiber.matrix(theta))
        assert np.abs(lhs - rhs).max() < 1e-8


def test_volume_kernel_slices():
    fiber = SO2RepSpec((0, 1))
    kernel = build_volume_kernel(fiber, (1,), (-0.5, 0.0, 0.5),
                                 RadialProfileSet(2, 0.5))
    dims = {b.count for b in kernel.bases}
    assert len(dims) == 1  # the constraint does not involve the height
    rng = np.random.default_rng(10)
    w = rng.normal(size=kernel.bases[0].count)
    pts = rng.normal(size=(14, 2)) * 0.4
    for z_index in range(3):
        base = kernel.kappa_slice(z_index, w, pts)
        for theta in rng.uniform(0, 2 * np.pi, size=4):
            lhs = kernel.kappa_slice(z_index, w, pts @ _rot2(theta).T)
            out_rot = wigner_d_z(1, theta)
            rhs = np.einsum("ou,nuv,wv->now", out_rot, base, fiber.matrix(theta))
            assert np.abs(lhs - rhs).max() < 1e-8


def test_volume_kernel_isotropic_single_slice():
    kernel = build_volume_kernel(SO2RepSpec((0,)), (0,), (0.0,), RadialProfileSet(1, 0.5))
    assert kernel.bases[0].count == 1
    assert kernel.bases[0].angular[0].m == 0


def test_r3s2_kernel_consistency():
    fiber = SO2RepSpec((0,))
    radial = RadialProfileSet(2, 0.5, width=0.12)
    single = build_r3s2_kernel(fiber, 2, (0.0,), radial)
    sphere = build_induction_kernel(fiber, 1, 2, radial)
    assert single.slices[0].weight_count == sphere.weight_count
    multi = build_r3s2_kernel(fiber, 2, (-1.0, 0.0, 1.0), radial)
    counts = {tuple(b.count for b in s.bases) for s in multi.slices}
    assert len(counts) == 1  # per-degree counts independent of the height

    rng = np.random.default_rng(11)
    w = rng.normal(size=(1, single.slices[0].weight_count))
    pts = rng.normal(size=(10, 2)) * 0.4
    nhat = np.array([0.6, 0.0, 0.8])
    for theta in rng.uniform(0, 2 * np.pi, size=4):
        hz = Rotation3.about_z(theta)
        for z_index in range(3):
            lhs = multi.kappa(z_index, w, hz.matrix() @ nhat, pts @ _rot2(theta).T)
            rhs = multi.kappa(z_index, w, nhat, pts)  # trivial in/out fibers
            assert np.abs(lhs - rhs).max() < 1e-8


def test_empty_height_samples_rejected():
    with pytest.raises(ValueError):
        build_volume_kernel(SO2RepSpec((0,)), (0,), (), RadialProfileSet(1, 0.5))
    with pytest.raises(ValueError):
        build_r3s2_kernel(SO2RepSpec((0,)), 1, (), RadialProfileSet(1, 0.5))
