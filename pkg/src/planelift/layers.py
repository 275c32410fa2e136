"""Executable lifting layer: planar feature fields in, spherical signals out.

Spherical signals live purely in harmonic coefficient space, so rotating
them is an exact matrix action; grids appear only inside the pointwise
nonlinearity and the rotation-group readout, which is where discretization
error belongs. Equivariance is certified with analytically rotated
band-limited planar inputs, keeping resampling error out of the measurement.

Forward passes are pure functions of immutable kernels; harness trials are
independent and may run in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import jv

from .kernels import (
    InductionKernel,
    RadialProfileSet,
    SO2RepSpec,
    build_induction_kernel,
)
from .so2_so3 import (
    Rotation3,
    SphericalHarmonicBasis,
    sphere_quadrature,
    wigner_d,
    wigner_d_z,
)

__all__ = [
    "PlanarFeatureField",
    "AnalyticField",
    "SphericalSignal",
    "SO3Signal",
    "rotate_field",
    "rotate_signal",
    "induction_forward",
    "spherical_nonlinearity",
    "sphere_to_so3_correlation",
    "so3_equiangular_grid",
    "LayerConfig",
    "HarnessReport",
    "equivariance_harness",
    "corrupt_kernel",
    "gradient_check",
]


# ---------------------------------------------------------------------------
# planar fields

@dataclass(frozen=True)
class PlanarFeatureField:
    """Fiber-valued samples on a square grid centered on the origin."""

    values: np.ndarray  # (H, W, d)
    spacing: float
    fiber_rep: SO2RepSpec

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.ndim != 3 or v.shape[2] != self.fiber_rep.dim:
            raise ValueError("values must be (H, W, fiber_dim)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    def positions(self) -> np.ndarray:
        """Flattened sample positions, shape (H*W, 2)."""
        h, w = self.shape
        xs = (np.arange(h) - (h - 1) / 2.0) * self.spacing
        ys = (np.arange(w) - (w - 1) / 2.0) * self.spacing
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def flat_values(self) -> np.ndarray:
        return self.values.reshape(-1, self.fiber_rep.dim)


@dataclass(frozen=True)
class AnalyticField:
    """A closed-form field; rotation acts exactly, with no resampling error."""

    func: object  # callable (N, 2) -> (N, d)
    fiber_rep: SO2RepSpec

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.atleast_2d(points)), dtype=float)

    def sample(self, n: int, spacing: float) -> PlanarFeatureField:
        empty = PlanarFeatureField(np.zeros((n, n, self.fiber_rep.dim)),
                                   spacing, self.fiber_rep)
        vals = self(empty.positions()).reshape(n, n, self.fiber_rep.dim)
        return PlanarFeatureField(vals, spacing, self.fiber_rep)

    @staticmethod
    def random_band_limited(fiber: SO2RepSpec, rng: np.random.Generator,
                            m_band: int = 2, n_radial: int = 2,
                            k_max: float = 6.0) -> "AnalyticField":
        """Random finite sum of Bessel-times-trigonometric modes."""
        d = fiber.dim
        ms = np.arange(m_band + 1)
        ks = rng.uniform(1.0, k_max, size=(m_band + 1, n_radial))
        amp_c = rng.normal(size=(m_band + 1, n_radial, d))
        amp_s = rng.normal(size=(m_band + 1, n_radial, d))
        amp_s[0] = 0.0

        def evaluate(points: np.ndarray) -> np.ndarray:
            pts = np.atleast_2d(points)
            r = np.hypot(pts[:, 0], pts[:, 1])
            phi = np.arctan2(pts[:, 1], pts[:, 0])
            out = np.zeros((pts.shape[0], d))
            for m in ms:
                cm, sm = np.cos(m * phi), np.sin(m * phi)
                for j in range(n_radial):
                    bess = jv(m, ks[m, j] * r)
                    out += bess[:, None] * (cm[:, None] * amp_c[m, j]
                                            + sm[:, None] * amp_s[m, j])
            return out

        return AnalyticField(evaluate, fiber)


def _rotation2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate_field(field, theta: float):
    """Planar rotation action: move sample positions and mix fibers.

    Analytic fields rotate exactly; sampled fields are resampled with
    bilinear interpolation and therefore carry interpolation error.
    """
    if isinstance(field, AnalyticField):
        rot_back = _rotation2(-theta)
        mix = field.fiber_rep.matrix(theta)

        def rotated(points: np.ndarray) -> np.ndarray:
            return field(np.atleast_2d(points) @ rot_back.T) @ mix.T

        return AnalyticField(rotated, field.fiber_rep)

    if isinstance(field, PlanarFeatureField):
        h, w = field.shape
        pts = field.positions() @ _rotation2(-theta).T
        rows = pts[:, 0] / field.spacing + (h - 1) / 2.0
        cols = pts[:, 1] / field.spacing + (w - 1) / 2.0
        stacked = np.stack([
            map_coordinates(field.values[:, :, v], [rows, cols], order=1, mode="constant")
            for v in range(field.fiber_rep.dim)
        ], axis=1)
        mixed = stacked @ field.fiber_rep.matrix(theta).T
        return PlanarFeatureField(mixed.reshape(h, w, -1), field.spacing, field.fiber_rep)

    raise TypeError("expected PlanarFeatureField or AnalyticField")


# ---------------------------------------------------------------------------
# spherical signals

@dataclass(frozen=True)
class SphericalSignal:
    """Band-limited spherical signal as stacked real harmonic coefficients."""

    lmax: int
    coeffs: np.ndarray  # (channels, (lmax+1)^2)

    def __post_init__(self):
        c = np.ascontiguousarray(np.atleast_2d(self.coeffs), dtype=float)
        if c.shape[1] != (self.lmax + 1) ** 2 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite with (lmax+1)^2 entries per channel")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def channels(self) -> int:
        return int(self.coeffs.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def degree_norms(self) -> np.ndarray:
        return np.array([np.linalg.norm(self.coeffs[:, SphericalHarmonicBasis.slice_of(l)])
                         for l in range(self.lmax + 1)])

    def synthesize(self, points: np.ndarray) -> np.ndarray:
        """Pointwise values on unit vectors, shape (channels, N)."""
        y = SphericalHarmonicBasis(self.lmax).evaluate(np.atleast_2d(points))
        return self.coeffs @ y.T


def analyze_on_sphere(values: np.ndarray, points: np.ndarray, weights: np.ndarray,
                      lmax: int) -> SphericalSignal:
    """Project grid values onto harmonics up to ``lmax`` by quadrature."""
    y = SphericalHarmonicBasis(lmax).evaluate(points)
    coeffs = (np.atleast_2d(values) * weights) @ y
    return SphericalSignal(lmax, coeffs)


def rotate_signal(signal: SphericalSignal, rot: Rotation3) -> SphericalSignal:
    """Exact rotation in coefficient space, one Wigner block per degree."""
    out = np.empty_like(signal.coeffs)
    for ell in range(signal.lmax + 1):
        sl = SphericalHarmonicBasis.slice_of(ell)
        out[:, sl] = signal.coeffs[:, sl] @ wigner_d(ell, rot).T
    return SphericalSignal(signal.lmax, out)


def _rotate_signal_z(signal: SphericalSignal, theta: float) -> SphericalSignal:
    out = np.empty_like(signal.coeffs)
    for ell in range(signal.lmax + 1):
        sl = SphericalHarmonicBasis.slice_of(ell)
        out[:, sl] = signal.coeffs[:, sl] @ wigner_d_z(ell, theta).T
    return SphericalSignal(signal.lmax, out)


def induction_forward(field: PlanarFeatureField, kernel: InductionKernel,
                      weights: np.ndarray) -> SphericalSignal:
    """Lift a planar field to a spherical signal.

    Discretizes the lifting integral as a Riemann sum over the field's
    grid: coefficient (l, k) of channel c is the grid sum of the degree-l
    kernel stack against the fiber values, times the cell area. Linear in
    both the field and the weights.
    """
    if field.fiber_rep.freqs != kernel.fiber_in.freqs:
        raise ValueError("field fiber representation does not match the kernel")
    pts = field.positions()
    vals = field.flat_values()
    blocks = kernel.coefficient_blocks(weights, pts)
    coeffs = np.zeros((kernel.out_channels, (kernel.lmax + 1) ** 2))
    area = field.spacing ** 2
    for ell, fl in enumerate(blocks):
        sl = SphericalHarmonicBasis.slice_of(ell)
        coeffs[:, sl] = area * np.einsum("cnkv,nv->ck", fl, vals)
    return SphericalSignal(kernel.lmax, coeffs)


def spherical_nonlinearity(signal: SphericalSignal, kind: str = "relu",
                           grid_band: int | None = None) -> SphericalSignal:
    """Pointwise nonlinearity through an oversampled sphere grid.

    Synthesizes on a quadrature grid of band ``grid_band`` (default twice
    the signal band, for aliasing control), applies the nonlinearity, and
    projects back to the original band. Exactly equivariant only in the
    limit of a dense grid; the residual shrinks as ``grid_band`` grows.
    """
    if grid_band is None:
        grid_band = 2 * signal.lmax
    if grid_band < signal.lmax:
        raise ValueError("oversampling band must be at least the signal band")
    pts, wts = sphere_quadrature(grid_band)
    vals = signal.synthesize(pts)
    if kind == "relu":
        vals = np.maximum(vals, 0.0)
    elif kind == "softplus":
        vals = np.logaddexp(0.0, vals)
    else:
        raise ValueError(f"unknown nonlinearity {kind!r}")
    return analyze_on_sphere(vals, pts, wts, signal.lmax)


# ---------------------------------------------------------------------------
# rotation-group signals

@dataclass(frozen=True)
class SO3Signal:
    """Band-limited function on the rotation group, one matrix coefficient
    per degree; evaluation contracts each block against the Wigner matrix."""

    lmax: int
    blocks: tuple[np.ndarray, ...]

    def evaluate(self, rotations: list[Rotation3]) -> np.ndarray:
        out = np.zeros(len(rotations))
        for i, g in enumerate(rotations):
            acc = 0.0
            for ell, blk in enumerate(self.blocks):
                acc += float(np.sum(wigner_d(ell, g) * blk))
            out[i] = acc
        return out

    def left_rotate(self, rot: Rotation3) -> "SO3Signal":
        """Left translation: each block is premultiplied by its Wigner matrix."""
        return SO3Signal(self.lmax, tuple(wigner_d(ell, rot) @ blk
                                          for ell, blk in enumerate(self.blocks)))


def sphere_to_so3_correlation(signal: SphericalSignal,
                              filt: SphericalSignal) -> SO3Signal:
    """Correlate a spherical signal against a rotating filter.

    The value at ``g`` is the inner product of the filter rotated by ``g``
    with the signal; in coefficient space each degree contributes the outer
    product of the signal and filter coefficient vectors, summed over
    channels.
    """
    if signal.lmax != filt.lmax or signal.channels != filt.channels:
        raise ValueError("signal and filter must share band limit and channels")
    blocks = []
    for ell in range(signal.lmax + 1):
        sl = SphericalHarmonicBasis.slice_of(ell)
        s = signal.coeffs[:, sl]
        p = filt.coeffs[:, sl]
        blocks.append(np.einsum("ck,cj->kj", s, p))
    return SO3Signal(signal.lmax, tuple(blocks))


def so3_equiangular_grid(n_alpha: int = 24, n_beta: int = 12,
                         n_gamma: int = 24) -> list[Rotation3]:
    """ZYZ product grid including the identity cell; used only for readout."""
    alphas = np.arange(n_alpha) * (2.0 * np.pi / n_alpha)
    betas = np.linspace(0.0, np.pi, n_beta)
    gammas = np.arange(n_gamma) * (2.0 * np.pi / n_gamma)
    return [Rotation3(a, b, g) for a in alphas for b in betas for g in gammas]


# ---------------------------------------------------------------------------
# certification harness

@dataclass(frozen=True)
class LayerConfig:
    """Everything needed to instantiate a lifting layer for testing."""

    lmax: int = 6
    fiber_freqs: tuple[int, ...] = (0,)
    channels: int = 1
    radial_count: int = 2
    r_max: float = 0.45
    radial_width: float = 0.09
    grid_n: int = 64
    extent: float = 1.0
    field_band: int = 2
    m_max: int | None = None

    @property
    def fiber(self) -> SO2RepSpec:
        return SO2RepSpec(self.fiber_freqs)

    @property
    def spacing(self) -> float:
        return 2.0 * self.extent / (self.grid_n - 1)

    def build_kernel(self) -> InductionKernel:
        radial = RadialProfileSet(self.radial_count, self.r_max, self.radial_width)
        return build_induction_kernel(self.fiber, self.channels, self.lmax,
                                      radial, self.m_max)


@dataclass(frozen=True)
class HarnessReport:
    residuals: tuple[float, ...]
    tolerance: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def as_dict(self) -> dict:
        return {
            "max_residual": self.max_residual,
            "passed": bool(self.passed),
            "residuals": list(self.residuals),
            "tolerance": self.tolerance,
        }


def equivariance_harness(config: LayerConfig, trials: int = 20,
                         theta_samples: int = 3, seed: int = 0,
                         tolerance: float = 1e-5,
                         kernel: InductionKernel | None = None) -> HarnessReport:
    """Measure the rotation-consistency defect of the lifting layer.

    Each trial draws random weights, a random band-limited analytic field
    and random in-plane angles, then compares lifting the rotated field
    against rotating the lifted signal. Fields rotate in closed form, so
    the measured residual isolates kernel and quadrature error.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rng = np.random.default_rng(seed)
    kernel = kernel or config.build_kernel()
    residuals = []
    for _ in range(trials):
        w = rng.normal(size=(kernel.out_channels, kernel.weight_count))
        fld = AnalyticField.random_band_limited(config.fiber, rng,
                                                m_band=config.field_band)
        base = induction_forward(fld.sample(config.grid_n, config.spacing), kernel, w)
        scale = max(base.norm(), 1e-30)
        worst = 0.0
        for theta in rng.uniform(0.0, 2.0 * np.pi, size=theta_samples):
            lifted = induction_forward(
                rotate_field(fld, theta).sample(config.grid_n, config.spacing), kernel, w)
            rotated = _rotate_signal_z(base, theta)
            worst = max(worst, float(np.linalg.norm(lifted.coeffs - rotated.coeffs)) / scale)
        residuals.append(worst)
    return HarnessReport(tuple(residuals), tolerance)


def corrupt_kernel(kernel: InductionKernel, rng: np.random.Generator) -> InductionKernel:
    """Negative control: replace every angular solution by random coefficients.

    The result has the same shape and radial profile structure but violates
    the steerability constraint, so the harness must fail on it.
    """
    from dataclasses import replace

    from .kernels import _AngularSolution

    bases = []
    for basis in kernel.bases:
        broken = tuple(
            _AngularSolution(sol.m,
                             rng.normal(size=sol.cos_coeff.shape),
                             None if sol.sin_coeff is None
                             else rng.normal(size=sol.sin_coeff.shape))
            for sol in basis.angular)
        bases.append(replace(basis, angular=broken))
    return replace(kernel, bases=tuple(bases))


# ---------------------------------------------------------------------------
# gradient check

def _loss_and_grad(kernel: InductionKernel, field: PlanarFeatureField,
                   weights: np.ndarray, nonlinearity: str | None) -> tuple[float, np.ndarray]:
    """Half squared norm of the (optionally softplus-mapped) output, with
    the analytic weight gradient."""
    pts = field.positions()
    vals = field.flat_values()
    area = field.spacing ** 2
    # basis responses: one output-coefficient row per weight slot
    rows = []
    for ell, (basis, t) in enumerate(zip(kernel.bases, kernel.transforms)):
        bvals = basis.evaluate_all(pts)[:, :, 0, :]          # (count, N, d_can)
        tensor = bvals @ t.T                                  # (count, N, (2l+1)*d)
        tensor = tensor.reshape(basis.count, pts.shape[0], 2 * ell + 1, -1)
        rows.append(area * np.einsum("bnkv,nv->bk", tensor, vals))
    ncoef = (kernel.lmax + 1) ** 2
    response = np.zeros((kernel.weight_count, ncoef))
    pos = 0
    for ell, r in enumerate(rows):
        sl = SphericalHarmonicBasis.slice_of(ell)
        response[pos:pos + r.shape[0], sl] = r
        pos += r.shape[0]

    w = np.asarray(weights, dtype=float)
    coeffs = w @ response  # (channels, ncoef)
    if nonlinearity is None:
        loss = 0.5 * float(np.sum(coeffs ** 2))
        grad = coeffs @ response.T
        return loss, grad

    if nonlinearity != "softplus":
        raise ValueError("gradient path supports the linear and softplus cases")
    qpts, qwts = sphere_quadrature(2 * kernel.lmax)
    y = SphericalHarmonicBasis(kernel.lmax).evaluate(qpts)   # (N, ncoef)
    grid_vals = coeffs @ y.T
    mapped = np.logaddexp(0.0, grid_vals)
    out = (mapped * qwts) @ y
    loss = 0.5 * float(np.sum(out ** 2))
    d_mapped = (out @ y.T) * qwts
    d_grid = d_mapped / (1.0 + np.exp(-grid_vals))
    d_coeffs = d_grid @ y
    grad = d_coeffs @ response.T
    return loss, grad


def gradient_check(config: LayerConfig, nonlinearity: str | None = "softplus",
                   seed: int = 0, step: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients."""
    rng = np.random.default_rng(seed)
    kernel = config.build_kernel()
    fld = AnalyticField.random_band_limited(config.fiber, rng, m_band=config.field_band)
    sampled = fld.sample(config.grid_n, config.spacing)
    w = rng.normal(size=(kernel.out_channels, kernel.weight_count))
    _, grad = _loss_and_grad(kernel, sampled, w, nonlinearity)
    scale = max(float(np.abs(grad).max()), 1e-30)
    worst = 0.0
    flat = w.ravel()
    for idx in rng.choice(flat.size, size=min(24, flat.size), replace=False):
        bump = np.zeros_like(flat)
        bump[idx] = step
        lp, _ = _loss_and_grad(kernel, sampled, (flat + bump).reshape(w.shape), nonlinearity)
        lm, _ = _loss_and_grad(kernel, sampled, (flat - bump).reshape(w.shape), nonlinearity)
        fd = (lp - lm) / (2.0 * step)
        worst = max(worst, abs(fd - grad.ravel()[idx]) / scale)
    return worst
