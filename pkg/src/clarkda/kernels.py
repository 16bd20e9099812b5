"""Pointwise kernel evaluation and Gram-matrix assembly.

Three kernels on the open unit ball of C^d are provided for a square
matrix Schur-class multiplier candidate ``b``:

* the Szego kernel ``k(z,w) = 1/(1 - z.w*)``,
* the contractive-multiplier kernel ``kb(z,w) = (I - b(z)b(w)*) k(z,w)``,
* the Herglotz kernel ``Kb(z,w) = (1/2)(H(z) + H(w)*) k(z,w)`` where
  ``H = (I-b)^{-1}(I+b)``.

Positivity of finite Grams of ``kb`` characterizes Schur-class membership;
at a finite sample it is reported as evidence, never as proof.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .polynomials import MatPoly, poly_eval

__all__ = [
    "SamplePlan",
    "GramMatrix",
    "szego_kernel",
    "dbr_kernel",
    "herglotz_fn",
    "herglotz_kernel",
    "gram",
    "schur_class_check",
]

PSD_TOL = 1e-10
CROSS_TOL = 1e-10
DEFAULT_RADIUS = 0.6


@dataclass(frozen=True)
class SamplePlan:
    """Reproducible sample of points in the ball of the given radius.

    Points are drawn as a Gaussian direction normalized to the sphere,
    scaled by radius * u**(1/(2d)) with u uniform; this is uniform in the
    ball.  Regeneration from (seed, count, radius, d) is bit-identical.
    """

    d: int
    count: int
    radius: float = DEFAULT_RADIUS
    seed: int = 0
    include_zero: bool = False
    points: tuple = field(init=False)

    def __post_init__(self):
        if not (0 < self.radius < 1):
            raise ValueError(f"radius must lie in (0,1): {self.radius}")
        rng = np.random.default_rng(self.seed)
        pts = []
        if self.include_zero:
            pts.append(np.zeros(self.d, dtype=complex))
        for _ in range(self.count):
            g = rng.normal(size=self.d) + 1j * rng.normal(size=self.d)
            direction = g / np.linalg.norm(g)
            u = rng.uniform()
            pts.append(self.radius * u ** (1.0 / (2 * self.d)) * direction)
        object.__setattr__(self, "points", tuple(p for p in pts))

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def szego_kernel(z, w) -> complex:
    """1/(1 - z.w*) on the ball; z.w* is the Hermitian pairing."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    return 1.0 / (1.0 - np.sum(z * np.conj(w)))


def dbr_kernel(b: MatPoly, z, w) -> np.ndarray:
    """(I - b(z)b(w)*) / (1 - z.w*) for square b."""
    if not b.is_square():
        raise ValueError("dbr_kernel requires a square multiplier")
    bz = poly_eval(b, z)
    bw = poly_eval(b, w)
    return (np.eye(b.rows) - bz @ bw.conj().T) * szego_kernel(z, w)


def herglotz_fn(b: MatPoly, z) -> np.ndarray:
    """(I - b(z))^{-1} (I + b(z)); requires ||b(z)|| < 1."""
    bz = poly_eval(b, z)
    n = b.rows
    if np.linalg.norm(bz, 2) >= 1.0 - 1e-12:
        raise ValueError(f"not purely contractive at z: ||b(z)|| = {np.linalg.norm(bz, 2)}")
    return np.linalg.solve(np.eye(n) - bz, np.eye(n) + bz)


def herglotz_kernel(b: MatPoly, z, w, cross_tol: float = CROSS_TOL) -> np.ndarray:
    """Herglotz-space kernel, evaluated two ways and cross-checked.

    Computes both (1/2)(H(z)+H(w)*)/(1-z.w*) and
    (I-b(z))^{-1} kb(z,w) (I-b(w)*)^{-1}, asserts agreement within
    ``cross_tol`` (relative), and returns the factored form.
    """
    n = b.rows
    sz = szego_kernel(z, w)
    form1 = 0.5 * (herglotz_fn(b, z) + herglotz_fn(b, w).conj().T) * sz
    bz = poly_eval(b, z)
    bw = poly_eval(b, w)
    kb = dbr_kernel(b, z, w)
    left = np.linalg.solve(np.eye(n) - bz, kb)
    # right-multiply by the inverse of (I - b(w))^* via a solve
    form2 = np.linalg.solve(np.eye(n) - bw, left.conj().T).conj().T
    scale = max(np.linalg.norm(form2), 1.0)
    if np.linalg.norm(form1 - form2) > cross_tol * scale:
        raise ValueError(
            "Herglotz kernel cross-check failed: "
            f"|form1-form2| = {np.linalg.norm(form1 - form2):.3e}"
        )
    return form2


@dataclass
class GramMatrix:
    """Hermitian Gram of kernel sections, with generating labels."""

    entries: np.ndarray
    labels: list

    @property
    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def is_psd(self, tol: float = PSD_TOL) -> bool:
        scale = max(float(np.linalg.eigvalsh(self.entries)[-1]), 1.0)
        return self.min_eig >= -tol * scale


_KERNELS = {
    "szego": lambda b, z, w: np.array([[szego_kernel(z, w)]]),
    "dbr": dbr_kernel,
    "herglotz": herglotz_kernel,
}


def gram(kind: str, b: MatPoly | None, plan, vectors=None) -> GramMatrix:
    """Gram matrix with (i,j) entry <h_i, K(z_i, z_j) h_j>.

    ``vectors`` gives one coordinate vector per point; by default every
    coordinate direction is used at every point.  With the convention that
    the inner product is conjugate linear in the first slot and
    <K_w h, K_z g> = g* K(z,w) h, the assembled matrix is Hermitian; it is
    symmetrized to kill roundoff.
    """
    if kind not in _KERNELS:
        raise ValueError(f"unknown kernel kind: {kind}")
    points = list(plan)
    if kind == "szego":
        n = 1
    else:
        if b is None:
            raise ValueError("matrix kernels need a multiplier")
        n = b.rows
    if vectors is None:
        pairs = [(z, e) for z in points for e in np.eye(n, dtype=complex)]
    else:
        pairs = list(zip(points, [np.asarray(v, dtype=complex) for v in vectors]))
    kern = _KERNELS[kind]
    m = len(pairs)
    G = np.zeros((m, m), dtype=complex)
    for i, (zi, hi) in enumerate(pairs):
        for j, (zj, hj) in enumerate(pairs):
            if j < i:
                continue
            G[i, j] = hi.conj() @ kern(b, zi, zj) @ hj
            G[j, i] = np.conj(G[i, j])
    G = 0.5 * (G + G.conj().T)
    return GramMatrix(G, pairs)


def schur_class_check(b: MatPoly, plan, psd_tol: float = PSD_TOL) -> dict:
    """Finite-sample Schur-class evidence for square b.

    Checks positivity of the contractive-multiplier kernel Gram over the
    plan and strict contractivity of b at each sample point and at 0.
    """
    if not b.is_square():
        raise ValueError("schur_class_check requires square b")
    G = gram("dbr", b, plan)
    scale = max(float(np.linalg.eigvalsh(G.entries)[-1]), 1.0)
    psd = G.min_eig >= -psd_tol * scale
    pts = list(plan) + [np.zeros(b.d)]
    norms = [float(np.linalg.norm(poly_eval(b, z), 2)) for z in pts]
    pure = all(v < 1.0 for v in norms)
    return {
        "psd": bool(psd),
        "min_eig": G.min_eig,
        "pure": bool(pure),
        "max_point_norm": max(norms),
        "certificate": "sampled",
    }
