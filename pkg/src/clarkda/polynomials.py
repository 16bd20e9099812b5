"""Matrix-valued polynomials in several complex variables.

Coefficients are stored sparsely, keyed by multi-index.  The inner product
used throughout is the Drury-Arveson one, in which the monomial ``z^a`` has
squared norm ``a! / |a|!``.  Weights are computed in exact rational
arithmetic and converted to floats only where a caller asks for them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial

import numpy as np

__all__ = [
    "MultiIndex",
    "MatPoly",
    "monomial_norm_sq",
    "multi_indices",
    "poly_eval",
    "da_inner",
    "check_ball_point",
]

#: A multi-index is a tuple of nonnegative integers, one entry per variable.
MultiIndex = tuple[int, ...]


def _validate_index(alpha: MultiIndex) -> None:
    if any(a < 0 or int(a) != a for a in alpha):
        raise ValueError(f"multi-index entries must be nonnegative integers: {alpha}")


def monomial_norm_sq(alpha: MultiIndex) -> Fraction:
    """Squared Drury-Arveson norm of the monomial ``z^alpha``, exactly.

    Equals ``alpha! / |alpha|!`` where ``alpha!`` is the product of the
    entry factorials.  Computed as an incremental product of ratios so the
    intermediate integers stay small.
    """
    _validate_index(alpha)
    total = 0
    out = Fraction(1)
    for a in alpha:
        # multiply in a! / ((total+1) ... (total+a))
        for k in range(1, a + 1):
            total += 1
            out *= Fraction(k, total)
    return out


def multi_indices(d: int, max_degree: int) -> list[MultiIndex]:
    """All multi-indices in ``d`` variables with ``|alpha| <= max_degree``,
    in graded lexicographic order (deterministic)."""
    out: list[MultiIndex] = []
    for deg in range(max_degree + 1):
        for alpha in product(range(deg + 1), repeat=d):
            if sum(alpha) == deg:
                out.append(alpha)
    return out


def check_ball_point(z) -> np.ndarray:
    """Validate and return ``z`` as a complex vector with ``|z| < 1``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.linalg.norm(z) >= 1.0:
        raise ValueError(f"point lies outside the open unit ball: |z| = {np.linalg.norm(z)}")
    return z


class MatPoly:
    """A matrix-valued polynomial in ``d`` complex variables.

    ``terms`` maps multi-indices to ``rows x cols`` complex arrays.  Zero
    coefficients may simply be absent.  Instances are treated as immutable;
    arithmetic returns new objects.
    """

    def __init__(self, d: int, rows: int, cols: int, terms: dict[MultiIndex, np.ndarray] | None = None):
        self.d = int(d)
        self.rows = int(rows)
        self.cols = int(cols)
        self.terms: dict[MultiIndex, np.ndarray] = {}
        for alpha, coeff in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            _validate_index(alpha)
            if len(alpha) != self.d:
                raise ValueError(f"multi-index {alpha} has wrong length for d={self.d}")
            coeff = np.asarray(coeff, dtype=complex)
            if coeff.shape != (self.rows, self.cols):
                raise ValueError(f"coefficient for {alpha} has shape {coeff.shape}, expected {(self.rows, self.cols)}")
            if np.any(coeff != 0):
                self.terms[alpha] = coeff.copy()

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, d: int, rows: int, cols: int) -> "MatPoly":
        return cls(d, rows, cols)

    @classmethod
    def constant(cls, d: int, matrix) -> "MatPoly":
        matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
        return cls(d, matrix.shape[0], matrix.shape[1], {(0,) * d: matrix})

    @classmethod
    def identity(cls, d: int, n: int) -> "MatPoly":
        return cls.constant(d, np.eye(n))

    @classmethod
    def scalar(cls, d: int, terms: dict[MultiIndex, complex]) -> "MatPoly":
        return cls(d, 1, 1, {alpha: np.array([[c]]) for alpha, c in terms.items()})

    @classmethod
    def variable(cls, d: int, j: int) -> "MatPoly":
        """The scalar coordinate polynomial ``z_j`` (0-based ``j``)."""
        e_j = tuple(1 if k == j else 0 for k in range(d))
        return cls.scalar(d, {e_j: 1.0})

    # -- basic queries ------------------------------------------------

    @property
    def degree(self) -> int:
        return max((sum(alpha) for alpha in self.terms), default=0)

    @property
    def min_degree(self) -> int:
        """Smallest total degree carrying a nonzero coefficient (0 if none)."""
        return min((sum(alpha) for alpha in self.terms), default=0)

    def coeff(self, alpha: MultiIndex) -> np.ndarray:
        return self.terms.get(tuple(alpha), np.zeros((self.rows, self.cols), dtype=complex))

    def at_zero(self) -> np.ndarray:
        return self.coeff((0,) * self.d)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatPoly):
            return NotImplemented
        if (self.d, self.rows, self.cols) != (other.d, other.rows, other.cols):
            return False
        keys = set(self.terms) | set(other.terms)
        return all(np.array_equal(self.coeff(k), other.coeff(k)) for k in keys)

    def max_coeff_diff(self, other: "MatPoly") -> float:
        """Largest absolute entry difference across all coefficients."""
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return max(float(np.max(np.abs(self.coeff(k) - other.coeff(k)))) for k in keys)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "MatPoly") -> "MatPoly":
        self._check_compatible(other, same_shape=True)
        terms = {alpha: c.copy() for alpha, c in self.terms.items()}
        for alpha, c in other.terms.items():
            terms[alpha] = terms.get(alpha, 0) + c
        return MatPoly(self.d, self.rows, self.cols, terms)

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (other * (-1.0))

    def __mul__(self, scalar: complex) -> "MatPoly":
        return MatPoly(self.d, self.rows, self.cols, {a: c * scalar for a, c in self.terms.items()})

    __rmul__ = __mul__

    def matmul(self, other: "MatPoly") -> "MatPoly":
        """Matrix product of polynomials (convolution of coefficients)."""
        self._check_compatible(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        terms: dict[MultiIndex, np.ndarray] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                ab = tuple(x + y for x, y in zip(a, b))
                cur = terms.get(ab)
                terms[ab] = ca @ cb if cur is None else cur + ca @ cb
        return MatPoly(self.d, self.rows, other.cols, terms)

    def conj_transpose_coeffs(self) -> "MatPoly":
        """Entry-wise conjugate transpose of every coefficient (``b_alpha^*``),
        keeping the multi-index.  This is *not* function conjugation."""
        return MatPoly(self.d, self.cols, self.rows, {a: c.conj().T for a, c in self.terms.items()})

    def submatrix(self, rows: slice | list[int], cols: slice | list[int]) -> "MatPoly":
        probe = np.zeros((self.rows, self.cols))[rows, cols]
        return MatPoly(self.d, probe.shape[0], probe.shape[1], {a: c[rows, cols] for a, c in self.terms.items()})

    def _check_compatible(self, other: "MatPoly", same_shape: bool = False) -> None:
        if self.d != other.d:
            raise ValueError(f"variable-count mismatch: {self.d} vs {other.d}")
        if same_shape and (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    # -- evaluation and inner product --------------------------------

    def __call__(self, z) -> np.ndarray:
        return poly_eval(self, z)

    def __repr__(self) -> str:
        return f"MatPoly(d={self.d}, shape=({self.rows},{self.cols}), nterms={len(self.terms)}, deg={self.degree})"


def poly_eval(p: MatPoly, z) -> np.ndarray:
    """Evaluate ``p`` at a point of C^d (no ball check; callers that need
    the strict-ball precondition validate separately)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (p.d,):
        raise ValueError(f"point has dimension {z.shape}, polynomial has d={p.d}")
    out = np.zeros((p.rows, p.cols), dtype=complex)
    for alpha, coeff in p.terms.items():
        out += coeff * np.prod(z**np.array(alpha))
    return out


def da_inner(p: MatPoly, q: MatPoly) -> complex:
    """Drury-Arveson inner product of two vector polynomials (n x 1),
    conjugate linear in the first slot."""
    if p.cols != 1 or q.cols != 1:
        raise ValueError("da_inner expects column polynomials")
    if p.rows != q.rows or p.d != q.d:
        raise ValueError("dimension mismatch in da_inner")
    total = 0.0 + 0.0j
    for alpha in set(p.terms) & set(q.terms):
        w = float(monomial_norm_sq(alpha))
        total += w * complex(np.vdot(p.terms[alpha], q.terms[alpha]))
    return total
