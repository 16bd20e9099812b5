"""Truncated monomial models of vector-valued Drury-Arveson space.

A ``TruncatedBasis`` fixes d, a coordinate dimension n, and a degree cap N;
its elements are (multi-index, coordinate) pairs in graded-lexicographic
order, each carrying the exact weight ||z^a||^2 = a!/|a|!.  Operators
between truncations are plain matrices in monomial coordinates together
with the diagonal metrics of both sides; adjoints are always taken with
respect to those metrics.

Every operator built here records the exact degree window on which it acts
without truncation error, and checks are only asserted inside the window.
"""

from __future__ import annotations

import numpy as np

from .polynomials import MatPoly, MultiIndex, monomial_norm_sq, multi_indices, poly_eval

__all__ = [
    "TruncatedBasis",
    "OperatorRep",
    "shift_matrices",
    "multiplier_matrix",
    "inner_check",
    "kb_projector",
    "embed_inner_sequence",
    "minimality_check",
    "RANK_TOL",
    "OP_TOL",
]

RANK_TOL = 1e-9  # relative singular-value cutoff for numerical rank
OP_TOL = 1e-10  # partial-isometry defect tolerance


class TruncatedBasis:
    """Ordered monomial basis of polynomials of degree <= N with values
    in C^n, in d variables."""

    def __init__(self, d: int, n: int, N: int):
        self.d = int(d)
        self.n = int(n)
        self.N = int(N)
        self.indices = multi_indices(d, N)
        self.elements: list[tuple[MultiIndex, int]] = [
            (alpha, i) for alpha in self.indices for i in range(n)
        ]
        self.weights = np.array(
            [float(monomial_norm_sq(alpha)) for alpha, _ in self.elements]
        )
        self.position = {el: k for k, el in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def coeff_vector(self, p: MatPoly) -> np.ndarray:
        """Coefficient vector of an n x 1 polynomial of degree <= N."""
        if p.cols != 1 or p.rows != self.n or p.d != self.d:
            raise ValueError("polynomial does not match basis shape")
        if p.degree > self.N:
            raise ValueError(f"degree {p.degree} exceeds cap {self.N}")
        x = np.zeros(len(self), dtype=complex)
        for alpha, c in p.terms.items():
            for i in range(self.n):
                x[self.position[(alpha, i)]] = c[i, 0]
        return x

    def to_poly(self, x) -> MatPoly:
        x = np.asarray(x, dtype=complex)
        terms: dict[MultiIndex, np.ndarray] = {}
        for k, (alpha, i) in enumerate(self.elements):
            if x[k] != 0:
                terms.setdefault(alpha, np.zeros((self.n, 1), dtype=complex))[i, 0] = x[k]
        return MatPoly(self.d, self.n, 1, terms)

    def inner(self, x, y) -> complex:
        """Weighted inner product, conjugate linear in the first slot."""
        return complex(np.sum(np.conj(x) * self.weights * y))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))

    def eval_matrix(self, z) -> np.ndarray:
        """n x len matrix E(z) with E(z) @ coeffs = value at z."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        mono = np.array([np.prod(z ** np.array(alpha)) for alpha in self.indices])
        E = np.zeros((self.n, len(self)), dtype=complex)
        # element a_idx*n + i is (alpha_{a_idx}, i)
        for a_idx, alpha in enumerate(self.indices):
            val = mono[a_idx]
            for i in range(self.n):
                E[i, a_idx * self.n + i] = val
        return E


class OperatorRep:
    """Matrix of a linear map between two truncated bases, with the
    diagonal weighted metrics of both sides."""

    def __init__(self, matrix: np.ndarray, dom: TruncatedBasis, cod: TruncatedBasis,
                 exact_degree: int | None = None):
        self.matrix = np.asarray(matrix, dtype=complex)
        if self.matrix.shape != (len(cod), len(dom)):
            raise ValueError("operator matrix shape does not match bases")
        self.dom = dom
        self.cod = cod
        #: largest input degree on which the matrix action has no truncation error
        self.exact_degree = dom.N if exact_degree is None else exact_degree

    def adjoint(self) -> "OperatorRep":
        adj = (self.matrix.conj().T * self.cod.weights[None, :]) / self.dom.weights[:, None]
        return OperatorRep(adj, self.cod, self.dom, exact_degree=self.cod.N)

    def compose(self, other: "OperatorRep") -> "OperatorRep":
        """self after other."""
        if other.cod is not self.dom and len(other.cod) != len(self.dom):
            raise ValueError("composition shape mismatch")
        return OperatorRep(self.matrix @ other.matrix, other.dom, self.cod,
                           exact_degree=other.exact_degree)

    def apply(self, x) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=complex)

    def op_norm(self) -> float:
        """Operator norm between the weighted spaces."""
        scaled = (np.sqrt(self.cod.weights)[:, None] * self.matrix
                  / np.sqrt(self.dom.weights)[None, :])
        return float(np.linalg.norm(scaled, 2))

    def __sub__(self, other: "OperatorRep") -> "OperatorRep":
        return OperatorRep(self.matrix - other.matrix, self.dom, self.cod,
                           exact_degree=min(self.exact_degree, other.exact_degree))


def shift_matrices(d: int, n: int, N: int):
    """Coordinate multiplication operators S_j : degree<=N-1 -> degree<=N
    and their weighted-metric adjoints.

    Returns (shifts, adjoints) as lists of OperatorRep.  The adjoint acts
    on monomials as z^a -> (a_j/|a|) z^(a-e_j), exactly.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    dom = TruncatedBasis(d, n, N - 1)
    cod = TruncatedBasis(d, n, N)
    shifts = []
    for j in range(d):
        M = np.zeros((len(cod), len(dom)))
        for k, (alpha, i) in enumerate(dom.elements):
            up = tuple(a + (1 if t == j else 0) for t, a in enumerate(alpha))
            M[cod.position[(up, i)], k] = 1.0
        shifts.append(OperatorRep(M, dom, cod))
    return shifts, [s.adjoint() for s in shifts]


def multiplier_matrix(b: MatPoly, N: int) -> OperatorRep:
    """Multiplication by b from the degree <= N - deg(b) truncation of
    H2_d (x) C^cols into the degree <= N truncation of H2_d (x) C^rows.

    The domain is restricted so the image is computed without truncation.
    """
    degb = b.degree
    if N < degb:
        raise ValueError(f"truncation N={N} below multiplier degree {degb}")
    dom = TruncatedBasis(b.d, b.cols, N - degb)
    cod = TruncatedBasis(b.d, b.rows, N)
    M = np.zeros((len(cod), len(dom)), dtype=complex)
    for k, (alpha, i) in enumerate(dom.elements):
        for gamma, c in b.terms.items():
            up = tuple(a + g for a, g in zip(alpha, gamma))
            for r in range(b.rows):
                if c[r, i] != 0:
                    M[cod.position[(up, r)], k] += c[r, i]
    return OperatorRep(M, dom, cod)


def inner_check(theta: MatPoly, N: int, op_tol: float = OP_TOL) -> dict:
    """Partial-isometry defect ||M M* M - M|| of multiplication by theta,
    in the weighted metric.

    For a non-homogeneous multiplier the adjoint spreads degrees by up to
    deg - min_degree, so the defect is measured only on domain inputs of
    degree <= N - 2*deg + min_degree, where the truncated computation
    agrees with the untruncated operator.
    """
    deg = theta.degree
    mindeg = theta.min_degree
    if N < 2 * deg:
        raise ValueError(f"need N >= 2*deg(theta) = {2 * deg}")
    M = multiplier_matrix(theta, N)
    Madj = M.adjoint()
    D = M.compose(Madj).compose(M) - M
    safe = N - 2 * deg + mindeg
    cols = [k for k, (alpha, _) in enumerate(M.dom.elements) if sum(alpha) <= safe]
    scaled = (np.sqrt(M.cod.weights)[:, None] * D.matrix[:, cols]
              / np.sqrt(M.dom.weights[cols])[None, :])
    val = float(np.linalg.norm(scaled, 2))
    return {"defect": val, "inner": bool(val < op_tol), "window_degree": safe}


def kb_projector(theta: MatPoly, N: int, op_tol: float = OP_TOL) -> OperatorRep:
    """Orthogonal projector (weighted metric) onto the complement of
    ran(M_theta) inside the degree <= N truncation.

    For inner theta this is the truncation model of the complement model
    space.  It agrees with the true complement only for output degrees
    <= N - deg(theta); the ``exact_degree`` field records that window.
    """
    chk = inner_check(theta, N, op_tol=op_tol)
    if not chk["inner"]:
        raise ValueError(f"multiplier is not inner (defect {chk['defect']:.3e})")
    M = multiplier_matrix(theta, N)
    cod = M.cod
    sw = np.sqrt(cod.weights)
    Mw = sw[:, None] * M.matrix / np.sqrt(M.dom.weights)[None, :]
    Q, R = np.linalg.qr(Mw)
    # drop numerically null columns (theta may have rank-deficient columns)
    keep = np.abs(np.diag(R)) > RANK_TOL * max(np.abs(np.diag(R)).max(), 1.0)
    Q = Q[:, keep]
    P_on = np.eye(len(cod)) - Q @ Q.conj().T
    # back to monomial coordinates: x -> W^{-1/2} P_on W^{1/2} x
    P = (P_on * sw[None, :]) / sw[:, None]
    return OperatorRep(P, cod, cod, exact_degree=N - theta.degree)


def embed_inner_sequence(theta: MatPoly) -> MatPoly:
    """Embed a 1 x m row as the first row of an m x m matrix multiplier."""
    if theta.rows != 1:
        raise ValueError("expected a row polynomial")
    m = theta.cols
    terms = {}
    for alpha, c in theta.terms.items():
        full = np.zeros((m, m), dtype=complex)
        full[0, :] = c[0, :]
        terms[alpha] = full
    return MatPoly(theta.d, m, m, terms)


def minimality_check(theta: MatPoly, plan, rank_tol: float = RANK_TOL) -> dict:
    """Numerical rank of the value matrix [theta(z_i)] over the plan.

    The row sequence is minimal when the values span the full coordinate
    space; a unit null vector is returned as witness otherwise.
    """
    if theta.rows != 1:
        raise ValueError("expected a row polynomial")
    rows = np.vstack([poly_eval(theta, z) for z in plan])
    _, s, vh = np.linalg.svd(rows)
    cutoff = rank_tol * (s[0] if len(s) and s[0] > 0 else 1.0)
    rank = int(np.sum(s > cutoff))
    out = {"rank": rank, "cols": theta.cols, "minimal": bool(rank == theta.cols)}
    if rank < theta.cols:
        out["nullvector"] = vh[rank].conj()
    return out
