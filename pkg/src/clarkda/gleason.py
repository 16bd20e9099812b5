"""Contractive solutions of the Gleason problem for a Schur multiplier b
and for its contractive-multiplier model space.

A solution "for b" is a d-tuple of matrix functions B_j with
z . B(z) = b(z) - b(0) and sum_j B_j* B_j <= I - b(0)* b(0) (Grams in the
ambient weighted metric).  A solution "for the model space" is a d-tuple
of operators X_j with sum_j z_j (X_j* f)(z) = f(z) - f(0) and
sum_j X_j X_j* <= I - k_0 k_0*.

The minimal solution for b is produced from the Herglotz-space partial
d-isometry; the transfer to model-space operators uses the intertwining
X_j* k_w = conj(w_j) k_w - B_j b(w)* on kernel sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .herglotz import CoeffModel, VbRep, dbr_coeff_matrix, GRAM_CUTOFF
from .polynomials import MatPoly, poly_eval
from .truncation import TruncatedBasis

__all__ = [
    "GleasonB",
    "GleasonX",
    "build_kb_model",
    "poly_column_on",
    "minimal_solution_b",
    "extension_solution_b",
    "solution_to_X",
    "recover_B_from_X",
    "minimality_compare",
    "kernel_witness",
    "FIT_TOL",
    "PSD_TOL",
]

FIT_TOL = 1e-9
PSD_TOL = 1e-10


def build_kb_model(b: MatPoly, N: int) -> CoeffModel:
    """Coefficient model of the contractive-multiplier space of b."""
    C, basis = dbr_coeff_matrix(b, N)
    return CoeffModel(C, basis)


def _poly_coeff_columns(p: MatPoly, basis: TruncatedBasis) -> np.ndarray:
    """len(basis) x p.cols matrix of the coefficient vectors of p e_i."""
    out = np.zeros((len(basis), p.cols), dtype=complex)
    for alpha, c in p.terms.items():
        if sum(alpha) > basis.N:
            raise ValueError("polynomial exceeds basis degree")
        for i in range(p.cols):
            for r_ in range(p.rows):
                out[basis.position[(alpha, r_)], i] = c[r_, i]
    return out


def poly_column_on(p: MatPoly, model: CoeffModel) -> np.ndarray:
    """ON coordinates (rank x cols) of the functions p e_i in the model."""
    cols = _poly_coeff_columns(p, model.basis)
    return np.column_stack([model.to_on(cols[:, i]) for i in range(p.cols)])


def _da_gram(cols: np.ndarray, basis: TruncatedBasis) -> np.ndarray:
    """Weighted Gram of coefficient-vector columns."""
    return cols.conj().T @ (basis.weights[:, None] * cols)


@dataclass
class GleasonB:
    """A contractive d-tuple solving z . B(z) = b(z) - b(0)."""

    b: MatPoly
    components: list  # d coefficient matrices, len(basis) x n
    basis: TruncatedBasis
    fit_residual: float = 0.0
    polys: list | None = None  # MatPoly forms when polynomial

    @property
    def d(self) -> int:
        return self.b.d

    @property
    def B(self) -> list:
        if self.polys is None:
            raise ValueError("solution components are not polynomial")
        return self.polys

    def btb(self) -> np.ndarray:
        """sum_j B_j* B_j as an n x n Gram in the ambient weighted metric."""
        total = sum(_da_gram(c, self.basis) for c in self.components)
        return 0.5 * (total + total.conj().T)

    def defect(self) -> np.ndarray:
        b0 = self.b.at_zero()
        return np.eye(self.b.rows) - b0.conj().T @ b0 - self.btb()

    def is_extremal(self, tol: float = PSD_TOL) -> bool:
        return bool(np.linalg.norm(self.defect(), 2) < max(tol * 100, 1e-8))

    def identity_residual(self) -> float:
        """Max coefficient error of z . B(z) - b(z) + b(0), over the
        degrees the truncated model represents (<= basis.N)."""
        acc: dict = {}
        for j, comp in enumerate(self.components):
            for k, (alpha, i) in enumerate(self.basis.elements):
                row = comp[k]
                if np.all(row == 0) or sum(alpha) >= self.basis.N:
                    continue
                up = tuple(a + (1 if t == j else 0) for t, a in enumerate(alpha))
                cur = acc.setdefault(up, np.zeros((self.b.rows, self.b.rows), dtype=complex))
                cur[i, :] += row
        target = {a: c.copy() for a, c in self.b.terms.items() if sum(a) > 0}
        keys = set(acc) | set(target)
        zero = np.zeros((self.b.rows, self.b.rows))
        worst = 0.0
        for a in keys:
            worst = max(worst, float(np.max(np.abs(acc.get(a, zero) - target.get(a, zero)))))
        return worst


@dataclass
class GleasonX:
    """Model-space solution: operators X_j in ON coordinates, with the
    originating for-b components kept for transfer formulas."""

    X: list  # d rank x rank matrices
    krep: CoeffModel
    B: list | None = None  # MatPoly components of the inducing for-b solution

    def defect_form(self) -> np.ndarray:
        r = self.krep.rank
        K0 = self.krep.k0_matrix()
        total = np.eye(r, dtype=complex) - K0 @ K0.conj().T
        for Xj in self.X:
            total -= Xj @ Xj.conj().T
        return 0.5 * (total + total.conj().T)

    def defect_min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.defect_form())[0])

    def is_extremal(self, tol: float = 1e-8) -> bool:
        return bool(np.linalg.norm(self.defect_form(), 2) < tol)


def _extension_raw_components(rep: VbRep, D: np.ndarray):
    """Coefficient-space functions G_j = (D* K_0)_j for a (possibly
    extended) contraction D on the Herglotz model."""
    r = rep.rank
    W = D.conj().T @ rep.K0  # (d r) x n
    return [np.column_stack([rep.model.from_on(W[j * r:(j + 1) * r, i])
                             for i in range(rep.model.n)])
            for j in range(rep.d)]


def _solution_from_D(rep: VbRep, D: np.ndarray, fit_tol: float = FIT_TOL,
                     require_poly: bool = True) -> GleasonB:
    """B_j(z) = (I - b(z)) (D* K_0)_j (z) (I - b(0)), assembled in
    coefficient space and, when polynomial, reduced to degree deg(b) - 1."""
    b = rep.b
    n = b.rows
    basis = rep.model.basis
    eye_minus_b = MatPoly.identity(b.d, n) - b
    right = np.eye(n) - b.at_zero()
    comps = []
    polys: list | None = []
    worst_tail = 0.0
    for G in _extension_raw_components(rep, D):
        Gr = G @ right
        # multiply by (I - b(z)) in coefficient space, truncating to N
        out = np.zeros_like(Gr)
        for mu, c in eye_minus_b.terms.items():
            for k, (alpha, i) in enumerate(basis.elements):
                row = Gr[k]
                if np.all(row == 0):
                    continue
                up = tuple(a + m for a, m in zip(alpha, mu))
                if sum(up) > basis.N:
                    continue
                for r_ in range(n):
                    if c[r_, i] != 0:
                        out[basis.position[(up, r_)]] += c[r_, i] * row
        comps.append(out)
        if polys is not None:
            # split into the degree < deg(b) head and the discarded tail
            deg_cap = max(b.degree - 1, 0)
            head = out.copy()
            mask = np.array([sum(alpha) > deg_cap for alpha, _ in basis.elements])
            tail_norm = float(np.sqrt(np.sum(basis.weights[mask][:, None]
                                             * np.abs(out[mask]) ** 2)))
            total_norm = float(np.sqrt(np.sum(basis.weights[:, None] * np.abs(out) ** 2)))
            rel_tail = tail_norm / max(total_norm, 1e-300)
            worst_tail = max(worst_tail, rel_tail)
            head[mask] = 0.0
            terms: dict = {}
            for k, (alpha, i) in enumerate(basis.elements):
                for col in range(n):
                    v = head[k, col]
                    if v != 0:
                        terms.setdefault(alpha, np.zeros((n, n), dtype=complex))[i, col] = v
            polys.append(MatPoly(b.d, n, n, terms))
    if require_poly:
        if worst_tail > fit_tol:
            raise ValueError(f"solution is not polynomial of degree < deg(b): "
                             f"tail residual {worst_tail:.3e}")
        # replace coefficient matrices with their exact polynomial heads
        comps = [_poly_coeff_columns(p.submatrix(slice(None), slice(None)), basis)
                 for p in polys]
        return GleasonB(b, comps, basis, fit_residual=worst_tail, polys=polys)
    return GleasonB(b, comps, basis, fit_residual=worst_tail, polys=None)


def minimal_solution_b(rep: VbRep, fit_tol: float = FIT_TOL) -> GleasonB:
    """The minimal contractive solution, induced by the partial
    d-isometry itself."""
    return _solution_from_D(rep, rep.V, fit_tol=fit_tol, require_poly=True)


def extension_solution_b(rep: VbRep, Y: np.ndarray) -> GleasonB:
    """The contractive solution induced by the extension V + Y; its
    components are model functions, generally not polynomial."""
    return _solution_from_D(rep, rep.V + Y, require_poly=False)


def solution_to_X(Bsol: GleasonB, krep: CoeffModel) -> GleasonX:
    """Transfer a for-b solution to model-space operators via
    X_j* k_w = conj(w_j) k_w - B_j b(w)* on kernel sections."""
    b = Bsol.b
    n = b.rows
    r = krep.rank
    S = krep.sections_matrix()  # r x m
    Bons = [poly_column_on(Bj, krep) for Bj in Bsol.B]
    bcoef = {a: c for a, c in b.terms.items()}
    m = S.shape[1]
    Sp = np.linalg.pinv(S, rcond=GRAM_CUTOFF ** 0.5)
    Xs = []
    for j in range(b.d):
        RHS = np.zeros((r, m), dtype=complex)
        for col, (delta, h) in enumerate(krep.basis.elements):
            if delta[j] >= 1:
                down = tuple(g - (1 if t == j else 0) for t, g in enumerate(delta))
                RHS[:, col] += S[:, krep.section_index(down, h)]
            bd = bcoef.get(delta)
            if bd is not None:
                RHS[:, col] -= Bons[j] @ bd.conj().T[:, h]
        Xadj = RHS @ Sp
        Xs.append(Xadj.conj().T)
    return GleasonX(Xs, krep, B=Bsol.B)


def recover_B_from_X(Xsol: GleasonX, b: MatPoly, plan, rank_tol: float = 1e-9) -> dict:
    """Least-squares recovery of polynomial components from model-space
    operators via B_j(.) b(w)* h = conj(w_j) k_w h - X_j* k_w h over the
    plan.  Reports the support condition (joint injectivity of b(w))."""
    krep = Xsol.krep
    n = b.rows
    basis = krep.basis
    deg_cap = max(b.degree - 1, 0)
    rows_idx = [k for k, (alpha, _) in enumerate(basis.elements) if sum(alpha) <= deg_cap]
    small = [basis.elements[k] for k in rows_idx]
    stacked = np.vstack([poly_eval(b, w) for w in plan])
    sv = np.linalg.svd(stacked, compute_uv=False)
    support_ok = bool(sv[-1] > rank_tol * sv[0]) if len(sv) >= n else False

    comps = []
    residual = 0.0
    for j in range(b.d):
        Xadj = Xsol.X[j].conj().T
        lhs_rows = []
        rhs_rows = []
        for w in plan:
            w = np.atleast_1d(np.asarray(w, dtype=complex))
            bw_ct = poly_eval(b, w).conj().T  # b(w)*
            for h in range(n):
                kw = krep.kernel_section(w, np.eye(n)[:, h])
                target_on = np.conj(w[j]) * kw - Xadj @ kw
                target = krep.from_on(target_on)
                # unknowns: entries of B_j^{(alpha)}; equation rows over small basis
                for k_small, (alpha, i) in zip(rows_idx, small):
                    row = np.zeros(len(small) * n, dtype=complex)
                    pos = small.index((alpha, i))
                    row[pos * n:(pos + 1) * n] = (bw_ct @ np.eye(n)[:, h])
                    lhs_rows.append(row)
                    rhs_rows.append(target[k_small])
        Lm = np.array(lhs_rows)
        rv = np.array(rhs_rows)
        sol, *_ = np.linalg.lstsq(Lm, rv, rcond=None)
        residual = max(residual, float(np.linalg.norm(Lm @ sol - rv)
                                       / max(np.linalg.norm(rv), 1e-300)))
        terms: dict = {}
        for pos, (alpha, i) in enumerate(small):
            for col in range(n):
                v = sol[pos * n + col]
                if abs(v) > 0:
                    terms.setdefault(alpha, np.zeros((n, n), dtype=complex))[i, col] = v
        comps.append(MatPoly(b.d, n, n, terms))
    out = {"B": comps, "residual": residual, "support_condition": support_ok}
    if not support_ok:
        out["note"] = "support condition fails; minimum-norm solution, not unique"
    return out


def minimality_compare(B1: GleasonB, B2: GleasonB, psd_tol: float = PSD_TOL) -> dict:
    """PSD ordering of B2*B2 - B1*B1 (eigenvalues reported)."""
    G1, G2 = B1.btb(), B2.btb()
    if G1.shape != G2.shape:
        raise ValueError("solutions have different coefficient dimensions")
    diff = G2 - G1
    eigs = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    scale = max(float(np.linalg.norm(G2, 2)), 1.0)
    if np.all(np.abs(eigs) < psd_tol * scale * 100):
        verdict = "equal"
    elif eigs[0] >= -psd_tol * scale * 100:
        verdict = "B1 <= B2"
    elif eigs[-1] <= psd_tol * scale * 100:
        verdict = "B2 <= B1"
    else:
        verdict = "incomparable"
    return {"eigs": eigs, "verdict": verdict, "min_eig": float(eigs[0]),
            "max_eig": float(eigs[-1])}


def kernel_witness(rep: VbRep, Bsol: GleasonB, krep: CoeffModel, plan=None,
                   seed: int = 0) -> dict:
    """Witness for nontriviality of ker V when d >= 2.

    Finds a model function F orthogonal to the span of the for-b component
    ranges, sets H_j = (I-b)^{-1} (z_j F) (truncated), and returns the
    tuple (-H_2, H_1, 0, ...), which pairs to zero against the domain of
    V.  Returns {"found": False} when the component ranges span the space.
    """
    b = rep.b
    if b.d < 2:
        raise ValueError("kernel witness requires d >= 2")
    n = b.rows
    # span of {B_j e_h} in the model-space ON coordinates
    cols = np.column_stack([poly_column_on(Bj, krep) for Bj in Bsol.B])
    Q, s, _ = np.linalg.svd(cols, full_matrices=True)
    num = int(np.sum(s > 1e-10 * max(s[0] if len(s) else 0.0, 1e-300)))
    if num >= krep.rank:
        return {"found": False, "reason": "component ranges span the model space"}
    f_on = Q[:, num]  # a unit vector orthogonal to the span
    F = krep.from_on(f_on)

    # H_j = (I-b)^{-1} (z_j F): multiply coefficients by z_j, then apply
    # the inverse-of-(I-b) coefficient recursion
    from .herglotz import herglotz_coeffs  # reuse of (I-b)^{-1}(I+b) is not direct; build A

    basis = krep.basis
    N = basis.N
    inv0 = np.linalg.inv(np.eye(n) - b.at_zero())
    # coefficients of A = (I-b)^{-1}
    from .polynomials import multi_indices

    A: dict = {(0,) * b.d: inv0}
    for gamma in multi_indices(b.d, N):
        if sum(gamma) == 0:
            continue
        acc = np.zeros((n, n), dtype=complex)
        for mu, bmu in b.terms.items():
            diff = tuple(g - m for g, m in zip(gamma, mu))
            if sum(mu) > 0 and all(t >= 0 for t in diff):
                acc += A[diff] @ bmu
        A[gamma] = acc @ inv0

    def apply_inv(vec: np.ndarray) -> np.ndarray:
        out = np.zeros(len(basis), dtype=complex)
        for k, (alpha, i) in enumerate(basis.elements):
            v = vec[k]
            if v == 0:
                continue
            for gamma, Ag in A.items():
                up = tuple(a + g for a, g in zip(alpha, gamma))
                if sum(up) > N:
                    continue
                col = Ag[:, i] * v
                for r_ in range(n):
                    if col[r_] != 0:
                        out[basis.position[(up, r_)]] += col[r_]
        return out

    def shift_coeffs(vec: np.ndarray, j: int) -> np.ndarray:
        out = np.zeros(len(basis), dtype=complex)
        for k, (alpha, i) in enumerate(basis.elements):
            if vec[k] == 0:
                continue
            up = tuple(a + (1 if t == j else 0) for t, a in enumerate(alpha))
            if sum(up) <= N:
                out[basis.position[(up, i)]] = vec[k]
        return out

    H = [apply_inv(shift_coeffs(F, j)) for j in range(b.d)]
    Hon = [rep.model.to_on(h) for h in H]
    r = rep.rank
    witness = np.zeros(b.d * r, dtype=complex)
    witness[0:r] = -Hon[1]
    witness[r:2 * r] = Hon[0]
    nrm = np.linalg.norm(witness)
    if nrm < 1e-12:
        return {"found": False, "reason": "degenerate construction"}
    witness = witness / nrm
    out = {"found": True, "vector": witness,
           "V_residual": float(np.linalg.norm(rep.V @ witness))}
    if plan is not None:
        worst = 0.0
        for z in plan:
            z = np.atleast_1d(np.asarray(z, dtype=complex))
            for h in range(n):
                kz = rep.model.kernel_section(z, np.eye(n)[:, h])
                dom_vec = np.concatenate([np.conj(z[j]) * kz for j in range(b.d)])
                worst = max(worst, abs(np.vdot(witness, dom_vec))
                            / max(np.linalg.norm(dom_vec), 1e-300))
        out["pairing_residual"] = worst
    return out
