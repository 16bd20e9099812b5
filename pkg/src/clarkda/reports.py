"""Machine-readable reports for the batch pipelines.

A ``Report`` is a list of named checks, each carrying the measured value,
the tolerance it was judged against, a pass/fail flag, and an anchor
string that resolves to an entry in ``docs/anchors.md``.  Serialization is
deterministic: identical configs produce byte-identical JSON and CSV
artifacts (keys sorted, floats in shortest round-trip form, no
timestamps).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .polynomials import MatPoly

__all__ = [
    "ANCHORS",
    "Check",
    "Report",
    "complex_to_json",
    "multiplier_from_json",
    "multiplier_to_json",
    "write_csv",
]

#: index of anchor strings; docs/anchors.md mirrors this table
ANCHORS = {
    "schur-class-sample": "sampled positivity of the contractive-multiplier kernel Gram",
    "pure-contractivity": "strict contractivity of the multiplier at every sample point",
    "factorization-identity": "(I-b(z)) Kb(z,w) (I-b(w)*) = kb(z,w)",
    "difference-quotient-identity": "Kb(z,w)-Kb(z,0)-Kb(0,w)+Kb(0,0) = (z.w*) Kb(z,w)",
    "resolvent-reconstruction": "K_z h = (I - V z*)^{-1} K_0 h on the truncated model",
    "coisometry-dichotomy": "quasi-extremity iff the partial d-isometry is coisometric",
    "containment-test": "quasi-extremity iff no nonzero h with b h in the model space",
    "kernel-constant-test": "quasi-extremity iff no constant in ker of row multiplication",
    "row-minimality": "inner-sequence minimality: sampled values span the coordinate space",
    "gleason-identity": "z . B(z) = b(z) - b(0) coefficient-wise",
    "gleason-contractivity": "sum B_j* B_j <= I - b(0)* b(0)",
    "gleason-extremality": "equality in the contractivity bound for the minimal solution",
    "gleason-roundtrip": "recovery of B components from the model-space operators",
    "inner-defect": "partial-isometry defect of the multiplication operator",
    "unitary-perturbation": "unitarity of the rank-one perturbed restricted backward shift",
    "spectral-atoms": "eigenvalues/masses match the atomic measure (conjugate orientation)",
    "integral-representation": "positive-real-part function equals its atomic integral",
    "identity-sum": "z1 B1 + z2 B2 reproduces the inner multiplier exactly",
    "column-isometry": "B1* B1 + B2* B2 = I for the golden inner sequence",
    "compressed-shift": "minimal model-space solution agrees with the compressed shift",
    "outside-model-witness": "a backward-shifted column has a large component in ran M_theta",
}


def _jsonable(x):
    """Recursively convert values to JSON-encodable structures; complex
    numbers become {re, im} pairs."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    return x


def complex_to_json(x):
    return _jsonable(x)


@dataclass
class Check:
    """One named pass/fail check inside a report."""

    name: str
    anchor: str
    value: float | None
    tol: float | None
    passed: bool
    witness: object = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"unknown anchor string: {self.anchor}")

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "anchor": self.anchor,
            "value": _jsonable(self.value),
            "tol": _jsonable(self.tol),
            "pass": bool(self.passed),
        }
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


@dataclass
class Report:
    """Deterministic JSON-serializable run report."""

    command: str
    config: dict
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, *args, **kwargs) -> Check:
        chk = Check(*args, **kwargs)
        self.checks.append(chk)
        return chk

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": _jsonable(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "extras": _jsonable(self.extras),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())


def write_csv(path, header: list[str], rows: list[list]) -> None:
    """CSV with a mandatory header; numbers in shortest round-trip form."""

    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        return str(v)

    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("row width does not match header")
        lines.append(",".join(fmt(v) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# multiplier (de)serialization
# ---------------------------------------------------------------------------

def _complex_from_json(obj) -> complex:
    if not isinstance(obj, dict) or set(obj) != {"re", "im"}:
        raise ValueError(f"complex entries must be {{re, im}} objects, got {obj!r}")
    return complex(float(obj["re"]), float(obj["im"]))


def multiplier_from_json(obj: dict) -> MatPoly:
    """Parse {d, rows, cols, terms: [{alpha: [ints], matrix: [[{re,im}]]}]}."""
    try:
        d = int(obj["d"])
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        raw_terms = obj["terms"]
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"multiplier object missing/invalid field: {e}") from e
    if d < 1 or rows < 1 or cols < 1:
        raise ValueError("d, rows, cols must be positive")
    terms: dict = {}
    for t in raw_terms:
        alpha = tuple(int(a) for a in t["alpha"])
        if len(alpha) != d or any(a < 0 for a in alpha):
            raise ValueError(f"bad multi-index {alpha} for d={d}")
        mat = t["matrix"]
        if len(mat) != rows or any(len(r) != cols for r in mat):
            raise ValueError(f"matrix for {alpha} is not {rows}x{cols}")
        arr = np.array([[_complex_from_json(v) for v in r] for r in mat])
        if alpha in terms:
            raise ValueError(f"duplicate multi-index {alpha}")
        terms[alpha] = arr
    return MatPoly(d, rows, cols, terms)


def multiplier_to_json(p: MatPoly) -> dict:
    terms = []
    for alpha in sorted(p.terms, key=lambda a: (sum(a), a)):
        c = p.terms[alpha]
        terms.append({
            "alpha": list(alpha),
            "matrix": [[{"re": float(v.real), "im": float(v.imag)} for v in row]
                       for row in c],
        })
    return {"d": p.d, "rows": p.rows, "cols": p.cols, "terms": terms}
