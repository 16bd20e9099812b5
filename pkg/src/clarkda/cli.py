"""Batch command-line entry point.

Subcommands ingest a multiplier (inline JSON config or file), run one of
the verification pipelines, and emit a deterministic JSON report (plus a
CSV spectrum for the spectral sweep).  Exit codes: 0 all checks pass,
1 a check failed, 2 input/parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .disk import (
    ORIENTATION,
    FiniteBlaschke,
    KbDiskModel,
    ac_measure,
    clark_operator,
    herglotz_verify,
    krylov_rank,
    spectral_realization,
)
from .gleason import (
    FIT_TOL,
    PSD_TOL,
    build_kb_model,
    minimal_solution_b,
    recover_B_from_X,
    solution_to_X,
)
from .herglotz import QE_DEFECT_TOL, QE_WITNESS_TOL, build_Vb, qe_test
from .kernels import (
    CROSS_TOL,
    DEFAULT_RADIUS,
    SamplePlan,
    dbr_kernel,
    herglotz_kernel,
    schur_class_check,
)
from .polynomials import MatPoly, monomial_norm_sq, poly_eval
from .reports import Report, multiplier_from_json, multiplier_to_json, write_csv
from .truncation import (
    embed_inner_sequence,
    inner_check,
    kb_projector,
    minimality_check,
    shift_matrices,
)
from . import examples as ex

EXIT_PASS = 0
EXIT_CHECK = 1
EXIT_INPUT = 2


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _load_config(args) -> dict:
    cfg: dict = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ValueError("config file must contain a JSON object")
    for name in ("seed", "radius", "points", "degree", "out"):
        v = getattr(args, name, None)
        if v is not None:
            cfg[name] = v
    tols = dict(cfg.get("tol", {}))
    for item in getattr(args, "tol_override", None) or []:
        if "=" not in item:
            raise ValueError(f"tolerance override must be NAME=VALUE: {item!r}")
        name, _, val = item.partition("=")
        tols[name.strip()] = float(val)
    for name, val in tols.items():
        if val <= 0:
            raise ValueError(f"tolerance {name} must be positive: {val}")
    cfg["tol"] = tols
    cfg.setdefault("seed", 0)
    cfg.setdefault("radius", DEFAULT_RADIUS)
    return cfg


def _tol(cfg: dict, name: str, default: float) -> float:
    return float(cfg["tol"].get(name, default))


def _get_multiplier(cfg: dict) -> MatPoly:
    src = cfg.get("multiplier")
    if src is None:
        raise ValueError("config must provide a multiplier (inline object or path)")
    if isinstance(src, str):
        with open(src) as fh:
            src = json.load(fh)
    return multiplier_from_json(src)


def _echo_config(cfg: dict) -> dict:
    keep = {k: v for k, v in cfg.items() if k != "out"}
    if isinstance(keep.get("multiplier"), dict):
        keep["multiplier"] = keep["multiplier"]
    return keep


# ---------------------------------------------------------------------------
# pipelines
# ---------------------------------------------------------------------------

def run_kernel_check(cfg: dict) -> Report:
    b = _get_multiplier(cfg)
    if b.rows == 1 and b.cols > 1:
        b = embed_inner_sequence(b)
    count = int(cfg.get("points", 10))
    plan = SamplePlan(d=b.d, count=count, radius=float(cfg["radius"]), seed=int(cfg["seed"]))
    rpt = Report("kernel-check", _echo_config(cfg))
    psd_tol = _tol(cfg, "psd_tol", 1e-10)
    sc = schur_class_check(b, plan, psd_tol=psd_tol)
    rpt.add("schur_psd", "schur-class-sample", sc["min_eig"], psd_tol, sc["psd"],
            details={"certificate": sc["certificate"]})
    rpt.add("pure_contractive", "pure-contractivity", sc["max_point_norm"], 1.0, sc["pure"])

    id_tol = _tol(cfg, "kernel_tol", 1e-10)
    pts = list(plan)
    n = b.rows
    zero = np.zeros(b.d)
    try:
        worst_f = 0.0
        worst_dq = 0.0
        for z in pts:
            for w in pts:
                K = herglotz_kernel(b, z, w)
                lhs = ((np.eye(n) - poly_eval(b, z)) @ K
                       @ (np.eye(n) - poly_eval(b, w)).conj().T)
                worst_f = max(worst_f, float(np.max(np.abs(lhs - dbr_kernel(b, z, w)))))
                dq = (K - herglotz_kernel(b, z, zero) - herglotz_kernel(b, zero, w)
                      + herglotz_kernel(b, zero, zero)) - np.sum(z * np.conj(w)) * K
                worst_dq = max(worst_dq, float(np.max(np.abs(dq))))
        rpt.add("factorization", "factorization-identity", worst_f, id_tol, worst_f < id_tol,
                details={"pairs": len(pts) ** 2})
        rpt.add("difference_quotient", "difference-quotient-identity", worst_dq, id_tol,
                worst_dq < id_tol, details={"pairs": len(pts) ** 2})
    except ValueError as e:
        rpt.add("factorization", "factorization-identity", None, id_tol, False,
                details={"error": str(e)})
        rpt.add("difference_quotient", "difference-quotient-identity", None, id_tol, False,
                details={"error": str(e)})
    return rpt


def run_quasi_extreme(cfg: dict) -> Report:
    b = _get_multiplier(cfg)
    row = None
    if b.rows == 1 and b.cols > 1:
        row = b
        b = embed_inner_sequence(b)
    count = int(cfg.get("points", 20))
    plan = SamplePlan(d=b.d, count=count, radius=float(cfg["radius"]),
                      seed=int(cfg["seed"])) if row is not None else None
    N = int(cfg.get("degree", 12))
    res = qe_test(b, theta_row=row, plan=plan, N=N)
    rpt = Report("quasi-extreme", _echo_config(cfg))
    anchors = {
        "coisometry": "coisometry-dichotomy",
        "containment": "containment-test",
        "kernel_constant": "kernel-constant-test",
        "minimality": "row-minimality",
    }
    conclusive = res["agreement"]
    for name, sub in sorted(res["tests"].items()):
        value = sub.get("defect", sub.get("residual", sub.get("rank")))
        tol = {"coisometry": _tol(cfg, "qe_defect_tol", QE_DEFECT_TOL)}.get(
            name, _tol(cfg, "qe_witness_tol", QE_WITNESS_TOL))
        details = {"votes_quasi_extreme": bool(sub["pass_qe"])}
        wit = sub.get("witness") if not sub["pass_qe"] else None
        if "nullvector" in sub:
            wit = sub["nullvector"]
        rpt.add(name, anchors[name], value, tol, conclusive, witness=wit, details=details)
    rpt.extras["verdict"] = res["verdict"]
    rpt.extras["quasi_extreme"] = res["quasi_extreme"]
    if res.get("witness") is not None:
        rpt.extras["witness"] = res["witness"]
    return rpt


def run_gleason(cfg: dict) -> Report:
    b = _get_multiplier(cfg)
    if b.rows == 1 and b.cols > 1:
        b = embed_inner_sequence(b)
    N = int(cfg.get("degree", 10))
    rpt = Report("gleason", _echo_config(cfg))
    fit_tol = _tol(cfg, "fit_tol", FIT_TOL)
    psd_tol = _tol(cfg, "psd_tol", PSD_TOL)
    rep = build_Vb(b, N=N)
    sol = minimal_solution_b(rep, fit_tol=fit_tol)
    idres = sol.identity_residual()
    rpt.add("identity", "gleason-identity", idres, fit_tol, idres < fit_tol)
    defect_eigs = np.linalg.eigvalsh(sol.defect())
    rpt.add("contractivity", "gleason-contractivity", float(defect_eigs[0]), psd_tol,
            bool(defect_eigs[0] > -max(psd_tol * 100, 1e-8)))
    krep = build_kb_model(b, N)
    Xsol = solution_to_X(sol, krep)
    count = int(cfg.get("points", 20))
    plan = SamplePlan(d=b.d, count=count, radius=float(cfg["radius"]), seed=int(cfg["seed"]))
    rec = recover_B_from_X(Xsol, b, plan)
    rt_tol = _tol(cfg, "roundtrip_tol", 1e-8)
    rpt.add("roundtrip", "gleason-roundtrip", rec["residual"], rt_tol,
            rec["residual"] < rt_tol,
            details={"support_condition": rec["support_condition"]})
    rpt.extras["B"] = [multiplier_to_json(Bj) for Bj in sol.B]
    rpt.extras["defect_eigs"] = [float(v) for v in defect_eigs]
    rpt.extras["extremal"] = sol.is_extremal()
    rpt.extras["model_defect_min_eig"] = Xsol.defect_min_eig()
    return rpt


def _blaschke_from_config(cfg: dict):
    """Resolve the spectral-sweep target to a finite Blaschke product,
    or return an error string when the input is not inner."""
    blk = cfg.get("blaschke")
    if blk is not None:
        zeros = [complex(float(v["re"]), float(v["im"])) for v in blk.get("zeros", [])]
        c = blk.get("const", {"re": 1.0, "im": 0.0})
        const = complex(float(c["re"]), float(c["im"]))
        if any(abs(a) >= 1 for a in zeros) or abs(abs(const) - 1) > 1e-12:
            return None, "inner required: zeros in the open disk, unimodular constant"
        return FiniteBlaschke(zeros, const), None
    b = _get_multiplier(cfg)
    if b.d != 1 or b.rows != 1 or b.cols != 1:
        raise ValueError("spectral sweep requires a scalar one-variable multiplier")
    deg = b.degree
    coeffs = np.zeros(deg + 1, dtype=complex)
    for alpha, c in b.terms.items():
        coeffs[alpha[0]] = c[0, 0]
    zeta = np.exp(2j * np.pi * np.arange(64) / 64)
    vals = np.polyval(coeffs[::-1], zeta)
    if float(np.max(np.abs(np.abs(vals) - 1.0))) > 1e-10:
        return None, "inner required: multiplier is not unimodular on the circle"
    roots = np.roots(coeffs[::-1]) if deg >= 1 else np.array([])
    return FiniteBlaschke(list(roots), coeffs[deg]), None


def run_clark_spectrum(cfg: dict) -> Report:
    rpt = Report("clark-spectrum", _echo_config(cfg))
    uni_tol = _tol(cfg, "unitary_tol", 1e-12)
    atom_tol = _tol(cfg, "atom_tol", 1e-10)
    herg_tol = _tol(cfg, "herglotz_tol", 1e-12)
    b, err = _blaschke_from_config(cfg)
    if err is not None:
        rpt.add("inner", "inner-defect", None, herg_tol, False, details={"error": err})
        return rpt
    defect = b.boundary_modulus_defect()
    rpt.add("inner", "inner-defect", defect, 1e-12, defect < 1e-12)
    n_alpha = int(cfg.get("points", 16))
    model = KbDiskModel(b)
    worst_uni = worst_atom = worst_herg = 0.0
    rows = []
    orientations = set()
    for k in range(n_alpha):
        alpha = np.exp(2j * np.pi * k / n_alpha)
        Xa, _ = clark_operator(b, alpha, model=model)
        worst_uni = max(worst_uni, float(np.linalg.norm(
            Xa.conj().T @ Xa - np.eye(b.degree), 2)))
        out = spectral_realization(Xa, b, alpha, model=model, tol=atom_tol)
        worst_atom = max(worst_atom, out["match_error"])
        orientations.add(out["orientation"])
        worst_herg = max(worst_herg, herglotz_verify(b, alpha, out["measure"]))
        order = np.argsort(np.angle(out["eigs"]))
        row = [float(alpha.real), float(alpha.imag)]
        for i in order:
            row += [float(out["eigs"][i].real), float(out["eigs"][i].imag),
                    float(out["masses"][i])]
        rows.append(row)
    rpt.add("unitarity", "unitary-perturbation", worst_uni, uni_tol, worst_uni < uni_tol)
    rpt.add("spectral_match", "spectral-atoms", worst_atom, atom_tol, worst_atom < atom_tol)
    rpt.add("integral_representation", "integral-representation", worst_herg, herg_tol,
            worst_herg < herg_tol)
    header = ["alpha_re", "alpha_im"]
    for i in range(1, b.degree + 1):
        header += [f"eig{i}_re", f"eig{i}_im", f"mass{i}"]
    rpt.extras["orientation"] = ORIENTATION
    rpt.extras["orientation_notes"] = sorted(orientations)
    rpt.extras["csv_header"] = header
    rpt.extras["_csv_rows"] = rows  # stripped before serialization
    return rpt


def run_golden_example(corrupt: str | None = None) -> Report:
    """End-to-end reproduction of the golden 1x4 inner-sequence example;
    ``corrupt`` in {"theta", "b1"} runs the negative controls."""
    N = 10
    cfg = {"degree": N, "seed": 0, "corrupt": corrupt}
    rpt = Report("golden-example", cfg)
    row = ex.theta_row()
    if corrupt == "theta":
        # drop the sqrt(2) normalization of the mixed term
        row = MatPoly(2, 1, 4, {a: (c if a != (1, 1) else np.array([[0, 0, 1.0, 0]]))
                                for a, c in row.terms.items()})
    square = embed_inner_sequence(row)

    plan = SamplePlan(d=2, count=20, radius=0.6, seed=11)
    mc = minimality_check(row, plan)
    rpt.add("minimality", "row-minimality", mc["rank"], None, mc["minimal"],
            details={"cols": mc["cols"]})

    chk = inner_check(square, N)
    rpt.add("inner_defect", "inner-defect", chk["defect"], 1e-12, chk["defect"] < 1e-12)

    try:
        res = qe_test(square, theta_row=row, plan=plan, N=N)
        rpt.add("quasi_extreme", "coisometry-dichotomy",
                res["tests"]["coisometry"]["defect"], QE_DEFECT_TOL,
                bool(res["agreement"] and res["quasi_extreme"]),
                details={"verdict": res["verdict"]})
    except ValueError as e:
        rpt.add("quasi_extreme", "coisometry-dichotomy", None, QE_DEFECT_TOL, False,
                details={"error": str(e)})

    try:
        rep = build_Vb(square, N=N)
        sol = minimal_solution_b(rep)
        B = list(sol.B)
        if corrupt == "b1":
            B[0] = MatPoly(2, 4, 4, {a: (np.zeros((4, 4)) if a == (2, 0) else c)
                                     for a, c in B[0].terms.items()})
        # z1 B1 + z2 B2 = theta, coefficient-wise
        recon = _zmul(B[0], 0) + _zmul(B[1], 1)
        iddiff = recon.max_coeff_diff(square)
        rpt.add("identity_sum", "identity-sum", iddiff, 1e-13, iddiff < 1e-13)
        # B1* B1 + B2* B2 = I4 in the ambient weighted metric
        G = np.zeros((4, 4), dtype=complex)
        for Bj in B:
            for alpha, c in Bj.terms.items():
                G += float(monomial_norm_sq(alpha)) * (c.conj().T @ c)
        col_iso = float(np.linalg.norm(G - np.eye(4), 2))
        rpt.add("column_isometry", "column-isometry", col_iso, 1e-12, col_iso < 1e-12)
    except ValueError as e:
        rpt.add("identity_sum", "identity-sum", None, 1e-13, False,
                details={"error": str(e)})
        rpt.add("column_isometry", "column-isometry", None, 1e-12, False,
                details={"error": str(e)})

    try:
        agree = _compressed_shift_agreement(square, N)
        rpt.add("compressed_shift", "compressed-shift", agree, 1e-10, agree < 1e-10)
    except ValueError as e:
        rpt.add("compressed_shift", "compressed-shift", None, 1e-10, False,
                details={"error": str(e)})

    try:
        norm_in_range = _outside_model_witness(square, N)
        rpt.add("outside_model", "outside-model-witness", norm_in_range, 0.1,
                norm_in_range > 0.1)
    except ValueError as e:
        rpt.add("outside_model", "outside-model-witness", None, 0.1, False,
                details={"error": str(e)})
    return rpt


def _zmul(p: MatPoly, j: int) -> MatPoly:
    """Multiply a matrix polynomial by the coordinate z_j."""
    terms: dict = {}
    for a, c in p.terms.items():
        up = tuple(x + (1 if t == j else 0) for t, x in enumerate(a))
        terms[up] = c.copy()
    return MatPoly(p.d, p.rows, p.cols, terms)


def _compressed_shift_agreement(square: MatPoly, N: int) -> float:
    """Worst relative difference between the first minimal model-space
    operator and the compressed coordinate shift, inside the exact
    projector window."""
    rep = build_Vb(square, N=N)
    sol = minimal_solution_b(rep)
    krep = build_kb_model(square, N)
    Xsol = solution_to_X(sol, krep)
    P = kb_projector(square, N)
    shifts, _ = shift_matrices(2, 4, N)
    S1 = shifts[0]
    win = P.exact_degree
    basis_small = S1.dom
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(5):
        x = rng.normal(size=len(basis_small)) + 1j * rng.normal(size=len(basis_small))
        for k, (alpha, _) in enumerate(basis_small.elements):
            if sum(alpha) >= win - 1:
                x[k] = 0.0
        xN = np.zeros(len(P.cod), dtype=complex)
        for k, el in enumerate(basis_small.elements):
            xN[P.cod.position[el]] = x[k]
        f_model = P.apply(xN)
        f_small = np.array([f_model[P.cod.position[el]] for el in basis_small.elements])
        shifted = P.apply(S1.apply(f_small))
        lhs = krep.to_on(shifted)
        rhs = Xsol.X[0] @ krep.to_on(f_model)
        worst = max(worst, float(np.linalg.norm(lhs - rhs)
                                 / max(np.linalg.norm(lhs), 1e-12)))
    return worst


def _outside_model_witness(square: MatPoly, N: int) -> float:
    """DA norm of the component of the backward-shifted second column of
    the multiplier inside ran(M); nonzero means that function leaves the
    complement model space."""
    P = kb_projector(square, N)
    cod = P.cod
    # second column applied to e2 is z1^2 z2 e1; its first backward shift
    # is (2/3) z1 z2 e1
    f = np.zeros(len(cod), dtype=complex)
    f[cod.position[((1, 1), 0)]] = 2.0 / 3.0
    in_range = f - P.apply(f)
    return float(np.sqrt(np.sum(cod.weights * np.abs(in_range) ** 2).real))


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clarkda",
                                description="finite-model verification pipelines")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="report output path (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--radius", type=float)
    common.add_argument("--points", type=int)
    common.add_argument("--degree", type=int)
    common.add_argument("--tol-override", action="append", metavar="NAME=VALUE",
                        help="override a named tolerance (repeatable)")
    sub.add_parser("kernel-check", parents=[common])
    sub.add_parser("quasi-extreme", parents=[common])
    sub.add_parser("gleason", parents=[common])
    sp = sub.add_parser("clark-spectrum", parents=[common])
    sp.add_argument("--csv", help="spectrum CSV output path")
    sp.add_argument("--figure", help="optional eigenvalue figure (PNG); "
                                     "requires matplotlib")
    ge = sub.add_parser("golden-example", parents=[common])
    ge.add_argument("--corrupt", choices=["theta", "b1"],
                    help="run a negative-control variant")
    return p


def _emit_figure(rows, header, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    t = np.linspace(0, 2 * np.pi, 256)
    ax.plot(np.cos(t), np.sin(t), lw=0.5, color="gray")
    m = (len(header) - 2) // 3
    for row in rows:
        for i in range(m):
            ax.scatter(row[2 + 3 * i], row[3 + 3 * i], s=25 + 200 * row[4 + 3 * i],
                       alpha=0.6, color="C0")
    ax.set_aspect("equal")
    ax.set_title("perturbed-operator spectra over the parameter sweep")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else 0
    try:
        if args.command == "golden-example":
            cfg = {"out": args.out}
            rpt = run_golden_example(corrupt=args.corrupt)
        else:
            cfg = _load_config(args)
            runner = {
                "kernel-check": run_kernel_check,
                "quasi-extreme": run_quasi_extreme,
                "gleason": run_gleason,
                "clark-spectrum": run_clark_spectrum,
            }[args.command]
            rpt = runner(cfg)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    csv_rows = rpt.extras.pop("_csv_rows", None)
    if csv_rows is not None:
        csv_path = getattr(args, "csv", None) or cfg.get("csv")
        if csv_path:
            write_csv(csv_path, rpt.extras["csv_header"], csv_rows)
        fig_path = getattr(args, "figure", None)
        if fig_path:
            _emit_figure(csv_rows, rpt.extras["csv_header"], fig_path)

    out = args.out or cfg.get("out")
    if out:
        rpt.write(out)
    else:
        sys.stdout.write(rpt.to_json())
    return EXIT_PASS if rpt.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
