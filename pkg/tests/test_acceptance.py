"""Acceptance suite: one test (one pass/fail line under ``pytest -v``) per
criterion, at the stated tolerances."""

import json
import os
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from clarkda import examples as ex
from clarkda.cli import main, run_golden_example
from clarkda.disk import (
    FiniteBlaschke,
    KbDiskModel,
    ac_measure,
    clark_operator,
    herglotz_verify,
    krylov_rank,
    measure_inner,
    spectral_realization,
    weighted_cauchy,
)
from clarkda.gleason import (
    build_kb_model,
    extension_solution_b,
    kernel_witness,
    minimal_solution_b,
    minimality_compare,
)
from clarkda.herglotz import (
    build_Vb,
    extension_components,
    extension_moments,
    qe_test,
    resolvent_kernel_check,
    sample_extension,
    symmetrized_moment,
    tight_moment,
)
from clarkda.kernels import SamplePlan, dbr_kernel, herglotz_kernel
from clarkda.polynomials import MatPoly, monomial_norm_sq, multi_indices, poly_eval

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIGS = os.path.join(HERE, "..", "configs")

ALL_NAMES = ["zero", "z_d1", "half_z_d1", "theta", "hat_degenerate", "avg_coords"]
D2_NAMES = ["zero", "theta", "hat_degenerate", "avg_coords"]

_REPS: dict = {}


def rep20(name):
    if name not in _REPS:
        _REPS[name] = build_Vb(ex.EXAMPLES()[name], N=20)
    return _REPS[name]


def test_criterion_01_golden_example_suite():
    rpt = run_golden_example()
    by_name = {c.name: c for c in rpt.checks}
    assert by_name["minimality"].value == 4
    assert by_name["inner_defect"].value < 1e-12
    assert by_name["quasi_extreme"].passed  # unanimous quasi-extreme verdict
    assert by_name["identity_sum"].value < 1e-13
    assert by_name["column_isometry"].value < 1e-12
    assert by_name["compressed_shift"].value < 1e-10
    assert by_name["outside_model"].value > 0.1
    assert rpt.passed


def test_criterion_02_backward_shift_exact_rationals():
    for d in (2, 3):
        for alpha in multi_indices(d, 6):
            if sum(alpha) == 0:
                continue
            for j in range(d):
                if alpha[j] == 0:
                    continue
                down = tuple(a - (1 if t == j else 0) for t, a in enumerate(alpha))
                coeff = monomial_norm_sq(alpha) / monomial_norm_sq(down)
                assert coeff == Fraction(alpha[j], sum(alpha))


def test_criterion_03_kernel_identities_100_pairs():
    for name in ALL_NAMES:
        b = ex.EXAMPLES()[name]
        n = b.rows
        plan = SamplePlan(d=b.d, count=20, radius=0.6, seed=101)
        pts = list(plan)
        zero = np.zeros(b.d)
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(100):
            z = pts[rng.integers(len(pts))]
            w = pts[rng.integers(len(pts))]
            K = herglotz_kernel(b, z, w)
            fac = ((np.eye(n) - poly_eval(b, z)) @ K
                   @ (np.eye(n) - poly_eval(b, w)).conj().T) - dbr_kernel(b, z, w)
            dq = (K - herglotz_kernel(b, z, zero) - herglotz_kernel(b, zero, w)
                  + herglotz_kernel(b, zero, zero)) - np.sum(z * np.conj(w)) * K
            worst = max(worst, float(np.max(np.abs(fac))), float(np.max(np.abs(dq))))
        print(f"criterion 3 [{name}]: worst = {worst:.3e}")
        assert worst < 1e-10


def test_criterion_04_resolvent_reconstruction():
    for name in ALL_NAMES:
        rep = rep20(name)
        b = rep.b
        worst = 0.0
        for z in SamplePlan(d=b.d, count=10, radius=0.3, seed=1):
            for i in range(b.rows):
                worst = max(worst, resolvent_kernel_check(rep, z, np.eye(b.rows)[:, i]))
        print(f"criterion 4 [{name}]: worst = {worst:.3e}")
        assert worst < 1e-8


def test_criterion_05_tight_extension_consistency():
    for name in ALL_NAMES:
        rep = rep20(name)
        b = rep.b
        n = b.rows
        worst = 0.0
        for w in SamplePlan(d=b.d, count=10, radius=0.3, seed=7):
            lhs = np.column_stack([rep.K0.conj().T @ rep.resolvent_apply(w, np.eye(n)[:, i])
                                   for i in range(n)])
            worst = max(worst, float(np.max(np.abs(
                lhs - herglotz_kernel(b, np.zeros(b.d), w)))))
        print(f"criterion 5 [{name}]: worst = {worst:.3e}")
        assert worst < 1e-8
    repz = rep20("z_d1")
    for k in range(7):
        assert abs(tight_moment(repz, (0,) * k)[0, 0] - 1.0) < 1e-10


def test_criterion_06_extension_dichotomy():
    for name in ("hat_degenerate", "avg_coords"):
        rep = build_Vb(ex.EXAMPLES()[name], N=12)
        Y = sample_extension(rep, seed=5, norm=1.0)
        gap = 0.0
        for L in range(1, 4):
            for word in product(range(rep.d), repeat=L):
                gap = max(gap, float(np.linalg.norm(
                    extension_moments(rep, Y, word) - tight_moment(rep, word))))
        comps = extension_components(rep, Y)
        sym = max(float(np.linalg.norm(symmetrized_moment(rep, p, comps)
                                       - symmetrized_moment(rep, p)))
                  for p in multi_indices(rep.d, 4))
        print(f"criterion 6 [{name}]: free-word gap = {gap:.3f}, symmetrized = {sym:.3e}")
        assert gap > 0.01
        assert sym < 1e-8


def test_criterion_07_quasi_extremity_dichotomy():
    plan = SamplePlan(d=2, count=20, seed=9)
    cases = [
        ("z", ex.scalar_z(), None, None, True),
        ("z^2", ex.scalar_z_sq(), None, None, True),
        ("z/2", ex.scalar_half_z(), None, None, False),
        ("theta", ex.theta_square(), ex.theta_row(), plan, True),
        ("hat", ex.hat_degenerate(), ex.hat_degenerate_row(), plan, False),
    ]
    for label, b, row, pl, expect in cases:
        res = qe_test(b, theta_row=row, plan=pl)
        print(f"criterion 7 [{label}]: verdict = {res['verdict']}")
        assert res["agreement"]
        assert res["quasi_extreme"] is expect
        if not expect:
            assert res["witness"] is not None
    hat = qe_test(ex.hat_degenerate(), theta_row=ex.hat_degenerate_row(), plan=plan)
    assert np.allclose(np.abs(hat["witness"]), [0, 1, 0], atol=1e-12)
    assert hat["tests"]["kernel_constant"]["residual"] < 1e-12


def test_criterion_08_gleason_minimality():
    rep = build_Vb(ex.avg_coords(), N=10)
    sol0 = minimal_solution_b(rep)
    for seed in range(5):
        sol1 = extension_solution_b(rep, sample_extension(rep, seed=seed, norm=1.0))
        cmp = minimality_compare(sol0, sol1)
        print(f"criterion 8 [seed {seed}]: {cmp['verdict']}, gap = {cmp['max_eig']:.3f}")
        assert cmp["verdict"] == "B1 <= B2"
        assert cmp["max_eig"] > 0.0
    solz = extension_solution_b(rep, np.zeros_like(rep.V))
    assert minimality_compare(sol0, solz)["verdict"] == "equal"


def test_criterion_09_clark_d1_suite():
    cases = [FiniteBlaschke([0.0]), FiniteBlaschke([0.0, 0.0]), FiniteBlaschke([0.0, 0.5])]
    for b in cases:
        model = KbDiskModel(b)
        worst = {"uni": 0.0, "atom": 0.0, "herg": 0.0, "gram": 0.0}
        polys = [np.eye(b.degree)[:, k] for k in range(b.degree)]  # 1, z, ...
        for k in range(16):
            alpha = np.exp(2j * np.pi * k / 16)
            Xa, _ = clark_operator(b, alpha, model=model)
            worst["uni"] = max(worst["uni"], float(np.linalg.norm(
                Xa.conj().T @ Xa - np.eye(b.degree), 2)))
            assert krylov_rank(Xa, model.one_coords()) == b.degree
            out = spectral_realization(Xa, b, alpha, model=model)
            worst["atom"] = max(worst["atom"], out["match_error"])
            worst["herg"] = max(worst["herg"], herglotz_verify(b, alpha, out["measure"]))
            mu = ac_measure(b, alpha)
            imgs = [model.coords(weighted_cauchy(b, alpha, f, model=model)) for f in polys]
            for i, f in enumerate(polys):
                for j, g in enumerate(polys):
                    worst["gram"] = max(worst["gram"], abs(
                        np.vdot(imgs[i], imgs[j]) - measure_inner(mu, f, g)))
        print(f"criterion 9 [deg {b.degree}]: {worst}")
        assert worst["uni"] < 1e-12
        assert worst["atom"] < 1e-10
        assert worst["herg"] < 1e-12
        assert worst["gram"] < 1e-10


def test_criterion_10_kernel_nontriviality():
    for name in D2_NAMES:
        b = ex.EXAMPLES()[name]
        rep = build_Vb(b, N=10)
        sol = minimal_solution_b(rep)
        krep = build_kb_model(b, 10)
        out = kernel_witness(rep, sol, krep, plan=SamplePlan(d=2, count=10, radius=0.3, seed=8))
        print(f"criterion 10 [{name}]: V residual = {out.get('V_residual'):.3e}")
        assert out["found"]
        assert abs(np.linalg.norm(out["vector"]) - 1) < 1e-12
        assert out["V_residual"] < 1e-8


def test_criterion_11_report_determinism(tmp_path):
    cases = [
        ["kernel-check", "--config", os.path.join(CONFIGS, "kernel_theta.json")],
        ["quasi-extreme", "--config", os.path.join(CONFIGS, "quasi_extreme_hat.json")],
        ["gleason", "--config", os.path.join(CONFIGS, "gleason_avg.json")],
        ["clark-spectrum", "--config", os.path.join(CONFIGS, "clark_z2.json")],
        ["golden-example"],
    ]
    for i, args in enumerate(cases):
        blobs = []
        for r in range(2):
            out = tmp_path / f"{i}_{r}.json"
            extra = ["--out", str(out)]
            if args[0] == "clark-spectrum":
                extra += ["--csv", str(tmp_path / f"{i}_{r}.csv")]
            main(args + extra)
            blob = out.read_bytes()
            if args[0] == "clark-spectrum":
                blob += (tmp_path / f"{i}_{r}.csv").read_bytes()
            blobs.append(blob)
        assert blobs[0] == blobs[1], f"non-deterministic report: {args[0]}"
