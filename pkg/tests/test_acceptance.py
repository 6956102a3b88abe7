"""Acceptance suite: one test per criterion, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Two clauses are expected failures (strict xfail) because the claims
they encode are false as stated: the swapped 2D map's absolute Jacobian sum
equals |uv+2|/sqrt(uv(uv+4)) > 1 at every valid point (only the
orientation-signed sum is identically 1), and transposition-product
permutations inherit the same defect blockwise.  See those tests' reasons.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from boolemaps import (
    AlphaBetaDensity,
    Baker,
    BooleMap1D,
    CauchyDensity,
    ClassicalBoole,
    CotangentConjugacy,
    DensityOn01,
    Doubling,
    Gauss,
    GaussDensity,
    LebesgueOn01,
    PermutationBooleMap,
    SpecialBoole,
    SwappedBoole2D,
    UlamPartition,
    abel_limit,
    baker_expansion,
    birkhoff_average,
    check_commutation,
    check_functional_equation,
    complex_fixed_points,
    inverse_branches_swapped,
    inverse_jacobians_swapped,
    jacobian_sum,
    measure_of,
    mgf_partial,
    modified_measure_identity,
    nd_preimages,
    preimages,
    pushforward_density_check,
    quasi_measure_from_fixed_point,
    schur_average,
    signed_jacobian_sum,
    stationary_density,
    ulam_matrix,
    verify_invariant_density,
)
from boolemaps.cli import main as cli_main
from boolemaps.mgf import preimage_step


def report(criterion: str, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} ({detail})")


def test_c01_cauchy_invariance():
    t0 = time.perf_counter()
    worst = 0.0
    for a, gamma in [(0.0, 1.0), (1.0, 2.0), (-0.5, 0.7)]:
        m = SpecialBoole(0.5, a, 2.0 * a, 0.5 * gamma**2)
        rho = CauchyDensity(2.0 * a, gamma)
        grid = np.linspace(-50.0 * gamma + 2.0 * a, 50.0 * gamma + 2.0 * a, 1000)
        rep = verify_invariant_density(m, rho, grid, 1e-8)
        worst = max(worst, rep.max_rel_residual)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-8 and elapsed < 1.0
    report("C1 cauchy invariance", ok, f"max_rel={worst:.2e}, {elapsed:.2f}s")
    assert worst <= 1e-8
    assert elapsed < 1.0


def test_c02_alpha_beta_invariance_and_quasi_measure():
    worst_inv = 0.0
    worst_match = 0.0
    for alpha, beta in [(0.3, 1.0), (0.7, 2.0), (0.5, 0.5)]:
        m = BooleMap1D(alpha, 0.0, (beta,), (0.0,))
        rho = AlphaBetaDensity(alpha, beta)
        grid = np.linspace(-50, 50, 1000)
        rep = verify_invariant_density(m, rho, grid, 1e-8)
        worst_inv = max(worst_inv, rep.max_rel_residual)
        live = [q for q in quasi_measure_from_fixed_point(m) if not q.degenerate]
        assert len(live) == 1
        for x in np.linspace(-80, 80, 161):
            worst_match = max(worst_match, abs(live[0](float(x)) - rho(float(x))))
    ok = worst_inv <= 1e-8 and worst_match <= 1e-12
    report("C2 alpha-beta invariance", ok, f"max_rel={worst_inv:.2e}, quasi-match={worst_match:.2e}")
    assert worst_inv <= 1e-8
    assert worst_match <= 1e-12


def test_c03_weight_sums():
    rng = np.random.default_rng(303)
    n2 = BooleMap1D(1.0, 0.0, (1.0, 1.0), (-1.0, 1.0))
    worst = 0.0
    for x in rng.uniform(-100, 100, 1000):
        worst = max(worst, abs(preimages(ClassicalBoole(), float(x)).weight_sum - 1.0))
        worst = max(worst, abs(preimages(n2, float(x)).weight_sum - 1.0))
    ok = worst <= 1e-10
    report("C3 weight sums", ok, f"max|sum-1|={worst:.2e}")
    assert worst <= 1e-10


def test_c04_fixed_point_trichotomy():
    rng = np.random.default_rng(404)

    def draw_params():
        n = int(rng.integers(1, 5))
        bs = np.sort(rng.uniform(-4, 4, n))
        while np.any(np.diff(bs) < 0.4):
            bs = np.sort(rng.uniform(-4, 4, n))
        betas = tuple(float(b) for b in rng.uniform(0.2, 2.0, n))
        return n, betas, tuple(float(b) for b in bs)

    worst_resid = 0.0
    for _ in range(100):
        n, betas, bs = draw_params()
        alpha = float(rng.choice([0.3, 0.6, 1.5, 2.4]))
        a = float(rng.uniform(-2, 2))
        fps = complex_fixed_points(BooleMap1D(alpha, a, betas, bs))
        assert len(fps.roots) == n + 1
        m = BooleMap1D(alpha, a, betas, bs)
        for w in fps.roots:
            worst_resid = max(worst_resid, abs(m.eval_complex(w) - w) / (1.0 + abs(w)))
    for _ in range(100):
        n, betas, bs = draw_params()
        a = float(rng.uniform(0.2, 2.0)) * float(rng.choice([-1.0, 1.0]))
        m = BooleMap1D(1.0, a, betas, bs)
        fps = complex_fixed_points(m)
        assert len(fps.roots) == n
        for w in fps.roots:
            worst_resid = max(worst_resid, abs(m.eval_complex(w) - w) / (1.0 + abs(w)))
    for _ in range(100):
        n, betas, bs = draw_params()
        m = BooleMap1D(1.0, 0.0, betas, bs)
        fps = complex_fixed_points(m)
        assert len(fps.roots) == n - 1
        assert all(w.imag == 0.0 for w in fps.roots)
        for w in fps.roots:
            worst_resid = max(worst_resid, abs(m.eval_complex(w) - w) / (1.0 + abs(w)))

    # closed-form oracle for N=1: roots of
    # (alpha-1) w^2 - w[(alpha-1) b - a] - (ab + beta) = 0
    worst_closed = 0.0
    for _ in range(100):
        alpha = float(rng.choice([0.3, 0.8, 1.7]))
        a, b = (float(t) for t in rng.uniform(-2, 2, 2))
        beta = float(rng.uniform(0.2, 3.0))
        got = sorted(complex_fixed_points(BooleMap1D(alpha, a, (beta,), (b,))).roots,
                     key=lambda z: (z.real, z.imag))
        want = sorted(np.roots([alpha - 1.0, -((alpha - 1.0) * b - a), -(a * b + beta)]).astype(complex),
                      key=lambda z: (z.real, z.imag))
        for g, w in zip(got, want):
            worst_closed = max(worst_closed, abs(g - w) / (1.0 + abs(w)))
    ok = worst_resid <= 1e-10 and worst_closed <= 1e-12
    report("C4 fixed-point trichotomy", ok, f"resid={worst_resid:.2e}, closed-form={worst_closed:.2e}")
    assert worst_resid <= 1e-10
    assert worst_closed <= 1e-12


def test_c05_conjugacy():
    t0 = time.perf_counter()
    comm = check_commutation(CotangentConjugacy(1.0, 0.0))
    push = pushforward_density_check(CotangentConjugacy(1.0, 0.0))
    elapsed = time.perf_counter() - t0
    ok = comm.max_residual < 1e-9 and push.max_residual < 1e-10 and elapsed < 0.1
    report("C5 conjugacy", ok,
           f"commutation={comm.max_residual:.2e}, pushforward={push.max_residual:.2e}, {elapsed*1000:.0f}ms")
    assert comm.max_residual < 1e-9
    assert push.max_residual < 1e-10
    assert elapsed < 0.1


def test_c06_baker_expansions():
    rng = np.random.default_rng(606)
    pts = []
    while len(pts) < 100:
        x = float(rng.uniform(0, 1))
        if (x * 2**20) % 1.0 != 0.0:
            pts.append(x)
    worst_identity = 0.0
    for x in pts:
        target = 2.0 * x - x * x
        worst_identity = max(
            worst_identity,
            abs(baker_expansion(x, 0.25, 40).linear_sum - target),
            abs(baker_expansion(x, 0.5, 40).square_sum - target),
        )
    # combined-series residual within its geometric tail bound; depth per s
    # keeps the bound above the float rounding floor
    bound_ok = True
    worst_ratio = 0.0
    for s, n in ((0.25, 16), (0.5, 36)):
        for x in pts:
            be = baker_expansion(x, s, n)
            resid = abs(be.value - (2.0 * x - x * x))
            bound_ok = bound_ok and resid <= be.tail_bound + 1e-12
            worst_ratio = max(worst_ratio, resid / be.tail_bound)
    ok = worst_identity <= 1e-9 and bound_ok
    report("C6 baker expansions", ok, f"identity={worst_identity:.2e}, worst resid/bound={worst_ratio:.2f}")
    assert worst_identity <= 1e-9
    assert bound_ok


def test_c07_mgf_suite():
    leb = LebesgueOn01()
    d2x = DensityOn01(lambda x: 2.0 * np.asarray(x, dtype=float), label="2x")
    combos = list(itertools.product(
        (Doubling(), Baker()),
        (leb, d2x),
        ((0.0, 0.5), (0.25, 0.5)),
        (0.6, 0.75, 0.9),
    ))[:20]
    assert len(combos) == 20
    fails = 0
    for m, base, A, lam in combos:
        n = max(16, int(math.ceil(math.log(1e-11) / math.log(lam))))
        fc = check_functional_equation(m, base, A, lam, n)
        if not fc.passed:
            fails += 1

    # Cesaro shift identity at finite n
    worst_shift = 0.0
    for m, base in itertools.product((Doubling(), Baker()), (leb, d2x)):
        A = (0.0, 0.5)
        for n in (12, 40, 63):
            lhs = schur_average(m, base, preimage_step(m, A), n)
            rhs = (n + 1) / n * schur_average(m, base, A, n + 1) - measure_of(base, A) / n
            worst_shift = max(worst_shift, abs(lhs - rhs))

    telescope = max(
        modified_measure_identity(Doubling(), d2x, (0.0, 0.5), 0.6, n=60),
        modified_measure_identity(Baker(), leb, (0.25, 0.5), 0.5, n=50),
    )

    rec = abel_limit(Doubling(), d2x, (0.0, 0.5))
    s64 = schur_average(Doubling(), d2x, (0.0, 0.5), 64)
    raw = {round(l, 12): v for l, v in zip(rec.lambdas, rec.values)}
    gap = abs(raw[round(1.0 - 1.0 / 64.0, 12)] - s64)

    ok = fails == 0 and worst_shift <= 1e-12 and telescope <= 1e-9 and gap <= 2e-3
    report("C7 mgf suite", ok,
           f"func-eq fails={fails}/20, shift={worst_shift:.2e}, telescope={telescope:.2e}, abel-schur gap={gap:.2e}")
    assert fails == 0
    assert worst_shift <= 1e-12
    assert telescope <= 1e-9
    assert gap <= 2e-3


def test_c08_gauss_ergodic_average():
    target, _ = quad(lambda x: x / (1.0 + x), 0.0, 1.0)
    target /= math.log(2.0)
    assert target == pytest.approx(0.4426950408889634, abs=1e-12)
    birkhoff_average(Gauss(), lambda x: x, 0.7071067811865476, 10_000)  # jit warmup
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    errs = []
    for _ in range(10):
        x0 = float(rng.uniform(0.05, 0.95))
        stats = birkhoff_average(Gauss(), lambda x: x, x0, 10**7)
        errs.append(abs(stats.mean - target))
    elapsed = time.perf_counter() - t0
    mean_err = float(np.mean(errs))
    ok = mean_err < 5e-3 and elapsed < 60.0
    report("C8 gauss ergodic average", ok, f"mean|err|={mean_err:.2e}, {elapsed:.1f}s")
    assert mean_err < 5e-3
    assert elapsed < 60.0


def test_c09_ulam_gauss_density():
    t0 = time.perf_counter()
    um = ulam_matrix(Gauss(), UlamPartition.unit(512), 10_000, seed=909)
    sd = stationary_density(um)
    edges = np.asarray(um.partition.edges)
    ref = GaussDensity()
    cell_avg = np.array([
        ref.integral(float(edges[i]), float(edges[i + 1])) for i in range(512)
    ]) / np.diff(edges)
    l1 = float(np.sum(np.abs(sd.density - cell_avg) * np.diff(edges)))
    elapsed = time.perf_counter() - t0
    ok = l1 < 0.02 and elapsed < 30.0
    report("C9 ulam gauss density", ok, f"L1={l1:.4f}, {elapsed:.1f}s")
    assert l1 < 0.02
    assert elapsed < 30.0


def _valid_swapped_targets(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        u, v = rng.uniform(-10, 10, 2)
        w = u * v
        if abs(w) < 1e-3 or abs(w + 4.0) < 1e-3:
            continue
        if u * u + 4 * u / v < 0 or v * v + 4 * v / u < 0:
            continue
        out.append((float(u), float(v)))
    return out


@pytest.mark.xfail(
    strict=True,
    reason=(
        "the absolute inverse-branch Jacobian sum of the swapped map is "
        "|uv+2|/sqrt(uv(uv+4)) > 1 at every valid (u,v): one branch always "
        "reverses orientation, so only the signed sum is identically 1 "
        "(verified by finite differences and Monte Carlo preimage measure)"
    ),
)
def test_c10a_swapped_lebesgue_invariance():
    m = SwappedBoole2D()
    targets = _valid_swapped_targets(1000, seed=1010)
    sums = np.array([jacobian_sum(m, u, v) for u, v in targets])
    signed = np.array([signed_jacobian_sum(m, u, v) for u, v in targets])
    worst = float(np.max(np.abs(sums - 1.0)))
    report("C10a swapped invariance", worst <= 1e-8,
           f"max|sum-1|={worst:.3e}, max|signed-1|={np.max(np.abs(signed-1.0)):.2e}")
    assert worst <= 1e-8


def test_c10b_jacobians_closed_form_vs_finite_differences():
    targets = _valid_swapped_targets(200, seed=1011)
    h = 1e-6
    worst = 0.0
    for u, v in targets:
        dp, dm = inverse_jacobians_swapped(u, v)
        for sign, det in ((+1, dp), (-1, dm)):
            J = np.zeros((2, 2))
            for j, (du, dv) in enumerate([(h, 0.0), (0.0, h)]):
                brp = inverse_branches_swapped(u + du, v + dv)
                brm = inverse_branches_swapped(u - du, v - dv)
                p = brp.plus if sign > 0 else brp.minus
                q = brm.plus if sign > 0 else brm.minus
                J[:, j] = (np.array(p) - np.array(q)) / (2.0 * h)
            fd = float(np.linalg.det(J))
            worst = max(worst, abs(det - fd) / max(abs(fd), 1e-3))
    ok = worst <= 1e-5
    report("C10b jacobian cross-check", ok, f"max rel diff={worst:.2e}")
    assert worst <= 1e-5


def test_c10c_branch_roundtrip():
    targets = _valid_swapped_targets(1000, seed=1012)
    worst = max(inverse_branches_swapped(u, v).roundtrip_residual() for u, v in targets)
    ok = worst < 1e-9
    report("C10c branch roundtrip", ok, f"max residual={worst:.2e}")
    assert worst < 1e-9


def test_c10d_branch_relations():
    # sums, products, and ratios from the cleared quadratics; the product
    # relations carry the sign forced by x^2 - ux - u/v = 0
    targets = _valid_swapped_targets(1000, seed=1013)
    worst = 0.0
    for u, v in targets:
        res = inverse_branches_swapped(u, v).vieta_residuals()
        scale = 1.0 + abs(u) + abs(v) + abs(u / v) + abs(v / u)
        worst = max(worst, max(res.values()) / scale)
    ok = worst <= 1e-10
    report("C10d branch relations", ok, f"max scaled residual={worst:.2e}")
    assert worst <= 1e-10


def test_c11a_nd_identity_weight_sums():
    rng = np.random.default_rng(1111)
    worst = 0.0
    for n in (2, 3, 4):
        m = PermutationBooleMap(n, tuple(range(n)))
        for _ in range(30):
            r = nd_preimages(m, rng.uniform(-5, 5, n))
            assert r.certainty == "exact"
            worst = max(worst, abs(r.weight_sum - 1.0))
    ok = worst <= 1e-8
    report("C11a nd identity weight sums", ok, f"max|sum-1|={worst:.2e}")
    assert worst <= 1e-8


@pytest.mark.xfail(
    strict=True,
    reason=(
        "transposition blocks contribute the swapped-map factor "
        "|uv+2|/sqrt(uv(uv+4)) > 1 to the weight sum, so products of "
        "transpositions cannot reach 1 except in the |uv| -> inf limit"
    ),
)
def test_c11b_nd_transposition_weight_sums():
    rng = np.random.default_rng(1112)
    sigmas = {2: (1, 0), 3: (1, 0, 2), 4: (1, 0, 3, 2)}
    worst = 0.0
    checked = 0
    for n, sigma in sigmas.items():
        m = PermutationBooleMap(n, sigma)
        while checked < 30 * (n - 1):
            r = nd_preimages(m, rng.uniform(-10, 10, n))
            if r.n_branches == 0:
                continue
            worst = max(worst, abs(r.weight_sum - 1.0))
            checked += 1
    report("C11b nd transposition weight sums", worst <= 1e-8, f"max|sum-1|={worst:.3e}")
    assert worst <= 1e-8


def test_c11c_three_cycle_informational():
    m = PermutationBooleMap(3, (1, 2, 0))
    r = nd_preimages(m, np.array([0.3, -0.4, 0.8]))
    assert r.certainty == "best_effort"
    assert r.incomplete_enumeration
    report("C11c 3-cycle evidence", True,
           f"weight_sum={r.weight_sum:.6f}, branches={r.n_branches}, certainty={r.certainty}")


def test_c12_negative_controls(capsys):
    special = '{"type":"special_boole","alpha":0.5,"a":0,"b":0,"beta":0.5}'
    code = cli_main(["verify-density", "--map", special, "--density", "cauchy:0:2", "--tol", "1e-8"])
    out1 = json.loads(capsys.readouterr().out)
    wrong_density_ok = code == 2 and out1["max_residual"] > 1e-2

    perturbed = '{"type":"special_boole","alpha":0.55,"a":0,"b":0,"beta":0.5}'
    code2 = cli_main(["verify-density", "--map", perturbed, "--density", "cauchy:0:1", "--tol", "1e-8"])
    out2 = json.loads(capsys.readouterr().out)
    wrong_map_ok = code2 == 2 and out2["max_residual"] > 1e-2

    mismatched = check_commutation(
        CotangentConjugacy(1.0, 0.0), SpecialBoole(alpha=0.5, a=0.0, b=1.0, beta=0.5)
    )
    conj_ok = mismatched.max_residual > 1e-2

    ok = wrong_density_ok and wrong_map_ok and conj_ok
    report("C12 negative controls", ok,
           f"wrong-density exit/resid=({code},{out1['max_residual']:.1e}), "
           f"wrong-map exit=({code2},{out2['max_residual']:.1e}), conj={mismatched.max_residual:.1e}")
    assert wrong_density_ok
    assert wrong_map_ok
    assert conj_ok
