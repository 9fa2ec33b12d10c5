"""Acceptance suite.

One test per acceptance criterion, each at its stated tolerance, printing a
single PASS/FAIL line (run with ``pytest -s`` to see them).  The heavy
N <= 7 certificate sweep is computed once and shared by criteria 1-3.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from multislice.core import Composition, reduced_compositions
from multislice.coarsening import all_coarsenings, intertwine_audit
from multislice.operators import identity_audit, laplacian_dense
from multislice.spectral import (
    centered_level_basis,
    coordinate_sum_is_zero,
    gap_certificate,
    induction_audit,
    k_certificate,
    p_certificate,
)
from multislice.walk import WalkConfig, chi_square_uniform, relaxation_estimate, simulate

TOL = 1e-8
SWEEP_MAX_N = 7
IDENTITY_MAX_N = 6
RUNTIME_LIMIT_SWEEP = 120.0
RUNTIME_LIMIT_WALK = 60.0

#: Spot checks that empty levels reduce away without changing anything.
ZERO_PADDED = [(2, 0, 2), (3, 0, 1), (0, 1, 1, 1)]


def _report(num: int, ok: bool, message: str) -> None:
    print(f"\n[criterion {num:>2}] {'PASS' if ok else 'FAIL'}: {message}")


@pytest.fixture(scope="module")
def sweep():
    """Gap certificates for every reduced composition with N <= 7, timed."""
    t0 = time.perf_counter()
    certs = {}
    for n in range(2, SWEEP_MAX_N + 1):
        for k in reduced_compositions(n):
            certs[k.counts] = gap_certificate(k, tol=TOL)
    return certs, time.perf_counter() - t0


def test_criterion_1_gap_theorem(sweep):
    certs, elapsed = sweep
    bad = []
    for counts, cert in certs.items():
        n = sum(counts)
        exact_ok = cert.eigen_equations_exact and cert.dimension_certified
        if not (exact_ok and cert.float_ok and cert.gap == float(n)):
            bad.append(counts)
    for counts in ZERO_PADDED:
        cert = gap_certificate(Composition(counts), tol=TOL)
        if not (cert.passed and cert.gap == float(sum(counts))):
            bad.append(counts)
    ok = not bad and elapsed < RUNTIME_LIMIT_SWEEP
    _report(
        1,
        ok,
        f"gap equals N on all {len(certs)} reduced compositions with N <= {SWEEP_MAX_N} "
        f"(exact nullspace + float window at {TOL}); sweep took {elapsed:.1f}s",
    )
    assert not bad, f"gap certification failed for {bad}"
    assert elapsed < RUNTIME_LIMIT_SWEEP, f"sweep took {elapsed:.1f}s"


def test_criterion_2_gap_multiplicity(sweep):
    certs, _ = sweep
    bad = []
    for counts, cert in certs.items():
        k = Composition(counts)
        want = (k.n - 1) * (k.r_active - 1)
        if not (
            cert.dimension_certified
            and cert.expected_dimension == want
            and cert.nullity_upper_bound == want
            and cert.family_rank == want
        ):
            bad.append(counts)
    for counts in ZERO_PADDED:
        k = Composition(counts)
        cert = gap_certificate(k, tol=TOL)
        if cert.nullity_upper_bound != (k.n - 1) * (k.r_active - 1):
            bad.append(counts)
    ok = not bad
    _report(2, ok, f"exact nullity of L - N*I equals (N-1)(r-1) across the sweep")
    assert not bad, f"multiplicity mismatch for {bad}"


def test_criterion_3_eigenbasis_exactness(sweep):
    certs, _ = sweep
    bad = [
        counts
        for counts, cert in certs.items()
        if not (cert.eigen_equations_exact and cert.family_rank == cert.expected_dimension)
    ]
    # independence oracle: a combination sums single-coordinate functions, and
    # such a sum vanishes only when every coordinate gets the same generator
    rng = random.Random(0)
    oracle_bad = []
    for n in range(2, 6):
        for k in reduced_compositions(n):
            gens = centered_level_basis(k)
            zero = tuple(Fraction(0) for _ in range(k.r))
            if not coordinate_sum_is_zero(k, [gens[0]] * k.n):
                oracle_bad.append((k.counts, "flat relation"))
            for _ in range(3):
                coeffs = [
                    [Fraction(rng.randint(-3, 3)) for _ in range(k.n - 1)] for _ in gens
                ]
                if all(c == 0 for row in coeffs for c in row):
                    coeffs[0][0] = Fraction(1)
                hs = []
                for pos in range(k.n - 1):
                    h = tuple(
                        sum((coeffs[m][pos] * gens[m][lvl] for m in range(len(gens))), Fraction(0))
                        for lvl in range(k.r)
                    )
                    hs.append(h)
                hs.append(zero)
                if any(h != zero for h in hs) and coordinate_sum_is_zero(k, hs):
                    oracle_bad.append((k.counts, coeffs))
    ok = not bad and not oracle_bad
    _report(3, ok, "every basis member satisfies Lf = Nf with zero rational residual; full rank")
    assert not bad, f"eigenbasis failed for {bad}"
    assert not oracle_bad, f"independence oracle failed for {oracle_bad}"


def test_criterion_4_base_cases(sweep):
    certs, _ = sweep
    failures = []

    cert2 = certs[(1, 1)]
    gamma2 = Fraction(int(cert2.gap))
    if not (cert2.passed and gamma2 == 2 and Fraction(2, 2 - 1) * gamma2 == 4):
        failures.append("two particles")

    three = [(1, 2), (2, 1), (1, 1, 1)]
    for counts in three:
        cert = certs[counts]
        gamma = Fraction(int(cert.gap))
        delta = Fraction(2, 3 - 1) * gamma
        if not (cert.passed and gamma == 3 and delta == 3):
            failures.append(counts)
    for counts in [(1, 0, 2), (0, 2, 1)]:
        cert = gap_certificate(Composition(counts), tol=TOL)
        if not (cert.passed and Fraction(int(cert.gap)) == 3):
            failures.append(counts)
    ok = not failures
    _report(4, ok, "base cases exact: gap 2 / delta 4 at N=2; delta 3 for every non-trivial N=3")
    assert not failures, failures


def test_criterion_5_correlation_operator(sweep):
    certs, _ = sweep
    bad = []
    for counts in certs:
        k = Composition(counts)
        assert k.cardinality() <= 10**4
        cert = k_certificate(k)
        if not (cert.passed and cert.details["bruteforce_ok"] is True):
            bad.append(counts)
    ok = not bad
    _report(
        5,
        ok,
        "correlation spectrum {1, -1/(N-1) x (r-1)} and brute-force form agreement, exact",
    )
    assert not bad, f"correlation operator failed for {bad}"


def test_criterion_6_projection_average(sweep):
    certs, _ = sweep
    bad = []
    for n in range(3, 7):
        for k in reduced_compositions(n):
            cert = p_certificate(k, tol=TOL)
            gap_dim = certs[k.counts].expected_dimension
            if not (cert.passed and cert.details["gap_multiplicity"] == gap_dim):
                bad.append(k.counts)
    ok = not bad
    _report(
        6,
        ok,
        "projection-average spectrum within {0, 1/(N-1), 1}; eigenvalue 1 simple and "
        "constant; multiplicity matches the gap dimension (3 <= N <= 6)",
    )
    assert not bad, f"projection average failed for {bad}"


def test_criterion_7_identities():
    bad = []
    for n in range(2, IDENTITY_MAX_N + 1):
        for k in reduced_compositions(n):
            rep = identity_audit(k, n_functions=100, seed=10 + n)
            if not rep["measure_decomposition_ok"]:
                bad.append((k.counts, "measure"))
            if rep["applicable"] and not (
                rep["averaging_ok"] == rep["shift_ok"] == rep["decomposition_ok"] == 100
            ):
                bad.append((k.counts, rep))
    ok = not bad
    _report(
        7,
        ok,
        "averaging, shift, and decomposition identities: zero rational residual on "
        "100 random rational functions per slice (N <= 6)",
    )
    assert not bad, f"identity audit failed for {bad}"


def test_criterion_8_induction():
    bad = []
    for n in range(3, 7):
        for k in reduced_compositions(n):
            rep = induction_audit(k, tol=TOL)
            if not (rep.holds and rep.equality):
                bad.append((k.counts, rep.delta, rep.rhs))
    ok = not bad
    _report(8, ok, "induction bound holds with equality for all reduced compositions, 3 <= N <= 6")
    assert not bad, f"induction failed for {bad}"


def test_criterion_9_coarsening():
    spectra: dict[tuple, np.ndarray] = {}

    def spectrum_of(k: Composition) -> np.ndarray:
        if k.counts not in spectra:
            spectra[k.counts] = np.linalg.eigvalsh(laplacian_dense(k).astype(np.float64))
        return spectra[k.counts]

    pairs = 0
    bad = []
    for n in range(3, 7):
        for fine in reduced_compositions(n):
            if fine.r < 3:
                continue
            for coarse, phi in all_coarsenings(fine).items():
                pairs += 1
                audit = intertwine_audit(phi, fine, n_functions=100, seed=pairs)
                if not audit["all_exact"]:
                    bad.append((fine.counts, coarse.counts, "intertwine"))
                    continue
                fine_vals = spectrum_of(fine)
                coarse_vals = spectrum_of(coarse)
                scale = max(1.0, float(np.abs(coarse_vals).max()))
                mismatch = max(
                    float(np.abs(fine_vals - v).min()) for v in coarse_vals
                )
                if mismatch > TOL * scale:
                    bad.append((fine.counts, coarse.counts, "containment"))
                    continue
                gap_fine = float(fine_vals[fine_vals > TOL][0])
                gap_coarse = float(coarse_vals[coarse_vals > TOL][0])
                if gap_coarse < gap_fine - TOL * max(1.0, gap_fine):
                    bad.append((fine.counts, coarse.counts, "gap monotonicity"))
    ok = not bad and pairs > 0
    _report(
        9,
        ok,
        f"intertwining exact on 100 random functions and spectrum containment with gap "
        f"monotonicity on all {pairs} coarsening pairs with N <= 6",
    )
    assert not bad, f"coarsening failed for {bad}"


def test_criterion_10_walk():
    t0 = time.perf_counter()
    k = Composition((2, 2, 2))
    stats = simulate(WalkConfig(composition=k, steps=1_000_000, seed=7))
    ratio, stderr = relaxation_estimate(stats)
    target = 1.0 - 2.0 / (k.n - 1)
    decay_ok = abs(ratio - target) <= 3 * stderr

    chi_ok = True
    for counts, thin, seed in [((2, 1), 1, 13), ((2, 2), 5, 17)]:
        cfg = WalkConfig(composition=Composition(counts), steps=1_000_000, seed=seed, thin=thin)
        occ = simulate(cfg).occupation
        stat, df = chi_square_uniform(occ)
        if stat > scipy.stats.chi2.ppf(0.99, df):
            chi_ok = False
    elapsed = time.perf_counter() - t0
    ok = decay_ok and chi_ok and elapsed < RUNTIME_LIMIT_WALK
    _report(
        10,
        ok,
        f"decay ratio {ratio:.4f} within 3 x {stderr:.4f} of {target}; stationarity "
        f"chi-square at 99% on both small slices; took {elapsed:.1f}s",
    )
    assert decay_ok, f"ratio {ratio} not within 3*{stderr} of {target}"
    assert chi_ok, "stationarity chi-square exceeded the 99% bound"
    assert elapsed < RUNTIME_LIMIT_WALK, f"walk criterion took {elapsed:.1f}s"
