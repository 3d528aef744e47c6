"""Acceptance gate: every criterion at its reference scale and tolerance.

Each test prints one pass/fail line; `bernlpp verify-all --full` runs the
same battery from the command line.  The Monte Carlo criteria take a few
minutes in total on a small machine.

Criteria 7 and 10 are each run twice.  Their stated parameter sets are
unattainable for measured, documented reasons (a pinned 59% prefactor bias
for the tail-rate point comparison; an unobservably deep event for the
left-tail scan) and those literal tests are expected to fail; the
companion tests verify the same limits in their observable forms.  See
README "Known red acceptance tests" and the stated-parameter docstrings
below.
"""

from bernlpp import left_tail_diagnostic, validate_params
from bernlpp.verify import (
    check_burke_exactness,
    check_duality,
    check_lambda_structure,
    check_left_tail_speed,
    check_legendre_roundtrip,
    check_lmgf_mc,
    check_oracle_equivalence,
    check_rlem,
    check_shape_lln,
    check_tail_rate,
    check_tail_rate_ladder,
    check_threshold_limits,
)


def _report(res):
    print(f"[{'PASS' if res.passed else 'FAIL'}] {res.name}: {res.detail} ({res.seconds:.1f}s)")
    assert res.passed, f"{res.name}: {res.detail}"


def test_criterion_01_oracle_equivalence():
    _report(check_oracle_equivalence(full=True))


def test_criterion_02_burke_exactness():
    _report(check_burke_exactness())


def test_criterion_03_shape_lln():
    _report(check_shape_lln(full=True))


def test_criterion_04_duality():
    _report(check_duality())


def test_criterion_05_legendre_roundtrip():
    _report(check_legendre_roundtrip())


def test_criterion_06_rlem_identity():
    _report(check_rlem(full=True))


def test_criterion_07_tail_rate_as_stated():
    """Literal parameters (N=200, N*rate=7, 1e6 reps, 20% tolerance).

    The tail obeys P{G >= Nr} = C exp(-N rate) with a measured constant
    log-prefactor -log C of about 4.1 (flat in N over N = 40..120), so any
    run that pins N*rate at 7 pins the relative error of -log(phat)/N near
    4.1/7 = 59%, independent of N, and leaves only ~3 expected hits at the
    stated scale (its own >= 10-hit guidance is violated).  Implemented
    faithfully and expected to fail; the ladder test below verifies the
    rate in observable form.
    """
    _report(check_tail_rate(full=True))


def test_criterion_07_tail_rate_prefactor_ladder():
    _report(check_tail_rate_ladder(full=True))


def test_criterion_08_lmgf_mc():
    _report(check_lmgf_mc(full=True))


def test_criterion_09_lambda_structure():
    _report(check_lambda_structure())


def test_criterion_10_left_tail_speed_as_stated():
    """Literal parameters (p=0.5, r=0.7, N in {20,30,40}, 1e6 reps).

    The minimum corner value over 1e6 replicates at N=20 is 16, two units
    above the threshold 14, so P{G <= 0.7N} is far below 1e-6 at every
    stated N: all rows come back censored and no increasing-trend evidence
    exists at this depth.  The check is implemented faithfully and reported
    as failed; the observable-depth variant below demonstrates the trend.
    """
    rows = left_tail_diagnostic(validate_params(0.5), False, 1.0, 1.0, 0.7, [20, 30, 40], 1_000_000, 17)
    vals = [r.rate_estimate for r in rows if not r.censored]
    detail = ", ".join(
        f"N={r.N}: {'censored' if r.censored else f'{r.rate_estimate:.4f}'} (hits={r.hits})" for r in rows
    )
    passed = len(vals) >= 2 and all(b > a for a, b in zip(vals, vals[1:]))
    print(f"[{'PASS' if passed else 'FAIL'}] left_tail_speed_as_stated: {detail}")
    assert passed, (
        "no uncensored rows at the stated depth r=0.7: the event is below the "
        f"Monte Carlo floor of 1e6 replicates ({detail})"
    )


def test_criterion_10_left_tail_speed_observable_depth():
    _report(check_left_tail_speed(full=True))


def test_criterion_11_threshold_limits():
    _report(check_threshold_limits())
