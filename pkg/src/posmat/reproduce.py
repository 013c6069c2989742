"""Named claim checks that back the ``reproduce`` command.

Each entry is a function ``(prec, seed) -> (ok, detail)``.  Running the
suite gives one record per entry, sorted by name whatever the execution
order.
"""
from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .combinatorics import factorial
from .factorizations import (
    apply_factors,
    bareiss_det,
    beta_inverse_closed,
    beta_ldl_closed,
    beta_seb_closed,
    bell_ldl_closed,
    calL_group,
    det_hp,
    exact_inverse,
    inverse_lower_sequence,
    neville_seb,
    seb_compose,
    stirling_first_seb_closed,
    sym_congruence_ldl,
    y_k,
)
from .matrix import Matrix, identity
from .matrixlab import (
    FIRST,
    SECOND,
    bell_matrix,
    beta_matrix,
    cauchy_matrix,
    delete_rc,
    delta_log,
    factorial_hankel,
    gamma_matrix,
    hadamard_power,
    pascal_matrix,
    stirling_matrix,
    symmetrized_stirling,
)
from .numerics import DEFAULT_PRECISION, FAIL, PASS, HPReal, relative_error
from .positivity import (
    ALL_MINORS,
    SOLID_MINORS,
    hankel_tp_via_pd,
    infdiv_horn,
    infdiv_sample,
    is_pd_hp,
    is_psd_bruteforce,
    is_psd_exact,
    is_tn,
    is_tp,
    is_triangular_tp,
    solid_minors_hp,
    tshift_identity_check,
)

BELL5_QUARTER_DET = HPReal("-1.62352e-9", 64)


def _first_bad(items):
    for label, ok in items:
        if not ok:
            return label
    return None


def _result(bad, **detail):
    if bad is not None:
        detail["first_failure"] = bad
    return bad is None, detail


def beta_det(prec, seed):
    return _result(_first_bad((n, bareiss_det(beta_matrix(n)) == factorial(n)) for n in range(1, 13)), n_max=12)


def beta_ldl(prec, seed):
    def ok(n):
        closed = beta_ldl_closed(n)
        return closed.compose() == beta_matrix(n) and sym_congruence_ldl(beta_matrix(n)) == closed

    return _result(_first_bad((n, ok(n)) for n in range(1, 13)), n_max=12)


def beta_inverse(prec, seed):
    return _result(
        _first_bad((n, exact_inverse(beta_matrix(n)) == beta_inverse_closed(n)) for n in range(1, 11)),
        n_max=10,
    )


def beta_seb(prec, seed):
    def ok(n):
        closed = beta_seb_closed(n)
        lower_binomials = Matrix(
            [[factorial(i) // (factorial(j) * factorial(i - j)) if j <= i else 0 for j in range(1, n + 1)]
             for i in range(1, n + 1)]
        )
        return neville_seb(beta_matrix(n)) == closed and closed.lower_product() == lower_binomials

    return _result(_first_bad((n, ok(n)) for n in range(2, 9)), n_range=[2, 8])


def yk_recursion(prec, seed):
    checks = (
        ((n, k), apply_factors(calL_group(n, k), y_k(n, k)) == y_k(n, k + 1))
        for n in range(3, 9)
        for k in range(1, n - 1)
    )
    return _result(_first_bad(checks), n_max=8)


def stirling1_seb(prec, seed):
    def ok(n):
        F = stirling_first_seb_closed(n)
        s = stirling_matrix(FIRST, n)
        return seb_compose(F) == s and apply_factors(inverse_lower_sequence(F), s) == identity(n)

    return _result(_first_bad((n, ok(n)) for n in range(2, 11)), n_range=[2, 10])


def stirling2_tshift(prec, seed):
    checks = []
    for n in range(2, 9):
        checks.append((f"tshift n={n}", tshift_identity_check(n).passed))
    for n in range(1, 9):
        checks.append((f"triangular-tp n={n}", is_triangular_tp(stirling_matrix(SECOND, n)).passed))
    return _result(_first_bad(checks), n_max=8)


def stirling_tn_tp(prec, seed):
    checks = []
    for n in range(1, 7):
        for kind in (FIRST, SECOND):
            checks.append((f"tn {kind} n={n}", is_tn(stirling_matrix(kind, n)).passed))
            checks.append((f"tp sym-{kind} n={n}", is_tp(symmetrized_stirling(kind, n)).passed))
    return _result(_first_bad(checks), n_max=6)


def bell_ldl(prec, seed):
    def ok(n):
        F = bell_ldl_closed(n)
        prod = 1
        for i in range(n):
            prod *= factorial(i)
        return F.compose() == bell_matrix(n) and bareiss_det(bell_matrix(n)) == prod

    return _result(_first_bad((n, ok(n)) for n in range(1, 13)), n_max=12)


def bell_hankel_tp(prec, seed):
    checks = [(f"pd-pair n={n}", hankel_tp_via_pd(bell_matrix(n)).passed) for n in range(1, 9)]
    checks += [
        (f"agree n={n}", hankel_tp_via_pd(bell_matrix(n)).verdict == is_tp(bell_matrix(n)).verdict)
        for n in range(1, 7)
    ]
    return _result(_first_bad(checks), n_max=8)


def _displayed_delta_log_b4(prec):
    q = [
        [Fraction(2), Fraction(5, 4), Fraction(6, 5)],
        [Fraction(5, 4), Fraction(6, 5), Fraction(52, 45)],
        [Fraction(6, 5), Fraction(52, 45), Fraction(3045, 2704)],
    ]
    return [[HPReal(x, prec + 32).log() for x in r] for r in q]


def bell4_horn(prec, seed):
    rep = infdiv_horn(bell_matrix(4), prec)
    D = delta_log(bell_matrix(4), prec)
    expected = _displayed_delta_log_b4(prec)
    bound = HPReal(Fraction(1, 2**100), prec)
    worst = max(relative_error(D[i, j], expected[i][j]) for i in range(3) for j in range(3))
    minors = [det_hp(D.submatrix(range(k), range(k)), prec) for k in range(1, 4)]
    margin_ok = all(m > HPReal("1e-20", prec) for m in minors)
    ok = rep.passed and worst <= bound and margin_ok
    return ok, {"leading_minors": [str(m) for m in minors], "max_relative_entry_error": str(worst)}


def bell5_quarter(prec, seed):
    p = max(prec, 256)
    M = hadamard_power(bell_matrix(5), Fraction(1, 4), p)
    det = det_hp(M, p)
    rel = relative_error(det, BELL5_QUARTER_DET.with_precision(p))
    rep = is_pd_hp(M, p)
    certified = rep.verdict == FAIL and rep.witness["stage"] == 5
    ok = rel <= HPReal(Fraction(1, 1000), p) and certified
    return ok, {"determinant": str(det.with_precision(64)), "relative_error": str(rel.with_precision(64))}


def infdiv_corpus(prec, seed):
    checks = []
    for name, fam in (("beta", beta_matrix), ("cauchy", cauchy_matrix), ("pascal", pascal_matrix)):
        for n in range(1, 7):
            A = fam(n)
            checks.append((f"{name} n={n}", infdiv_sample(A, prec=prec).passed))
            for i in range(1, A.rows + 1):
                checks.append(
                    (f"{name} n={n} A({i},{i})", A.rows == 1 or infdiv_sample(delete_rc(A, i, i), prec=prec).passed)
                )
    return _result(_first_bad(checks), n_max=6)


def random_increasing(rng: random.Random, n: int, lo: float = 0.0, hi: float = 10.0):
    while True:
        vals = sorted(rng.uniform(lo, hi) for _ in range(n))
        if vals[0] > lo and all(a < b for a, b in zip(vals, vals[1:])):
            return vals


def gamma_tp(prec, seed):
    rng = random.Random(seed)
    checks = []
    worst = None
    for t in range(20):
        n = rng.randint(2, 5)
        lam, mu = random_increasing(rng, n), random_increasing(rng, n)
        rep = solid_minors_hp(gamma_matrix(lam, mu, prec), prec)
        m = rep.details.get("min_relative_margin")
        worst = m if worst is None or (m is not None and m < worst) else worst
        checks.append((f"sample {t} (n={n})", rep.passed))
    return _result(_first_bad(checks), samples=20, min_relative_margin=str(worst.with_precision(64)))


def random_symmetric_rational(rng: random.Random, n: int = 4) -> Matrix:
    """Alternate general symmetric matrices with (often singular) Gram matrices."""
    if rng.random() < 0.5:
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        return Matrix(rows)
    rank = rng.randint(1, n)
    B = Matrix([[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(rank)] for _ in range(n)])
    return B @ B.T


def tp_corpus(n_max: int = 6):
    for n in range(1, n_max + 1):
        yield f"beta {n}", beta_matrix(n)
        yield f"cauchy {n}", cauchy_matrix(n)
        yield f"pascal {n}", pascal_matrix(n)
        yield f"bell {n}", bell_matrix(n)
        yield f"factorial-hankel {n}", factorial_hankel(n)
        for kind in (FIRST, SECOND):
            yield f"stirling-{kind} {n}", stirling_matrix(kind, n)
            yield f"sym-stirling-{kind} {n}", symmetrized_stirling(kind, n)


def oracle_agreement(prec, seed):
    rng = random.Random(seed)
    checks = []
    for t in range(200):
        A = random_symmetric_rational(rng)
        checks.append((f"psd sample {t}", is_psd_exact(A).verdict == is_psd_bruteforce(A).verdict))
    for name, A in tp_corpus(6):
        checks.append((f"tp modes {name}", is_tp(A, ALL_MINORS).verdict == is_tp(A, SOLID_MINORS).verdict))
    return _result(_first_bad(checks), psd_samples=200)


def identity_sanity(prec, seed):
    return is_tp(Matrix([[1]])).passed, {}


ENTRIES = {
    "beta-det-equals-n-factorial": (1, beta_det),
    "beta-ldl-closed-form": (2, beta_ldl),
    "beta-inverse-closed-form": (3, beta_inverse),
    "beta-seb-closed-form": (4, beta_seb),
    "yk-recursion": (5, yk_recursion),
    "stirling1-seb-closed-form": (6, stirling1_seb),
    "stirling2-tshift-triangular-tp": (7, stirling2_tshift),
    "stirling-tn-symmetrized-tp": (8, stirling_tn_tp),
    "bell-ldl-and-det": (9, bell_ldl),
    "bell-hankel-tp": (10, bell_hankel_tp),
    "bell4-horn-delta-log": (11, bell4_horn),
    "bell5-quarter-power-det": (12, bell5_quarter),
    "infdiv-sample-corpus": (13, infdiv_corpus),
    "gamma-matrix-tp-evidence": (14, gamma_tp),
    "oracle-agreement": (15, oracle_agreement),
    "identity-sanity": (None, identity_sanity),
}


def run_entry(name: str, prec: int = DEFAULT_PRECISION, seed: int = 0) -> dict:
    criterion, fn = ENTRIES[name]
    start = time.perf_counter()
    try:
        ok, detail = fn(prec, seed)
        verdict = PASS if ok else FAIL
    except Exception as exc:  # a crash is a failed claim, not a crashed suite
        verdict, detail = FAIL, {"error": f"{type(exc).__name__}: {exc}"}
    return {
        "name": name,
        "criterion": criterion,
        "verdict": verdict,
        "elapsed_s": round(time.perf_counter() - start, 4),
        "detail": detail,
    }


def reproduce_paper(prec: int = DEFAULT_PRECISION, seed: int = 0, jobs: int = 1, names=None) -> dict:
    names = sorted(names or ENTRIES)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda nm: run_entry(nm, prec, seed), names))
    else:
        records = [run_entry(nm, prec, seed) for nm in names]
    records.sort(key=lambda r: r["name"])
    overall = PASS if all(r["verdict"] == PASS for r in records) else FAIL
    return {"schema": 1, "precision_bits": prec, "seed": seed, "overall": overall, "entries": records}
