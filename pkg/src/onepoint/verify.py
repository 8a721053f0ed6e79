"""Exact cross-checks between the trace engines, the Jacobi-like coefficient
identity behind the modularity of G(u), and numeric transformation checks."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial, gcd
from typing import Sequence

import mpmath

from .closedform import (
    closed_form_trace,
    falpha_trace,
    g_series,
    trace_module_N,
    zhu_recurse_twisted,
    zhu_recurse_untwisted,
)
from .combinatorics import fixed_point_free_involutions
from .elliptic import (
    p1_lambert_eval,
    p1_series,
    p1_theta_eval,
    q1_lambert_eval,
    q1_series,
    q1_theta_eval,
    zl_add,
    zl_eval,
    zl_rescale_tau,
    zl_scale,
)
from .fockoracle import oracle_trace
from .lattice import EvenLattice, JacobiLikeForm, enumerate_vectors, jl_E2exp, jl_mul, jl_theta, theta_vm
from .modforms import eisenstein_E, eisenstein_hat, eta
from .qseries import FracQSeries, qs_add, qs_mul, qs_pow, qs_scale
from .words import BracketWord, HeisenbergContext, Tail, pairing

__all__ = [
    "SeriesComparison",
    "CaseResult",
    "VerificationReport",
    "compare_series",
    "enumerate_words",
    "run_equivalence_suite",
    "jacobi_like_coefficient_identity",
    "g_series_reorganization",
    "reorganization_inputs",
    "numeric_modularity_check",
    "elliptic_suite",
    "modularity_matrices",
    "SUITES",
]

SUITES = ("heisenberg", "heisenberg-plus", "lattice-full", "lattice-plus-M", "lattice-plus-tail", "elliptic")


@dataclass(frozen=True)
class SeriesComparison:
    equal: bool
    first_mismatch: Fraction | None
    compared_up_to: Fraction | None

    def __bool__(self):
        return self.equal


def compare_series(a: FracQSeries, b: FracQSeries) -> SeriesComparison:
    """Exact comparison on the range where both series are known."""
    if a.is_zero and b.is_zero:
        return SeriesComparison(True, None, None)
    leads = [s.lead_exp for s in (a, b) if not s.is_zero]
    precs = [s.precision for s in (a, b) if not s.is_zero]
    lo, hi = min(leads), min(precs)
    if hi <= max(leads):
        # one series ends before the other starts
        raise ValueError("no comparable range")
    if not a.is_zero and not b.is_zero and (a.lead_exp - b.lead_exp).denominator != 1:
        return SeriesComparison(False, lo, hi)
    e = lo
    while e < hi:
        if a.coeff(e) != b.coeff(e):
            return SeriesComparison(False, e, hi)
        e += 1
    return SeriesComparison(True, None, hi)


@dataclass(frozen=True)
class CaseResult:
    description: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    suite: str
    parameters: dict
    cases: list = field(default_factory=list)
    complete: bool = True

    @property
    def passed(self) -> bool:
        return self.complete and all(c.passed for c in self.cases)

    @property
    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]

    def add(self, description: str, passed: bool, detail: str = "") -> None:
        self.cases.append(CaseResult(description, bool(passed), detail))

    def summary(self) -> str:
        n, bad = len(self.cases), len(self.failures)
        status = "PASS" if self.passed else "FAIL"
        extra = "" if self.complete else " (incomplete)"
        return f"{self.suite}: {status} {n - bad}/{n} cases{extra}"

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "complete": self.complete,
            "parameters": {k: str(v) for k, v in self.parameters.items()},
            "cases": [{"case": c.description, "passed": c.passed, "detail": c.detail} for c in self.cases],
        }


# ----------------------------------------------------------------- words

def enumerate_words(rank: int, max_weight: int, parity: int | None = None, tail: Tail = Tail(),
                    min_p: int = 0) -> list[BracketWord]:
    """Every word in unit-vector colors with total square-bracket weight <= max_weight.

    Words are multisets of ``(color, n)``; ``parity`` restricts the number of factors.
    """
    letters = [(c, n) for n in range(1, max_weight + 1) for c in range(1, rank + 1)]
    out = []
    for p in range(min_p, max_weight + 1):
        if parity is not None and p % 2 != parity:
            continue
        for combo in combinations_with_replacement(letters, p):
            if sum(n for _, n in combo) <= max_weight:
                out.append(BracketWord.from_colors(combo, rank, tail))
    return out


def _agree(report: VerificationReport, label: str, values: dict) -> None:
    names = list(values)
    ref = values[names[0]]
    for other in names[1:]:
        cmp = compare_series(ref, values[other])
        if not cmp.equal:
            report.add(label, False, f"{names[0]} vs {other}: first mismatch at q^{cmp.first_mismatch}")
            return
    report.add(label, True)


def run_equivalence_suite(suite: str, rank: int = 1, lattice: EvenLattice | None = None, max_weight: int = 6,
                          order: int = 20, alpha: Sequence[int] | None = None,
                          module_vectors: int = 2) -> VerificationReport:
    """Closed form vs recursion vs oracle on every word of the suite's family."""
    params = {"rank": rank if lattice is None else lattice.rank, "max_weight": max_weight, "order": order}
    if lattice is not None:
        params["gram"] = lattice.gram
    report = VerificationReport(suite, params)
    if suite in ("heisenberg", "heisenberg-plus"):
        ctx = HeisenbergContext.heisenberg(rank)
        algebra = "M" if suite == "heisenberg" else "Mplus"
        parity = None if suite == "heisenberg" else 0
        for w in enumerate_words(rank, max_weight, parity):
            closed = closed_form_trace(w, algebra, ctx, order)
            if algebra == "M":
                rec = zhu_recurse_untwisted(w, "M", ctx, order)
            else:
                rec = zhu_recurse_twisted(w, "Mplus", ctx, order)
            _agree(report, f"{algebra} {w}", {"closed": closed, "recursion": rec,
                                             "oracle": oracle_trace(w, algebra, ctx, order)})
        return report
    if lattice is None:
        raise ValueError(f"suite {suite} needs a lattice")
    ctx = HeisenbergContext.for_lattice(lattice)
    k = lattice.rank
    if suite == "lattice-full":
        # module sectors: zero and a few short vectors (max_norm 2 * module_vectors)
        sectors = [a for a in enumerate_vectors(lattice, 2 * module_vectors)]
        for w in enumerate_words(k, max_weight):
            _agree(report, f"VL {w}", {
                "closed": closed_form_trace(w, "VL", ctx, order),
                "recursion": zhu_recurse_untwisted(w, "VL", ctx, order),
                "oracle": oracle_trace(w, "VL", ctx, order),
            })
            for a in sectors:
                _agree(report, f"M(x)e^{a} {w}", {
                    "closed": trace_module_N(w, ctx, a, order),
                    "recursion": zhu_recurse_untwisted(w, "module", ctx, order, a),
                    "oracle": oracle_trace(w, "module", ctx, order, a),
                })
        return report
    if suite == "lattice-plus-M":
        for w in enumerate_words(k, max_weight, 0):
            _agree(report, f"VL+ {w}", {
                "closed": closed_form_trace(w, "VLplus", ctx, order),
                "recursion": zhu_recurse_twisted(w, "VLplus", ctx, order),
                "oracle": oracle_trace(w, "VLplus", ctx, order),
            })
        return report
    if suite == "lattice-plus-tail":
        if alpha is None:
            alpha = tuple(2 if i == 0 else 0 for i in range(k))
        alpha = tuple(alpha)
        params["alpha"] = alpha
        f0 = BracketWord((), Tail("f", alpha))
        _agree(report, f"Tr o(f_{alpha})", {"remark": falpha_trace(lattice, alpha, order),
                                            "oracle": oracle_trace(f0, "VLplus", ctx, order)})
        for kind, parity in (("f", 0), ("g", 1)):
            for w in enumerate_words(k, max_weight, parity, Tail(kind, alpha)):
                _agree(report, f"VL+ {w}", {
                    "closed": closed_form_trace(w, "VLplus", ctx, order),
                    "recursion": zhu_recurse_twisted(w, "VLplus", ctx, order),
                    "oracle": oracle_trace(w, "VLplus", ctx, order),
                })
        return report
    raise ValueError(f"unknown suite {suite!r}")


# ------------------------------------------------------ Jacobi-like forms

def _unit(order: int) -> FracQSeries:
    return FracQSeries(0, [1], order)


def jacobi_like_coefficient_identity(L: EvenLattice, v: Sequence, ell_max: int, f: Sequence[FracQSeries],
                                     q_order: int, e2_scale=1) -> VerificationReport:
    """[X^l] of Theta_L(v) * Etilde(-X) * F against the explicit triple sum.

    ``F = sum_m f_m/m! (2 pi i X)^m``; ``e2_scale`` multiplies E_2 inside Etilde.
    """
    report = VerificationReport("jacobi-like", {"gram": L.gram, "v": tuple(v), "ell_max": ell_max,
                                                "order": q_order})
    xo = ell_max + 1
    fs = list(f) + [FracQSeries.zero()] * max(0, xo - len(f))
    F = JacobiLikeForm(tuple(qs_scale(fs[m], Fraction(1, factorial(m))) for m in range(xo)), Fraction(0), Fraction(0))
    prod_form = jl_mul(jl_mul(jl_theta(L, v, xo, q_order), jl_E2exp(-1, xo, q_order, e2_scale)), F)
    e2 = qs_scale(eisenstein_E(2, q_order), e2_scale)
    for ell in range(xo):
        direct = FracQSeries.zero()
        for m in range(ell + 1):
            th = qs_scale(theta_vm(L, v, 2 * m, q_order), Fraction(2 ** m, factorial(2 * m)))
            for n in range(ell - m + 1):
                r = ell - m - n
                term = qs_mul(qs_mul(th, qs_scale(qs_pow(e2, n), Fraction(1, factorial(n)))),
                              qs_scale(fs[r], Fraction(1, factorial(r))))
                direct = qs_add(direct, term)
        cmp = compare_series(prod_form.coeffs[ell], direct) if not (direct.is_zero and prod_form.coeffs[ell].is_zero) \
            else SeriesComparison(True, None, None)
        report.add(f"X^{ell}", cmp.equal, "" if cmp.equal else f"first mismatch at q^{cmp.first_mismatch}")
    return report


def _restricted_matching_sum(factors: list, lam_scale, order: int) -> FracQSeries:
    """Matchings of ``factors`` in which no two n = 1 factors are paired together."""
    total = FracQSeries.zero()
    for sigma in fixed_point_free_involutions(range(len(factors))):
        if any(factors[r][1] == 1 and factors[s][1] == 1 for r, s in sigma.pairs):
            continue
        term = _unit(order)
        for r, s in sigma.pairs:
            term = qs_mul(term, qs_scale(eisenstein_hat("Ehat", factors[r][1], factors[s][1], order), lam_scale))
        total = qs_add(total, term)
    return total


def reorganization_inputs(word: BracketWord, L: EvenLattice, q_order: int) -> tuple:
    """The forms f_r that turn eta^k G(u) into a Jacobi-like X-coefficient.

    Returns ``(h, lam, ell, fs)`` with ``h`` the common factor vector,
    ``lam = (h, h)``, ``ell`` the number of n_j = 1 factors and
    ``fs[r] = r! 2^r S_r / c!`` where ``S_r`` sums the pairings of the
    remaining factors with ``c = 2r + (ell mod 2)`` weight-one factors left
    unpaired among themselves.
    """
    if L.rank != 1:
        raise ValueError("the reorganization is implemented for rank-one lattices")
    vecs = {v for v, _ in word.factors}
    if len(vecs) > 1:
        raise ValueError("all factors must use the same vector")
    h = next(iter(vecs)) if vecs else (Fraction(1),)
    lam = pairing(h, h, L.gram)
    ell = sum(1 for _, n in word.factors if n == 1)
    odd = ell % 2
    others = [(h, n) for _, n in word.factors if n != 1]
    fs = []
    for r in range(ell // 2 + 1):
        c = 2 * r + odd
        S = _restricted_matching_sum([(h, 1)] * c + others, lam, q_order)
        fs.append(qs_scale(S, Fraction(factorial(r) * 2 ** r, factorial(c))))
    return h, lam, ell, fs


def g_series_reorganization(word: BracketWord, L: EvenLattice, q_order: int) -> tuple[FracQSeries, FracQSeries]:
    """Both sides of eta^k G(u) = l!/2^{l'} [X^{l'}] Theta_L(h) Etilde(-X) F for a rank-one word.

    All factors must share one vector ``h``; ``l`` is the number of n_j = 1
    factors and ``l' = l // 2``.  Returns (lhs, rhs).
    """
    h, lam, ell, fs = reorganization_inputs(word, L, q_order)
    lp = ell // 2
    lhs = qs_mul(g_series(word, L, q_order), qs_pow(eta(q_order), L.rank))
    xo = lp + 1
    F = JacobiLikeForm(tuple(qs_scale(fs[m], Fraction(1, factorial(m))) for m in range(xo)), Fraction(0), Fraction(0))
    prod_form = jl_mul(jl_mul(jl_theta(L, h, xo, q_order), jl_E2exp(-1, xo, q_order, lam)), F)
    rhs = qs_scale(prod_form.coeffs[lp], Fraction(factorial(ell), 2 ** lp))
    return lhs, rhs


# ------------------------------------------------------------- modularity

def modularity_matrices(level: int, extra: int = 3, seed: int = 0, bound: int = 50) -> list[tuple]:
    """(1 1; 0 1), (1 0; N 1) and ``extra`` random Gamma_0(N) elements with c = +-N."""
    mats = [(1, 1, 0, 1), (1, 0, level, 1)]
    rng = random.Random(seed)
    while len(mats) < 2 + extra:
        c = level * rng.choice((1, -1))
        d = rng.randint(-bound, bound)
        if d == 0 or gcd(c, d) != 1:
            continue
        # solve a d - b c = 1
        g, x, y = _egcd(d, -c)
        a, b = x, y
        t = rng.randint(-3, 3)
        a, b = a + t * c, b + t * d
        if max(abs(a), abs(b)) > bound:
            continue
        mats.append((a, b, c, d))
    return mats


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a > 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


_T_SAMPLES = [complex(x, y) for x in (0, 1 / 3, -1 / 3, 1 / 7, -1 / 7) for y in (0.9, 1.1, 1.7)]
_ST_GRID = [(s, t) for s in (-0.3, 0.0, 0.3) for t in (0.9, 1.0, 1.1)]


def _sample_points(mat: tuple, count: int) -> list[complex]:
    a, b, c, d = mat
    if c == 0:
        return _T_SAMPLES[:count]
    # tau = (-d + s)/c + i t/|c| gives |c tau + d|^2 = s^2 + t^2 and
    # Im(tau) = Im(gamma tau)*(s^2 + t^2) both near 1/|c|
    return [complex((-d + s) / c, t / abs(c)) for s, t in _ST_GRID][:count]


def _mp_eval(s: FracQSeries, tau) -> mpmath.mpc:
    if s.is_zero:
        return mpmath.mpc(0)
    q = mpmath.exp(2j * mpmath.pi * tau)
    total = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    for c in s.coeffs:
        if c:
            total += mpmath.mpf(c.numerator) / c.denominator * qn
        qn *= q
    return total * mpmath.exp(2j * mpmath.pi * tau * mpmath.mpf(s.lead_exp.numerator) / s.lead_exp.denominator)


def numeric_modularity_check(series: FracQSeries, weight, level: int, samples: int = 9, tol: float = 1e-8,
                             correction: FracQSeries | None = None, min_im: float = 0.2,
                             matrices: list | None = None, label: str = "f") -> VerificationReport:
    """Compare |f(gamma tau)| with |c tau + d|^K |f(tau)| for gamma in Gamma_0(N).

    With ``correction`` h the checked function is f + h/(4 pi Im tau), the
    completion of a form that is quasimodular through one power of E_2.
    """
    weight = mpmath.mpf(Fraction(weight).numerator) / Fraction(weight).denominator
    mats = matrices or modularity_matrices(level)
    report = VerificationReport(f"modularity {label}", {"weight": weight, "level": level, "tol": tol,
                                                        "samples": samples, "order": series.order})
    mpmath.mp.dps = 30

    def value(tau):
        v = _mp_eval(series, tau)
        if correction is not None:
            v += _mp_eval(correction, tau) / (4 * mpmath.pi * mpmath.im(tau))
        return v

    for mat in mats:
        a, b, c, d = mat
        if a * d - b * c != 1 or c % level:
            raise ValueError(f"{mat} is not in Gamma_0({level})")
        worst = mpmath.mpf(0)
        for tau in _sample_points(mat, samples):
            tau = mpmath.mpc(tau)
            image = (a * tau + b) / (c * tau + d)
            if mpmath.im(tau) < min_im or mpmath.im(image) < min_im:
                raise ValueError("evaluation region too close to real axis for truncation guarantee")
            lhs = abs(value(image))
            rhs = abs(c * tau + d) ** weight * abs(value(tau))
            worst = max(worst, abs(lhs - rhs))
        report.add(f"gamma={mat}", worst < tol, f"max deviation {mpmath.nstr(worst, 3)}")
    return report


# ---------------------------------------------------------------- elliptic

def elliptic_suite(z_order: int = 10, q_order: int = 20, points: int = 10, tol: float = 1e-8,
                   seed: int = 1) -> VerificationReport:
    report = VerificationReport("elliptic", {"z_order": z_order, "q_order": q_order, "points": points, "tol": tol})
    # exact statements on the Laurent coefficients
    for m in range(5):
        for name, fn in (("P1", p1_series), ("Q1", q1_series)):
            s = fn(m, z_order, q_order)
            wrong = [d for d in s.exponents() if (d % 2 == 0) == (m % 2 == 0)]
            report.add(f"{name}^({m}) parity", not wrong, f"bad exponents {wrong}" if wrong else "")
        p = p1_series(m, z_order, q_order)
        rhs = zl_add(zl_scale(zl_rescale_tau(p, 2, q_order), 2), zl_scale(p, -1))
        lhs = q1_series(m, z_order, q_order)
        same = all(compare_series(lhs.coeff(d), rhs.coeff(d)).equal for d in range(-(m + 1), z_order + 1))
        report.add(f"Q1^({m}) = 2 P1^({m})(2tau) - P1^({m})(tau)", same)
    rng = random.Random(seed)
    for i in range(points):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 1.7))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        m = i % 3
        pl, _ = p1_lambert_eval(z, tau, m)
        ql, _ = q1_lambert_eval(z, tau, m)
        pz = zl_eval(p1_series(m, 14, 30), z, tau)
        qz = zl_eval(q1_series(m, 14, 30), z, tau)
        report.add(f"P1^({m}) Lambert = Laurent at z={z:.3f}, tau={tau:.3f}", abs(pl - pz) < tol, f"{abs(pl - pz):.2e}")
        report.add(f"Q1^({m}) Lambert = Laurent at z={z:.3f}, tau={tau:.3f}", abs(ql - qz) < tol, f"{abs(ql - qz):.2e}")
        pt = p1_theta_eval(z, tau, m)
        report.add(f"P1^({m}) Lambert = theta at z={z:.3f}", abs(pl - pt) < tol, f"{abs(pl - pt):.2e}")
        sgn = (-1) ** (m + 1)
        for name, fn, val in (("P1", p1_lambert_eval, pl), ("Q1", q1_lambert_eval, ql)):
            par = abs(fn(-z, tau, m)[0] - sgn * val)
            report.add(f"{name}^({m})(-z) = {sgn:+d} {name}^({m})(z) at z={z:.3f}", par < tol, f"{par:.2e}")
        # shift by 2 pi i tau: choose a point whose image stays in the Lambert strip
        w = complex(mpmath.pi * tau.imag, z.imag)
        shifted = w + 2j * mpmath.pi * tau
        anti = abs(q1_lambert_eval(shifted, tau, m)[0] + q1_lambert_eval(w, tau, m)[0])
        report.add(f"Q1^({m})(z + 2 pi i tau) = -Q1^({m})(z)", anti < tol, f"{anti:.2e}")
        jump = p1_lambert_eval(shifted, tau, m)[0] - p1_lambert_eval(w, tau, m)[0]
        expect = 1 if m == 0 else 0
        report.add(f"P1^({m})(z + 2 pi i tau) = P1^({m})(z) + {expect}", abs(jump - expect) < tol,
                   f"{abs(jump - expect):.2e}")
        per = abs(q1_theta_eval(z + 4j * mpmath.pi * tau, tau, m) - q1_theta_eval(z, tau, m))
        report.add(f"Q1^({m})(z + 4 pi i tau) = Q1^({m})(z)", per < tol, f"{per:.2e}")
        per2 = abs(q1_theta_eval(z + 2j * mpmath.pi, tau, m) - q1_theta_eval(z, tau, m))
        report.add(f"Q1^({m})(z + 2 pi i) = Q1^({m})(z)", per2 < tol, f"{per2:.2e}")
    return report
