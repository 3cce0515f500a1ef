"""Exhaustive searches and the certified end-to-end order-4 pipeline.

The pipeline resolves F_m = +-F_n for the order-4 sequence over all integer
pairs: an elementary chain boxes the both-negative case, a linear-form
lower bound caps |n| near 2.3e19 in the mixed case, two Baker-Davenport
passes shrink that cap to 226, and one exhaustive search of the final box
lists the solutions.  Every analytic exclusion is recorded as a certificate
with outward-rounded ball endpoints, and re-checked by seeded random
sampling inside the excluded regions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .balls import DEFAULT_PREC, RBall
from .charpoly import RootProfile, compute_roots, dominance_constants
from .linforms import (
    crossing_bound,
    deweger_factor,
    matveev_exponent,
    mixed_sign_instance,
)
from .reduction import BDInstance, bd_iterate
from .sequence import kfib, kfib_window

# Historical reduction choices being replayed: the first pass of the
# published two-stage reduction used this convergent denominator of kappa
# (any q > M is admissible; the smallest would give a different, equally
# valid bound chain), with the constants A and B rounded to the printed
# decimals below.
REPLAY_PASS1_MIN_Q = 66618036593827352256020
REPLAY_A = "9.14"
REPLAY_B = "1.056"
REPLAY_M = 10**20

# Historical index tabulations for the order-4 equation.  The index
# convention there is offset by one against the initialization used here
# (F_0 = 0, F_1 = 1); rows are |n| values for the negative branch and m
# values for the positive branch.
REFERENCE_NEG_ROWS = {0: (1, 2, 3, 5, 7, 11), 1: (4, 5, 10, 15), 8: (13, 16)}
REFERENCE_MIXED_M_ROWS = {1: (0, 1), 2: (2,), 4: (3,), 8: (5,), 56: (8,)}
REFERENCE_MIXED_NEG_ROWS = {1: (4, 5, 10, 15), 2: (8,), 4: (12,), 8: (13, 16), 56: (22,)}
REFERENCE_MAX_INDEX = 22


# ---------------------------------------------------------------------------
# exhaustive scans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScanResult:
    k: int
    lo: int
    hi: int
    repeats_only: bool
    classes: dict  # |value| -> sorted tuple of indices n with |F_n| = |value|

    def verify(self) -> None:
        for c, indices in self.classes.items():
            for n in indices:
                if abs(kfib(self.k, n)) != c:
                    raise AssertionError(f"class {c} fails at index {n}")


def repeats_scan(k: int, lo: int, hi: int, repeats_only: bool = False) -> ScanResult:
    """Group indices in [lo, hi] by |F_n|; optionally keep classes with >= 2."""
    window = kfib_window(k, lo, hi)
    classes: dict = {}
    for n, v in zip(range(lo, hi + 1), window.values):
        classes.setdefault(abs(v), []).append(n)
    if repeats_only:
        classes = {c: idx for c, idx in classes.items() if len(idx) >= 2}
    result = ScanResult(k=k, lo=lo, hi=hi, repeats_only=repeats_only,
                        classes={c: tuple(sorted(idx)) for c, idx in sorted(classes.items())})
    result.verify()
    return result


@dataclass(frozen=True)
class MatchResult:
    k: int
    l: int
    m_range: tuple
    n_range: tuple
    matches: tuple  # (m, n, c, sign) with F_m^(k) = sign * F_n^(l) = c

    def value_classes(self) -> tuple:
        return tuple(sorted({abs(c) for _m, _n, c, _s in self.matches}))

    def by_class(self) -> dict:
        out: dict = {}
        for m, n, c, s in self.matches:
            out.setdefault(abs(c), []).append((m, n, c, s))
        return {c: tuple(v) for c, v in sorted(out.items())}

    def verify(self) -> None:
        for m, n, c, s in self.matches:
            if kfib(self.k, m) != c or c != s * kfib(self.l, n):
                raise AssertionError(f"match ({m}, {n}, {c}, {s}) fails recomputation")


def pm_intersection(k: int, l: int, m_range: tuple, n_range: tuple) -> MatchResult:
    """All (m, n) with F_m^(k) = +-F_n^(l), by a hash-on-|value| merge."""
    m_lo, m_hi = int(m_range[0]), int(m_range[1])
    n_lo, n_hi = int(n_range[0]), int(n_range[1])
    left = kfib_window(k, m_lo, m_hi)
    right = kfib_window(l, n_lo, n_hi)
    by_abs: dict = {}
    for n, v in zip(range(n_lo, n_hi + 1), right.values):
        by_abs.setdefault(abs(v), []).append((n, v))
    matches = []
    for m, vm in zip(range(m_lo, m_hi + 1), left.values):
        for n, vn in by_abs.get(abs(vm), ()):
            if vm == 0 and vn == 0:
                matches.append((m, n, 0, 1))
            elif vm == vn:
                matches.append((m, n, vm, 1))
            elif vm == -vn:
                matches.append((m, n, vm, -1))
    matches.sort(key=lambda t: (abs(t[2]), t[0], t[1]))
    result = MatchResult(k=k, l=l, m_range=(m_lo, m_hi), n_range=(n_lo, n_hi),
                         matches=tuple(matches))
    result.verify()
    return result


def multiplicity(k: int, c: int, lo: int, hi: int) -> list:
    """All n in [lo, hi] with F_n^(k) = c (signed equality)."""
    window = kfib_window(k, lo, hi)
    return [n for n, v in zip(range(lo, hi + 1), window.values) if v == int(c)]


def _iroot(n: int, q: int):
    """Integer floor q-th root of n >= 0 and exactness flag."""
    if n < 0:
        raise ValueError("needs n >= 0")
    if n < 2:
        return n, True
    x = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    while x ** q > n:
        x -= 1
    while (x + 1) ** q <= n:
        x += 1
    return x, x ** q == n


@dataclass(frozen=True)
class PowerScanResult:
    k: int
    lo: int
    hi: int
    nontrivial: tuple  # (n, x, q) with F_n = x**q, |x| >= 2, q maximal
    trivial: tuple     # (n, value) with value in {0, 1, -1}


def power_scan(k: int, lo: int, hi: int) -> PowerScanResult:
    """Perfect powers F_n = x^q with q >= 2; 0 and +-1 reported separately."""
    window = kfib_window(k, lo, hi)
    nontrivial, trivial = [], []
    for n, v in zip(range(lo, hi + 1), window.values):
        if v in (0, 1, -1):
            trivial.append((n, v))
            continue
        av = abs(v)
        if av < 4:
            continue
        for q in range(av.bit_length() - 1, 1, -1):
            if v < 0 and q % 2 == 0:
                continue
            r, exact = _iroot(av, q)
            if exact and r >= 2:
                nontrivial.append((n, r if v > 0 else -r, q))
                break
    return PowerScanResult(k=k, lo=lo, hi=hi,
                           nontrivial=tuple(nontrivial), trivial=tuple(trivial))


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    name: str
    ok: bool
    lhs: str = ""
    relation: str = ""
    rhs: str = ""
    note: str = ""


def _cert_cmp(name: str, lhs: RBall, relation: str, rhs: RBall, note: str = "") -> Certificate:
    if relation == "<":
        ok = lhs.lt(rhs)
    elif relation == ">":
        ok = lhs.gt(rhs)
    elif relation == "<=":
        ok = lhs.upper() <= rhs.lower()
    elif relation == ">=":
        ok = lhs.lower() >= rhs.upper()
    else:
        raise ValueError(f"unknown relation {relation}")
    return Certificate(name=name, ok=ok,
                       lhs=f"[{lhs.lower_str()}, {lhs.upper_str()}]",
                       relation=relation,
                       rhs=f"[{rhs.lower_str()}, {rhs.upper_str()}]",
                       note=note)


# ---------------------------------------------------------------------------
# the both-negative elementary chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NegativePairBounds:
    """Search box for solutions with both indices negative.

    d_min bounds the index gap n - m, m_min the larger index, and
    n_min = d_min + m_min the smaller; all three are the published box,
    re-derived from certified root data rather than the printed constants.
    """

    d_min: int
    m_min: int
    n_min: int
    constants: dict
    certificates: tuple


def negative_pair_bounds(profile4: RootProfile, prec: int = DEFAULT_PREC) -> NegativePairBounds:
    if profile4.k != 4:
        raise ValueError("needs the order-4 profile")
    a2_abs = profile4.moduli[1]
    a4_abs = profile4.moduli[3]
    g1_over_g4 = abs(profile4.weights[0]) / abs(profile4.weights[3])
    g2_over_g4 = abs(profile4.weights[1]) / abs(profile4.weights[3])
    certs = []

    # gap chain: |a4|^d <= C2 |a2|^d + C0 must hold for a solution with
    # gap d = n - m <= -1; it fails from d_min downward
    ratio_pow = (a2_abs / a4_abs).pow_int(-3)  # |a2/a4|^(m-1) <= this for m <= -2
    c2 = 2 * ratio_pow * g2_over_g4
    c0 = c2 + 2 * g1_over_g4 + 1
    d = -1
    while True:
        lhs = a4_abs.pow_int(d)
        rhs = c2 * a2_abs.pow_int(d) + c0
        if lhs.gt(rhs):
            break
        if d < -200:
            raise ArithmeticError("gap chain did not close")
        d -= 1
    d_min = d
    certs.append(_cert_cmp("gap_excluded_at_d_min", a4_abs.pow_int(d_min), ">",
                           c2 * a2_abs.pow_int(d_min) + c0,
                           note=f"d_min = {d_min}"))
    certs.append(_cert_cmp("gap_open_above_d_min", a4_abs.pow_int(d_min + 1), "<",
                           c2 * a2_abs.pow_int(d_min + 1) + c0))

    # magnitude chain: c_low |a4|^(m-1) <= C2m |a2|^(m-1) + C0m for solutions
    c_low = a4_abs.pow_int(-1) - 1
    c2m = 2 * g2_over_g4 * (a2_abs.pow_int(d_min) + 1)
    c0m = 2 * g1_over_g4
    m = -2
    while True:
        lhs = c_low * a4_abs.pow_int(m - 1)
        rhs = c2m * a2_abs.pow_int(m - 1) + c0m
        if lhs.gt(rhs):
            break
        if m < -500:
            raise ArithmeticError("magnitude chain did not close")
        m -= 1
    m_min = m + 1
    certs.append(_cert_cmp("magnitude_excluded_below_m_min",
                           c_low * a4_abs.pow_int(m_min - 2), ">",
                           c2m * a2_abs.pow_int(m_min - 2) + c0m,
                           note=f"m_min = {m_min}"))
    certs.append(_cert_cmp("magnitude_open_at_m_min",
                           c_low * a4_abs.pow_int(m_min - 1), "<",
                           c2m * a2_abs.pow_int(m_min - 1) + c0m))

    n_min = d_min + m_min
    constants = {
        "pair_damping": ratio_pow,      # printed chain rounds this to 0.85
        "pair_coefficient": c2,         # printed 1.65
        "gap_offset": c0,               # printed 10.23
        "unit_gap_floor": c_low,        # printed 0.29
        "magnitude_coefficient": c2m,   # printed 41.2
        "magnitude_offset": c0m,        # printed 7.6
    }
    return NegativePairBounds(d_min=d_min, m_min=m_min, n_min=n_min,
                              constants=constants, certificates=tuple(certs))


# ---------------------------------------------------------------------------
# tail inequalities feeding the mixed-sign chain
# ---------------------------------------------------------------------------

def tail_lower_threshold(profile4: RootProfile, prec: int = DEFAULT_PREC):
    """Least nu with |F_(-nu)| > 0.096 |a4|^(-0.786 nu) certified, plus the
    growth certificate making it hold for every larger nu.

    The validity range stated alongside the printed inequality points the
    wrong way; this derives the threshold from the certified constants.
    """
    a4_abs = profile4.moduli[3]
    dom = dominance_constants(4, prec)
    c_ratio = abs(profile4.weights[3]) / a4_abs
    b0 = (RBall.from_decimal("0.214", prec) * -(a4_abs.log())).exp()
    # residual exponent mismatch delta - 0.786 (tiny, positive)
    r = ((dom.delta - RBall.from_decimal("0.786", prec)) * -(a4_abs.log())).exp()
    floor_val = RBall.from_decimal("0.096", prec)
    nu = 1
    while nu < 1000:
        first = c_ratio * b0.pow_int(nu)
        second = dom.c1 * r.pow_int(nu)
        if (first - second).gt(floor_val) and first.gt(second) and b0.gt(r):
            break
        nu += 1
    else:
        raise ArithmeticError("tail threshold search did not close")
    certs = (
        _cert_cmp("tail_floor_at_threshold", first - second, ">", floor_val,
                  note=f"threshold nu = {nu}"),
        _cert_cmp("tail_growth_dominates", b0, ">", r,
                  note="first term outgrows second, so positivity persists"),
    )
    return nu, certs


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PipelineReport:
    precision: int
    case2_bounds: tuple            # (d_min, m_min, n_min)
    negative_scan: ScanResult
    matveev_coefficient: RBall     # coefficient of (1 + log B)
    matveev_bound: int             # replayed crossing for |n|
    sound_bound_nu: int            # certified crossing for nu = |n| + 1
    reduction_trace: tuple
    final_search_bound: int
    solutions: MatchResult         # mixed-sign branch, m >= 1 > n
    all_matches: MatchResult       # full final box
    max_abs_index: int
    reference_max_index: int
    certificates: tuple
    notes: tuple
    certified: bool


def _sample_excluded_regions(case2: NegativePairBounds, bound: int, seed: int = 20240) -> Certificate:
    """Seeded spot-checks: no solutions hide in the analytically excluded
    regions (tail |n| > bound against the positive branch; gap region for
    negative pairs)."""
    rng = random.Random(seed)
    # mixed tail: |n| in (bound, 5000], compare against the increasing branch
    # (F_2100 already exceeds every |F_n| with |n| <= 5000)
    top = 2100
    pos_vals = kfib_window(4, 0, top).values
    for _ in range(100):
        n = -rng.randint(bound + 1, 5000)
        v = abs(kfib(4, n))
        lo_i, hi_i = 0, top
        while lo_i < hi_i:  # first m with F_m >= v
            mid = (lo_i + hi_i) // 2
            if pos_vals[mid] < v:
                lo_i = mid + 1
            else:
                hi_i = mid
        if lo_i <= top and pos_vals[lo_i] == v:
            return Certificate(name="sampled_exclusions", ok=False,
                               note=f"unexpected match at n = {n}")
    # negative pairs beyond the certified gap
    for _ in range(100):
        m = -rng.randint(2, 200)
        d = -rng.randint(-case2.d_min + 1, 120)
        n = m + d
        if kfib(4, n) in (kfib(4, m), -kfib(4, m)):
            return Certificate(name="sampled_exclusions", ok=False,
                               note=f"unexpected negative pair ({m}, {n})")
    return Certificate(name="sampled_exclusions", ok=True,
                       note="200 seeded samples in excluded regions, no solutions")


def k4_pipeline(prec: int = DEFAULT_PREC) -> PipelineReport:
    """End-to-end certified resolution of F_m = +-F_n for order 4."""
    profile = compute_roots(4, prec)
    certs: list = []
    notes: list = []
    certs.append(Certificate(name="root_separation", ok=profile.separation_certified,
                             note="pairwise distinct moduli of non-conjugate roots"))

    # stage 1: both-negative box
    case2 = negative_pair_bounds(profile, prec)
    certs.extend(case2.certificates)
    neg_scan = repeats_scan(4, case2.n_min, 0, repeats_only=True)
    t1 = reference_row_comparison(neg_scan)
    notes.append(t1)

    # stage 2: mixed-sign instance and its checkpoint values
    ms = mixed_sign_instance(profile, prec)
    for name, ok in ms.checks:
        certs.append(Certificate(name=f"instance_{name}", ok=ok))
    coeff = matveev_exponent(ms.matveev, prec)
    printed_coeff = Fraction(284, 100) * 10 ** 16
    rel = abs(coeff.mid() - printed_coeff) / printed_coeff
    certs.append(Certificate(name="matveev_coefficient_checkpoint",
                             ok=rel < Fraction(1, 200),
                             lhs=coeff.mid_str(10), relation="~", rhs="2.84e16",
                             note="within 0.5 percent"))

    # tail inequalities that make the mixed-sign chain valid from nu = 226 on
    nu_threshold, tail_certs = tail_lower_threshold(profile, prec)
    certs.extend(tail_certs)
    notes.append("tail floor valid for all n <= -%d (printed validity range "
                 "points the wrong way and is re-derived)" % nu_threshold)
    certs.extend(_mixed_chain_certificates(profile, prec))

    # stage 3: crossing.  Replayed: printed slope/intercept/coefficient.
    matveev_bound = crossing_bound("0.0546", "1.648", printed_coeff, 0, prec)
    t = Fraction(232, 100) * 10 ** 19
    certs.append(Certificate(name="crossing_checkpoint",
                             ok=abs(Fraction(matveev_bound) - t) / t < Fraction(1, 100),
                             lhs=str(matveev_bound), relation="~", rhs="2.32e19",
                             note="within 1 percent"))
    # sound variant in nu = |n| + 1 with the full (1 + log B) factor
    sound_bound_nu = crossing_bound(
        ms.decay_slope,
        ms.decay_slope + ms.decay_intercept + coeff,
        coeff, 0, prec)
    certs.append(Certificate(name="reduction_M_covers_sound_bound",
                             ok=sound_bound_nu <= REPLAY_M,
                             lhs=str(sound_bound_nu), relation="<=", rhs=str(REPLAY_M)))

    # stage 4: two-stage reduction replay (then iterated to its fixpoint)
    inst = BDInstance(kappa=ms.kappa, mu=ms.mu,
                      A=RBall.from_decimal(REPLAY_A, prec),
                      B=RBall.from_decimal(REPLAY_B, prec), M=REPLAY_M)
    trace = bd_iterate(inst, prec, min_q_first=REPLAY_PASS1_MIN_Q)
    ok_pass1 = (len(trace) >= 1 and trace[0].q == REPLAY_PASS1_MIN_Q
                and trace[0].epsilon_lower.lower() >= Fraction(1, 25)
                and trace[0].new_bound in (1063, 1064))
    certs.append(Certificate(name="reduction_pass1_checkpoint", ok=ok_pass1,
                             note=f"q = {trace[0].q}, bound = {trace[0].new_bound}"))
    ok_pass2 = (len(trace) >= 2 and trace[1].q == 3336
                and trace[1].epsilon_lower.lower() >= Fraction(136, 1000)
                and trace[1].new_bound in (225, 226))
    certs.append(Certificate(name="reduction_pass2_checkpoint", ok=ok_pass2,
                             note=f"q = {trace[1].q}, bound = {trace[1].new_bound}"
                             if len(trace) >= 2 else "trace too short"))

    # stage 5: exhaustive search of the pinned final box
    final_bound = 226
    all_matches = pm_intersection(4, 4, (-final_bound, final_bound),
                                  (-final_bound, final_bound))
    solutions = MatchResult(
        k=4, l=4, m_range=(1, final_bound), n_range=(-final_bound, -1),
        matches=tuple(t for t in all_matches.matches if t[0] >= 1 and t[1] <= -1))
    solutions.verify()
    nontrivial = [t for t in all_matches.matches if t[0] != t[1]]
    max_abs_index = max(max(abs(m), abs(n)) for m, n, _c, _s in nontrivial)
    notes.append("largest index among nontrivial solutions is %d; the "
                 "historical tabulation reports %d under its one-shifted "
                 "index convention" % (max_abs_index, REFERENCE_MAX_INDEX))
    notes.append(reference_mixed_comparison(solutions))

    certs.append(_sample_excluded_regions(case2, final_bound))

    certified = all(c.ok for c in certs)
    return PipelineReport(
        precision=prec,
        case2_bounds=(case2.d_min, case2.m_min, case2.n_min),
        negative_scan=neg_scan,
        matveev_coefficient=coeff,
        matveev_bound=matveev_bound,
        sound_bound_nu=sound_bound_nu,
        reduction_trace=tuple(trace),
        final_search_bound=final_bound,
        solutions=solutions,
        all_matches=all_matches,
        max_abs_index=max_abs_index,
        reference_max_index=REFERENCE_MAX_INDEX,
        certificates=tuple(certs),
        notes=tuple(notes),
        certified=certified,
    )


def _mixed_chain_certificates(profile: RootProfile, prec: int):
    """Certified inequalities that make the mixed-sign chain airtight for
    nu = |n| + 1 >= 226, including domination of the replayed reduction
    instance by the sound one."""
    certs = []
    a1 = profile.dominant_root()
    a4_abs = profile.moduli[3]
    dom = dominance_constants(4, prec)
    one = RBall.from_int(1, prec)
    half = RBall.from_fraction(Fraction(1, 2), prec)

    # residual + 1/2 still below the full power: (1 - c1)|a4|^(delta n) > 1/2
    # at n = -225, and the left side grows as n decreases
    growth = (dom.delta * -(a4_abs.log()) * 225).exp()
    certs.append(_cert_cmp("half_absorbed_at_edge", (one - dom.c1) * growth, ">", half))

    # solutions with |n| >= 226 have m < |n|: the positive branch already
    # exceeds every negative-branch magnitude at equal index
    nu = 226
    lb_pos = abs(profile.weights[0]) * a1.pow_int(nu - 1) - half
    ub_neg = abs(profile.weights[3]) * a4_abs.pow_int(-nu - 1) \
        + dom.c1 * (dom.delta * -(a4_abs.log()) * nu).exp()
    certs.append(_cert_cmp("m_below_abs_n_at_edge", ub_neg, "<", lb_pos))
    certs.append(_cert_cmp("m_below_abs_n_growth", a1, ">", a4_abs.pow_int(-1),
                           note="positive branch outgrows the negative one"))

    # sound linear-form bound A_s B_s^-nu dominates the replayed printed
    # instance A_p B_p^-nu on nu >= 226
    b_s = ((one - dom.delta) * -(a4_abs.log())).exp()
    c_f = a4_abs / abs(profile.weights[3])
    a_edge = c_f * b_s * b_s.pow_int(-226)
    dw = deweger_factor(RBall.from_fraction(a_edge.upper(), prec))
    a_s = dw * c_f * b_s / a1.log()
    a_p = RBall.from_decimal(REPLAY_A, prec)
    b_p = RBall.from_decimal(REPLAY_B, prec)
    certs.append(_cert_cmp("replay_base_below_sound_base", b_p, "<", b_s))
    certs.append(_cert_cmp("replay_dominates_sound_at_edge",
                           a_s * b_s.pow_int(-226), "<", a_p * b_p.pow_int(-226),
                           note="with the base ordering this extends to all nu >= 226"))
    return certs


def reference_row_comparison(scan: ScanResult) -> str:
    parts = []
    for c, printed in REFERENCE_NEG_ROWS.items():
        oracle = tuple(sorted(-n for n in scan.classes.get(c, ())))
        shifted = tuple(v + 1 for v in oracle)
        if shifted == printed:
            parts.append(f"class {c}: matches after one-index shift")
        else:
            extra = sorted(set(printed) ^ set(shifted))
            parts.append(f"class {c}: one-index shift with mismatches {extra}")
    return ("negative-branch repeat classes vs historical rows (those use a "
            "one-shifted index convention): " + "; ".join(parts))


def reference_mixed_comparison(solutions: MatchResult) -> str:
    by_class = solutions.by_class()
    parts = []
    for c, printed_neg in REFERENCE_MIXED_NEG_ROWS.items():
        oracle_neg = tuple(sorted({-n for _m, n, _c, _s in by_class.get(c, ())}))
        shifted = tuple(v + 1 for v in oracle_neg)
        tag = "shifted match" if shifted == printed_neg else f"mismatch {shifted} vs {printed_neg}"
        oracle_m = tuple(sorted({m for m, _n, _c, _s in by_class.get(c, ())}))
        printed_m = REFERENCE_MIXED_M_ROWS[c]
        m_tag = "m row matches as printed" if oracle_m == printed_m else \
            f"m row printed {printed_m} vs oracle {oracle_m}"
        parts.append(f"class {c}: negative row {tag}; {m_tag}")
    return "mixed-sign solutions vs historical rows: " + "; ".join(parts)
