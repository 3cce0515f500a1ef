"""The polynomial family T_k and certified analysis of its roots.

T_k(x) = x^k - x^(k-1) - ... - x - 1 is a Pisot polynomial: one real root
alpha_1 in (2(1 - 2^-k), 2) and k-1 roots inside the unit disc.  For even k
the minimal-modulus root is real and negative, tied to the unique root
lambda of x^(k+1) - 2x - 1 in (1, 2) through lambda * alpha_kk = -1.

Root enclosures are produced by Newton refinement from double-precision
eigenvalue estimates and then certified with a Krawczyk test in rectangle
arithmetic: K(B) = c - Y f(c) + (1 - Y f'(B)) (B - c) with K(B) strictly
inside B proves B contains exactly one simple root.  Rectangles centered on
the real axis are self-conjugate, so uniqueness plus conjugation symmetry
certifies realness.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .balls import (
    CBall,
    CertificationError,
    DEFAULT_PREC,
    MAX_PREC,
    PrecisionError,
    RBall,
    ball_from_json,
    ball_to_json,
    cball_from_json,
    cball_to_json,
)
from .intpoly import IntPoly

PROFILE_DOC_VERSION = 1


# ---------------------------------------------------------------------------
# polynomial family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyPolys:
    """T_k, f_k = T_k (x-1), the index-reversal x^k T_k(1/x), and for even k
    the trinomial x^(k+1) - 2x - 1 whose root in (1,2) is -1/alpha_kk."""

    k: int
    T: IntPoly
    f: IntPoly
    reversed: IntPoly
    aux: IntPoly | None


def charpoly(k: int) -> IntPoly:
    return IntPoly(tuple([-1] * k + [1]))


def family_polys(k: int) -> FamilyPolys:
    k = int(k)
    if k < 2:
        raise ValueError("order k must be >= 2")
    T = charpoly(k)
    f = T * IntPoly((-1, 1))
    expected_f = IntPoly(tuple([1] + [0] * (k - 1) + [-2, 1]))
    if f != expected_f:
        raise CertificationError("T_k (x-1) failed the closed-form check")
    rev = IntPoly(tuple([1] + [-1] * k))
    aux = None
    if k % 2 == 0:
        aux = IntPoly(tuple([-1, -2] + [0] * (k - 1) + [1]))
    return FamilyPolys(k=k, T=T, f=f, reversed=rev, aux=aux)


def dresden_weight(k: int, x):
    """g_k(x) = (x - 1) / (2 + (k+1)(x - 2)); Binet coefficient at a root."""
    return (x - 1) / ((k + 1) * x - 2 * k)


# ---------------------------------------------------------------------------
# certified root finding for a general integer polynomial
# ---------------------------------------------------------------------------

def _point_rball(m, prec) -> RBall:
    return RBall((m, m), prec)


def _point_cball(re_mpf, im_mpf, prec) -> CBall:
    return CBall((( re_mpf, re_mpf), (im_mpf, im_mpf)), prec)


def _cball_center(z: CBall) -> CBall:
    return _point_cball(z.real().mid_mpf(), z.imag().mid_mpf(), z.prec)


def _abs_upper(z: CBall) -> Fraction:
    return abs(z).upper()


def _newton_refine(poly: IntPoly, dpoly: IntPoly, z0: complex, prec: int,
                   force_real: bool) -> tuple[CBall, Fraction]:
    """Polish a double-precision estimate; returns (point, last step size)."""
    z = CBall.from_fractions(Fraction(float(z0.real)),
                             Fraction(0) if force_real else Fraction(float(z0.imag)),
                             prec)
    tol = Fraction(1, 2 ** (prec + 16))
    step_size = Fraction(1)
    for _ in range(200):
        dval = dpoly(z)
        if dval.contains_zero():
            raise PrecisionError("derivative enclosure contains zero during refinement")
        step = poly(z) / dval
        z_next = z - step
        if force_real:
            z = _point_cball(z_next.real().mid_mpf(), RBall.from_int(0, prec).v[0], prec)
        else:
            z = _cball_center(z_next)
        step_size = _abs_upper(step)
        if step_size <= tol * (1 + _abs_upper(z)):
            break
    return z, step_size


def _krawczyk_once(poly: IntPoly, dpoly: IntPoly, box: CBall, prec: int) -> CBall | None:
    center = _cball_center(box)
    dc = dpoly(center)
    if dc.contains_zero():
        return None
    one = CBall.from_int(1, prec)
    y = _cball_center(one / dc)
    k_img = center - y * poly(center) + (one - y * dpoly(box)) * (box - center)
    if k_img.strictly_inside(box):
        return k_img
    return None


def _certify_root(poly: IntPoly, dpoly: IntPoly, point: CBall, step_size: Fraction,
                  prec: int, force_real: bool) -> CBall:
    re_mid, im_mid = point.mid_fractions()
    scale = 1 + abs(re_mid) + abs(im_mid)
    rad = max(step_size * 16, scale / 2 ** (prec - 16), Fraction(1, 2 ** (2 * prec)))
    for _ in range(10):
        box = CBall.from_re_im(
            RBall.from_midrad(re_mid, rad, prec),
            RBall.from_midrad(Fraction(0) if force_real else im_mid, rad, prec),
        )
        k_img = _krawczyk_once(poly, dpoly, box, prec)
        if k_img is not None:
            # one extra contraction pass tightens the enclosure
            tighter = _krawczyk_once(poly, dpoly, k_img, prec)
            result = tighter if tighter is not None else k_img
            if force_real:
                # box is self-conjugate and holds exactly one root, which is
                # therefore fixed by conjugation: real
                zero = RBall.from_int(0, prec)
                return CBall.from_re_im(result.real(), zero * zero)
            return result
        rad *= 64
    raise PrecisionError("Krawczyk certification failed at this precision")


def _initial_estimates(poly: IntPoly):
    cs = [float(c) for c in reversed(poly.coeffs)]
    return np.roots(cs)


def certified_roots(poly: IntPoly, prec: int = DEFAULT_PREC) -> list[CBall]:
    """Certified enclosures of all complex roots of a squarefree poly.

    Each returned rectangle provably contains exactly one simple root, the
    rectangles are pairwise disjoint, and non-real roots come in exact
    conjugate pairs (positive-imaginary member computed, mirror synthesized).
    Raises PrecisionError when separation or certification fails.
    """
    if poly.degree < 1:
        raise ValueError("constant polynomial has no roots")
    dpoly = poly.derivative()
    estimates = _initial_estimates(poly)
    scale = max(1.0, max(abs(e) for e in estimates))
    real_est = [complex(e) for e in estimates if abs(e.imag) <= 1e-7 * scale]
    upper_est = [complex(e) for e in estimates if e.imag > 1e-7 * scale]
    if len(real_est) + 2 * len(upper_est) != poly.degree:
        raise PrecisionError("could not split estimates into reals and conjugate pairs")
    balls: list[CBall] = []
    for est in real_est:
        pt, step = _newton_refine(poly, dpoly, est, prec, force_real=True)
        balls.append(_certify_root(poly, dpoly, pt, step, prec, force_real=True))
    for est in upper_est:
        pt, step = _newton_refine(poly, dpoly, est, prec, force_real=False)
        ball = _certify_root(poly, dpoly, pt, step, prec, force_real=False)
        if not ball.imag().is_positive():
            raise PrecisionError("imaginary part sign not certified")
        balls.append(ball)
        balls.append(ball.conj())
    for i in range(len(balls)):
        for j in range(i + 1, len(balls)):
            if not balls[i].disjoint(balls[j]):
                raise PrecisionError("root enclosures overlap")
    return balls


# ---------------------------------------------------------------------------
# certified, ordered root profile of T_k
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootProfile:
    """Roots of T_k ordered by certified nonincreasing modulus.

    Conjugate pairs share one modulus ball (identical object) and are listed
    positive-imaginary first.  weights[l] = g_k(roots[l]).
    """

    k: int
    precision: int
    roots: tuple
    weights: tuple
    moduli: tuple
    real_flags: tuple
    separation_certified: bool

    def dominant_root(self) -> RBall:
        return self.roots[0].real()

    def smallest_root(self) -> RBall:
        if self.k % 2 != 0:
            raise ValueError("minimal-modulus root is real only for even order")
        return self.roots[-1].real()

    def conjugate_pairs(self) -> list:
        seen = {}
        pairs = []
        for i, m in enumerate(self.moduli):
            if id(m) in seen:
                pairs.append((seen[id(m)], i))
            else:
                seen[id(m)] = i
        return pairs

    def is_conjugate_pair(self, i: int, j: int) -> bool:
        return self.moduli[i] is self.moduli[j] and i != j


def _build_profile(k: int, prec: int) -> RootProfile:
    fam = family_polys(k)
    balls = certified_roots(fam.T, prec)
    entries = []
    for ball in balls:
        is_real = ball.imag().lower() == 0 == ball.imag().upper()
        entries.append({"root": ball, "real": is_real, "modulus": None})
    # conjugate partners share one modulus ball
    used = set()
    for i, e in enumerate(entries):
        if i in used:
            continue
        if e["real"]:
            e["modulus"] = abs(e["root"])
            used.add(i)
            continue
        partner = None
        for j in range(i + 1, len(entries)):
            if j in used or entries[j]["real"]:
                continue
            if entries[j]["root"].real().overlaps(e["root"].real()) and \
               entries[j]["root"].imag().overlaps(-e["root"].imag()):
                partner = j
                break
        if partner is None:
            raise PrecisionError("conjugate pairing failed")
        m = abs(e["root"])
        e["modulus"] = m
        entries[partner]["modulus"] = m
        used.update((i, partner))
    entries.sort(key=lambda e: (-e["modulus"].mid(), -e["root"].imag().mid()))

    roots = tuple(e["root"] for e in entries)
    moduli = tuple(e["modulus"] for e in entries)
    real_flags = tuple(e["real"] for e in entries)
    weights = tuple(dresden_weight(k, r) for r in roots)

    _check_profile_invariants(k, prec, fam.T, roots, moduli, real_flags, weights)

    separation = True
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if moduli[i] is moduli[j]:
                continue
            if not moduli[i].disjoint(moduli[j]):
                separation = False
    return RootProfile(k=k, precision=prec, roots=roots, weights=weights,
                       moduli=moduli, real_flags=real_flags,
                       separation_certified=separation)


def _check_profile_invariants(k, prec, T, roots, moduli, real_flags, weights):
    prod = CBall.from_int(1, prec)
    tot = CBall.from_int(0, prec)
    for r in roots:
        prod = prod * r
        tot = tot + r
        through = T(r)
        if not through.contains_zero():
            raise CertificationError("root ball does not map to zero through T_k")
    const = (-1) ** k * (-1)
    if not (prod.real().contains(const) and prod.imag().contains_zero()):
        raise CertificationError("product of roots fails the constant-term check")
    if not (tot.real().contains(1) and tot.imag().contains_zero()):
        raise CertificationError("sum of roots fails the trace check")
    if not real_flags[0]:
        raise CertificationError("dominant root not certified real")
    dom = roots[0].real()
    lo = 2 * (1 - Fraction(1, 2 ** k))
    if not (RBall.from_fraction(lo, prec).lt(dom) and dom.lt(RBall.from_int(2, prec))):
        raise CertificationError("dominant root outside (2(1-2^-k), 2)")
    for w in weights:
        if w.contains_zero():
            raise CertificationError("a Dresden weight ball contains zero")


_profile_cache: dict = {}
_profile_lock = threading.Lock()


def compute_roots(k: int, prec: int = DEFAULT_PREC, retry: bool = True) -> RootProfile:
    """Certified RootProfile for T_k.

    With retry=True (default) the precision is doubled on certification
    failure up to MAX_PREC, after which a hard CertificationError is raised.
    With retry=False a failure raises a retryable PrecisionError.
    """
    k = int(k)
    if k < 2:
        raise ValueError("order k must be >= 2")
    key = (k, prec)
    with _profile_lock:
        if key in _profile_cache:
            return _profile_cache[key]
    p = prec
    while True:
        try:
            profile = _build_profile(k, p)
            break
        except PrecisionError:
            if not retry:
                raise
            if 2 * p > MAX_PREC:
                raise CertificationError(
                    f"root certification for k={k} failed up to {MAX_PREC} bits")
            p *= 2
    with _profile_lock:
        _profile_cache[key] = profile
    return profile


# ---------------------------------------------------------------------------
# derived certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmallestRootCertificate:
    k: int
    lam: RBall
    product_contains_minus_one: bool
    strictly_smallest: bool
    in_location_interval: bool

    @property
    def ok(self) -> bool:
        return (self.product_contains_minus_one and self.strictly_smallest
                and self.in_location_interval)


def smallest_root_check(k: int, prec: int = DEFAULT_PREC) -> SmallestRootCertificate:
    """lambda = the root of x^(k+1) - 2x - 1 in (1, 2), with certificates
    that lambda * alpha_kk contains -1 and alpha_kk is strictly minimal."""
    k = int(k)
    if k % 2 != 0:
        raise ValueError("defined for even order only")
    fam = family_polys(k)
    aux, daux = fam.aux, fam.aux.derivative()
    # exact sign change on (1, 2): aux(1) = -2, aux(2) = 2^(k+1) - 5
    if not (aux(1) < 0 < aux(2)):
        raise CertificationError("sign change on (1,2) missing")
    # initial estimate by float bisection
    lo, hi = 1.0, 2.0
    for _ in range(64):
        mid = (lo + hi) / 2
        v = 0.0
        for c in reversed(aux.coeffs):
            v = v * mid + c
        if v < 0:
            lo = mid
        else:
            hi = mid
    pt, step = _newton_refine(aux, daux, complex((lo + hi) / 2, 0.0), prec, force_real=True)
    lam_ball = _certify_root(aux, daux, pt, step, prec, force_real=True).real()
    if not (RBall.from_int(1, prec).lt(lam_ball) and lam_ball.lt(RBall.from_int(2, prec))):
        raise PrecisionError("lambda enclosure not inside (1,2)")

    profile = compute_roots(k, prec)
    alpha_min = profile.smallest_root()
    product = lam_ball * alpha_min
    strictly = all(profile.moduli[-1].lt(profile.moduli[i])
                   for i in range(k - 1) if profile.moduli[i] is not profile.moduli[-1])
    in_interval = (alpha_min.gt(RBall.from_int(-1, prec))
                   and alpha_min.lt(RBall.from_fraction(-Fraction(1, 3 ** k), prec)))
    return SmallestRootCertificate(
        k=k,
        lam=lam_ball,
        product_contains_minus_one=product.contains(-1),
        strictly_smallest=strictly,
        in_location_interval=in_interval,
    )


@dataclass(frozen=True)
class DominanceConstants:
    """c1 and delta of the negative-index dominance inequality
    |F_n - g_k(alpha_kk) alpha_kk^(n-1)| <= c1 |alpha_kk|^(delta n)."""

    k: int
    c1: RBall
    delta: RBall

    def validate(self) -> None:
        if not self.c1.is_positive():
            raise CertificationError("c1 not certified positive")
        zero, one = Fraction(0), Fraction(1)
        if not (self.delta.lower() > zero and self.delta.upper() < one):
            raise CertificationError("delta not certified inside (0, 1)")


def dominance_constants(k: int, prec: int = DEFAULT_PREC) -> DominanceConstants:
    k = int(k)
    if k % 2 != 0 or k <= 2:
        raise ValueError("defined for even order k > 2")
    profile = compute_roots(k, prec)
    c1 = abs(profile.weights[0])
    for j in range(1, k - 1):
        c1 = c1 + abs(profile.weights[j]) / profile.moduli[j]
    delta = profile.moduli[k - 2].log() / profile.moduli[k - 1].log()
    constants = DominanceConstants(k=k, c1=c1, delta=delta)
    constants.validate()
    return constants


@dataclass(frozen=True)
class OrderAssertion:
    name: str
    certified: bool
    note: str = ""


@dataclass(frozen=True)
class OrderReport:
    k_max: int
    assertions: tuple

    @property
    def all_certified(self) -> bool:
        return all(a.certified for a in self.assertions)


def cross_k_monotonicity(k_max: int, prec: int = DEFAULT_PREC) -> OrderReport:
    """Cross-order facts: minimal roots decrease along even orders, dominant
    roots increase with order, and alpha_k1 >= -1/alpha_(2l,2l) with equality
    exactly at order pair (2, 2)."""
    k_max = int(k_max)
    if k_max < 4 or k_max % 2 != 0:
        raise ValueError("k_max must be an even order >= 4")
    assertions = []
    profiles = {k: compute_roots(k, prec) for k in range(2, k_max + 1)}
    even = [k for k in range(2, k_max + 1) if k % 2 == 0]

    for a in even:
        for b in even:
            if a < b:
                ok = profiles[b].smallest_root().lt(profiles[a].smallest_root())
                assertions.append(OrderAssertion(
                    name=f"smallest_root_decreases[{a}<{b}]", certified=ok))
    for a in range(2, k_max + 1):
        for b in range(a + 1, k_max + 1):
            ok = profiles[b].dominant_root().gt(profiles[a].dominant_root())
            assertions.append(OrderAssertion(
                name=f"dominant_root_increases[{a}<{b}]", certified=ok))

    # xi_l = -1/alpha_(2l,2l); dominant roots never dip below any xi_l
    t2 = charpoly(2)
    golden_identity = (family_polys(2).aux == IntPoly((1, 1)) * t2)
    for order in even:
        xi = -(RBall.from_int(1, prec) / profiles[order].smallest_root())
        for k in range(2, k_max + 1):
            dom = profiles[k].dominant_root()
            if order == 2 and k == 2:
                ok = golden_identity and dom.overlaps(xi)
                note = "equality: both equal the golden ratio, " \
                       "x^3 - 2x - 1 = (x + 1)(x^2 - x - 1) exactly"
            else:
                ok = dom.gt(xi)
                note = ""
            assertions.append(OrderAssertion(
                name=f"dominant[{k}]>=xi[{order}]", certified=ok, note=note))
    return OrderReport(k_max=k_max, assertions=tuple(assertions))


# ---------------------------------------------------------------------------
# serialization (versioned cache document)
# ---------------------------------------------------------------------------

def profile_to_json(profile: RootProfile) -> dict:
    pair_of = {}
    for i, j in profile.conjugate_pairs():
        pair_of[i] = j
        pair_of[j] = i
    return {
        "version": PROFILE_DOC_VERSION,
        "k": profile.k,
        "precision_bits": profile.precision,
        "separation_certified": profile.separation_certified,
        "roots": [cball_to_json(r) for r in profile.roots],
        "weights": [cball_to_json(w) for w in profile.weights],
        "moduli": [ball_to_json(m) for m in profile.moduli],
        "real_flags": list(profile.real_flags),
        "conjugate_partner": [pair_of.get(i) for i in range(profile.k)],
    }


def profile_from_json(doc: dict) -> RootProfile:
    if doc.get("version") != PROFILE_DOC_VERSION:
        raise ValueError("unsupported root profile document version")
    prec = int(doc["precision_bits"])
    roots = tuple(cball_from_json(d, prec) for d in doc["roots"])
    weights = tuple(cball_from_json(d, prec) for d in doc["weights"])
    moduli = list(ball_from_json(d, prec) for d in doc["moduli"])
    partner = doc["conjugate_partner"]
    for i, j in enumerate(partner):
        if j is not None and j > i:
            moduli[j] = moduli[i]  # restore shared-object pairing
    return RootProfile(
        k=int(doc["k"]),
        precision=prec,
        roots=roots,
        weights=weights,
        moduli=tuple(moduli),
        real_flags=tuple(bool(b) for b in doc["real_flags"]),
        separation_certified=bool(doc["separation_certified"]),
    )
