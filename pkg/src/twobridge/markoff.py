"""Markoff triples, symbolic trace polynomials, root finding and the
selection of the geometric root.

The trace of the slope-s loop is phi(s); on every Farey triangle the triple
(x, y, z) of traces satisfies x^2 + y^2 + z^2 = xyz and across an edge
phi(s0) + phi(s3) = phi(s1) phi(s2).  Normalising phi(inf) = 0 and
phi(1) = i phi(0) turns phi(r) into a polynomial in x = phi(0) with Z[i]
coefficients whose nonzero roots are the candidate holonomy traces.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath

from .errors import (
    AmbiguousGeometricRootError,
    DomainError,
    EllipticTraceError,
    NoGeometricRootError,
    RootFindingError,
)
from .slopes import (
    INFINITY,
    ContinuedFraction,
    FareyChain,
    Slope,
    farey_chain,
    is_hyperbolic,
)
from .errors import NonHyperbolicError

__all__ = [
    "MarkoffTriple",
    "edge_flip",
    "TracePolynomial",
    "trace_polynomial",
    "polynomial_roots",
    "MarkoffEvaluation",
    "select_geometric_root",
    "geometric_evaluation",
    "ComplexLength",
    "translation_length",
]

MARKOFF_TOL = 1e-10


@dataclass(frozen=True)
class MarkoffTriple:
    """Traces at the three vertices of a Farey triangle, in vertex order."""

    x: complex
    y: complex
    z: complex

    def equation_residual(self):
        x, y, z = self.x, self.y, self.z
        scale = max(1.0, abs(x), abs(y), abs(z)) ** 3
        return abs(x * x + y * y + z * z - x * y * z) / scale

    def is_valid(self, tol=MARKOFF_TOL):
        if self.x == 0 and self.y == 0 and self.z == 0:
            return False
        return self.equation_residual() <= tol

    def coords(self):
        return (self.x, self.y, self.z)


def edge_flip(t: MarkoffTriple, vertex_index: int) -> MarkoffTriple:
    """Replace one coordinate w by (product of the other two) - w."""
    x, y, z = t.coords()
    if vertex_index == 0:
        return MarkoffTriple(y * z - x, y, z)
    if vertex_index == 1:
        return MarkoffTriple(x, x * z - y, z)
    if vertex_index == 2:
        return MarkoffTriple(x, y, x * y - z)
    raise DomainError("vertex_index must be 0, 1 or 2")


# ---------------------------------------------------------------------------
# Z[i] polynomials


class TracePolynomial:
    """Polynomial in x with Gaussian-integer coefficients, ascending order.

    Coefficients are (re, im) pairs of Python ints, so the symbolic chain
    recursion is exact at any size.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = [(int(a), int(b)) for a, b in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == (0, 0):
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls):
        return cls([(0, 0)])

    @classmethod
    def variable(cls, scale=(1, 0)):
        """scale * x."""
        return cls([(0, 0), scale])

    @property
    def degree(self):
        if self.coeffs == ((0, 0),):
            return -1
        return len(self.coeffs) - 1

    def is_zero(self):
        return self.coeffs == ((0, 0),)

    def __eq__(self, other):
        return isinstance(other, TracePolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [(0, 0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [(0, 0)] * (n - len(other.coeffs))
        return TracePolynomial([(p[0] + q[0], p[1] + q[1]) for p, q in zip(a, b)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [(0, 0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [(0, 0)] * (n - len(other.coeffs))
        return TracePolynomial([(p[0] - q[0], p[1] - q[1]) for p, q in zip(a, b)])

    def __neg__(self):
        return TracePolynomial([(-a, -b) for a, b in self.coeffs])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return TracePolynomial.zero()
        out = [(0, 0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, (a, b) in enumerate(self.coeffs):
            if a == 0 and b == 0:
                continue
            for j, (c, d) in enumerate(other.coeffs):
                re, im = out[i + j]
                out[i + j] = (re + a * c - b * d, im + a * d + b * c)
        return TracePolynomial(out)

    def __call__(self, x):
        """Horner evaluation; works for complex and for mpmath.mpc."""
        if isinstance(x, (mpmath.mpc, mpmath.mpf)):
            def conv(a, b):
                return mpmath.mpc(a, b)
        else:
            def conv(a, b):
                return complex(a, b)
        acc = conv(0, 0)
        for a, b in reversed(self.coeffs):
            acc = acc * x + conv(a, b)
        return acc

    def derivative(self):
        if self.degree <= 0:
            return TracePolynomial.zero()
        return TracePolynomial(
            [(k * a, k * b) for k, (a, b) in enumerate(self.coeffs)][1:]
        )

    def max_coeff_abs(self):
        return max(math.hypot(a, b) for a, b in self.coeffs)

    def content_power_of_x(self):
        """Largest k with x^k dividing the polynomial."""
        for k, c in enumerate(self.coeffs):
            if c != (0, 0):
                return k
        return 0

    def shift_down(self, k):
        """Divide by x^k (exact)."""
        if any(c != (0, 0) for c in self.coeffs[:k]):
            raise DomainError("polynomial not divisible by x^%d" % k)
        return TracePolynomial(self.coeffs[k:] or [(0, 0)])

    def to_json(self):
        return [[a, b] for a, b in self.coeffs]

    def __str__(self):
        terms = []
        for k, (a, b) in enumerate(self.coeffs):
            if (a, b) == (0, 0):
                continue
            if b == 0:
                c = "%d" % a
            elif a == 0:
                c = "%di" % b
            else:
                c = "(%d%+di)" % (a, b)
            terms.append(c if k == 0 else "%s*x^%d" % (c, k))
        return " + ".join(terms) if terms else "0"


def residual_bound(poly: TracePolynomial, root) -> float:
    """Acceptance bound 1e-10 * max|coeff| * (1 + |root|)^deg."""
    return 1e-10 * poly.max_coeff_abs() * (1.0 + abs(root)) ** max(poly.degree, 0)


def trace_polynomial(r: Slope, chain: FareyChain | None = None) -> TracePolynomial:
    """phi(r) as a polynomial in x = phi(0), from the symbolic edge relation
    pushed along the Farey chain with (phi(inf), phi(0), phi(1)) = (0, x, ix).
    """
    if chain is None:
        if not is_hyperbolic(r):
            raise NonHyperbolicError(r)
        chain = farey_chain(r)
    x = TracePolynomial.variable((1, 0))
    ix = TracePolynomial.variable((0, 1))
    values = {INFINITY: TracePolynomial.zero(), Slope(0, 1): x, Slope(1, 1): ix}
    current = dict(values)  # slope -> poly on the current triangle
    for i in range(1, len(chain.triangles)):
        tri = chain.triangles[i]
        prev = chain.triangles[i - 1]
        fresh = chain.new_vertex(i)
        dropped = next(v for v in prev.vertices if v not in tri.vertices)
        kept = [v for v in tri.vertices if v != fresh]
        current = {
            kept[0]: current[kept[0]],
            kept[1]: current[kept[1]],
            fresh: current[kept[0]] * current[kept[1]] - current[dropped],
        }
    return current[r]


# ---------------------------------------------------------------------------
# Root finding (Aberth-Ehrlich followed by Newton polish)


def _horner_pair(coeffs, x):
    """(P(x), P'(x)) for ascending complex coeffs."""
    p = 0 * x
    dp = 0 * x
    for c in reversed(coeffs):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def _aberth(coeffs, one, pi_val, exp_func, max_iter=1000, eps=None):
    """Simultaneous root iteration; ``coeffs`` ascending, constant and
    leading coefficient nonzero.  Generic over complex/mpc via ``one``."""
    n = len(coeffs) - 1
    lead = coeffs[-1]
    monic = [c / lead for c in coeffs]
    upper = 1 + max(abs(c) for c in monic[:-1])
    low_rest = max(abs(c) for c in monic[1:])
    lower = abs(monic[0]) / (abs(monic[0]) + low_rest) if low_rest else 1.0
    radius = (upper * lower) ** 0.5
    if eps is None:
        eps = 1e-14

    z = [
        one * radius * exp_func(1j * (2 * pi_val * k / n + 0.4))
        for k in range(n)
    ]
    prev_step = float("inf")
    for _ in range(max_iter):
        max_step = 0.0
        for i in range(n):
            p, dp = _horner_pair(monic, z[i])
            if p == 0:
                continue
            if dp == 0:
                z[i] = z[i] + eps * (1 + abs(z[i]))
                max_step = float("inf")
                continue
            ratio = p / dp
            s = 0 * z[i]
            for j in range(n):
                if j != i:
                    diff = z[i] - z[j]
                    if diff == 0:
                        diff = eps * (1 + abs(z[i]))
                    s = s + 1 / diff
            denom = 1 - ratio * s
            w = ratio if denom == 0 else ratio / denom
            z[i] = z[i] - w
            step = abs(w) / (1 + abs(z[i]))
            if step > max_step:
                max_step = float(step)
        if max_step < eps:
            return z, True
        if max_step < 1e-11 and max_step >= 0.5 * prev_step:
            # stagnating at rounding level; the Newton polish finishes the job
            return z, True
        prev_step = max_step
    return z, False


def _polish(coeffs, z, rounds=4):
    for _ in range(rounds):
        p, dp = _horner_pair(coeffs, z)
        if dp == 0:
            return z
        step = p / dp
        if abs(step) > 0.5 * (1 + abs(z)):
            return z
        z = z - step
    return z


def polynomial_roots(poly: TracePolynomial, precision: str = "double"):
    """All complex roots with multiplicity.

    ``precision`` is "double" or "extended"; degrees above 60 switch to
    extended (mpmath) arithmetic automatically.  Every returned root
    satisfies |P(root)| <= 1e-10 * max|coeff| * (1+|root|)^deg, otherwise a
    RootFindingError carrying the partial results is raised.
    """
    if poly.degree < 1:
        raise DomainError("root finding needs degree >= 1")
    k = poly.content_power_of_x()
    reduced = poly.shift_down(k)
    roots = [0j] * k
    if reduced.degree >= 1:
        if precision == "extended" or reduced.degree > 60:
            roots.extend(_roots_extended(reduced))
        else:
            roots.extend(_roots_double(reduced))
    bad = [z for z in roots if abs(poly(complex(z))) > residual_bound(poly, z)]
    if bad:
        raise RootFindingError(
            "residual check failed for %d of %d roots" % (len(bad), len(roots)),
            partial_roots=roots,
        )
    return _cluster(roots)


def _polish_mp(poly: TracePolynomial, z, dps=40, rounds=6):
    """Newton refinement against the exact Z[i] coefficients.

    The double-precision Aberth roots carry enough error at higher degrees
    to blur the +-2 parabolic traces of the exceptional slopes; a few
    extended-precision steps pin them to ~1e-30.
    """
    dpoly = poly.derivative()
    with mpmath.workdps(dps):
        w = mpmath.mpc(z)
        for _ in range(rounds):
            dp = dpoly(w)
            if dp == 0:
                break
            w = w - poly(w) / dp
        return complex(w)


def _roots_double(poly: TracePolynomial):
    coeffs = [complex(a, b) for a, b in poly.coeffs]
    z, converged = _aberth(coeffs, 1 + 0j, math.pi, cmath.exp)
    z = [_polish_mp(poly, zi) for zi in z]
    if not converged:
        ok = all(abs(poly(zi)) <= residual_bound(poly, zi) for zi in z)
        if not ok:
            raise RootFindingError(
                "Aberth iteration did not converge in 1000 rounds",
                partial_roots=z,
            )
    return z


def _roots_extended(poly: TracePolynomial):
    dps = max(30, poly.degree // 2 + 25)
    with mpmath.workdps(dps):
        coeffs = [mpmath.mpc(a, b) for a, b in poly.coeffs]
        one = mpmath.mpc(1, 0)
        z, converged = _aberth(
            coeffs, one, mpmath.pi, mpmath.exp, eps=mpmath.mpf(10) ** (-dps + 6)
        )
        z = [_polish(coeffs, zi, rounds=6) for zi in z]
        if not converged:
            raise RootFindingError(
                "extended-precision Aberth did not converge", partial_roots=z
            )
        return [complex(zi) for zi in z]


def _cluster(roots, rtol=1e-8):
    """Merge numerically coincident roots so multiplicities are explicit."""
    out = []
    for z in sorted(roots, key=lambda t: (round(t.real, 10), round(t.imag, 10))):
        for group in out:
            if abs(z - group[0]) <= rtol * (1 + abs(z)):
                group.append(z)
                break
        else:
            out.append([z])
    merged = []
    for group in out:
        centre = sum(group) / len(group)
        merged.extend([centre] * len(group))
    return merged


# ---------------------------------------------------------------------------
# Numeric Markoff maps


_INT_PHI_PATTERN = (1 + 0j, 1j, -1 - 0j, -1j)  # phi(m)/x for integer m mod 4


class MarkoffEvaluation:
    """A root x* of the trace polynomial together with the memoised Markoff
    map it generates: phi(inf) = 0, phi(0) = x*, phi(1) = i x*.

    phi(s) is computed by the canonical mediant walk from <0,1,inf> and every
    intermediate slope is cached.  Instances may be sealed, after which reads
    are safe to share across threads.
    """

    def __init__(self, r: Slope, root: complex, chain: FareyChain | None = None):
        self.r = r
        self.root = complex(root)
        self.chain = chain if chain is not None else farey_chain(r)
        self._cache = {INFINITY: 0j, Slope(0, 1): self.root, Slope(1, 1): 1j * self.root}
        self._sealed = False
        self.selection = None

    def seal(self):
        self._sealed = True
        return self

    @property
    def cache(self):
        return dict(self._cache)

    def _store(self, s, value):
        if self._sealed and s not in self._cache:
            raise DomainError("evaluation is sealed; slope %s not cached" % (s,))
        self._cache[s] = value

    def phi(self, s: Slope) -> complex:
        cached = self._cache.get(s)
        if cached is not None:
            return cached
        x = self.root
        if s.den == 1:
            val = _INT_PHI_PATTERN[s.num % 4] * x
            self._store(s, val)
            return val
        m = s.num // s.den
        lo, hi = Slope(m, 1), Slope(m + 1, 1)
        phi_lo = self.phi(lo)
        phi_hi = self.phi(hi)
        phi_opp = 0j  # opposite vertex of <m, m+1> on the inf side
        while True:
            med = lo.mediant(hi)
            phi_med = phi_lo * phi_hi - phi_opp
            self._store(med, phi_med)
            if med == s:
                return phi_med
            if s < med:
                hi, phi_opp, phi_hi = med, phi_hi, phi_med
            else:
                lo, phi_opp, phi_lo = med, phi_lo, phi_med

    def triple(self, triangle) -> MarkoffTriple:
        a, b, c = triangle.vertices
        return MarkoffTriple(self.phi(a), self.phi(b), self.phi(c))

    def constraint_residual(self) -> float:
        """|phi(r)| for the defining constraint phi(r) = 0."""
        return abs(self.phi(self.r))

    def __repr__(self):
        return "MarkoffEvaluation(r=%s, root=%r)" % (self.r, self.root)


@dataclass(frozen=True)
class ComplexLength:
    """Complex translation length, Re >= 0 and Im normalised to (-pi, pi]."""

    value: complex
    parabolic: bool = False

    @property
    def real_length(self):
        return self.value.real


def translation_length(phi_s: complex) -> ComplexLength:
    """l with 2 cosh(l/2) = +-phi_s (the sign is immaterial mod 2 pi i)."""
    phi_s = complex(phi_s)
    if abs(phi_s - 2) <= 1e-12 or abs(phi_s + 2) <= 1e-12:
        return ComplexLength(0j, parabolic=True)
    if abs(phi_s.imag) <= 1e-13 * (1 + abs(phi_s.real)) and abs(phi_s.real) < 2:
        raise EllipticTraceError("trace %r lies in (-2, 2)" % (phi_s,))
    l = 2 * cmath.acosh(phi_s / 2)
    if l.real < 0:
        l = -l
    im = l.imag
    while im > math.pi:
        im -= 2 * math.pi
    while im <= -math.pi:
        im += 2 * math.pi
    return ComplexLength(complex(l.real, im))


# ---------------------------------------------------------------------------
# Geometric-root selection


@dataclass
class RootCandidateReport:
    root: complex
    passed: bool
    reason: str
    lambda_orbifold: complex | None = None
    census: tuple = ()


@dataclass
class SelectionReport:
    r: Slope
    candidates: list = field(default_factory=list)
    selected: complex | None = None


def _sign_class_representative(z: complex) -> complex:
    """Canonical element of {z, -z}; conjugates stay distinct."""
    a, b = z, -z
    key = lambda t: (round(t.real, 12), round(t.imag, 12))
    return a if key(a) >= key(b) else b


def select_geometric_root(roots, r: Slope, depth: int = 20) -> MarkoffEvaluation:
    """Filter trace-polynomial roots down to the holonomy trace.

    Keeps a root when (a) no slope explored in I1 u I2 to the given depth has
    a real trace in (-2,2), (b) the census of |phi| <= 2 slopes has stopped
    growing five levels earlier, and (c) the finite edge-sum identity holds.
    Survivors occur in conjugate pairs; the one whose orbifold cusp modulus
    has positive imaginary part is returned.
    """
    from . import mcshane  # deferred: mcshane imports this module's types
    from .errors import NotGeometricEvaluationError

    report = SelectionReport(r=r)
    reps = []
    seen = set()
    for z in roots:
        if abs(z) <= 1e-12:
            report.candidates.append(
                RootCandidateReport(z, False, "x = 0 gives the trivial triple")
            )
            continue
        rep = _sign_class_representative(complex(z))
        key = (round(rep.real, 9), round(rep.imag, 9))
        if key not in seen:
            seen.add(key)
            reps.append(rep)

    edges = mcshane.boundary_edge_sets(r)
    survivors = []
    for rep in reps:
        ev = MarkoffEvaluation(r, rep, chain=edges.chain)
        try:
            early = mcshane.census_scan(ev, edges, depth - 5)
            late = mcshane.census_scan(ev, edges, depth)
        except NotGeometricEvaluationError as exc:
            report.candidates.append(
                RootCandidateReport(rep, False, "elliptic trace at %s" % exc.slope)
            )
            continue
        if early != late:
            report.candidates.append(
                RootCandidateReport(rep, False, "census still growing at depth %d" % depth,
                                    census=tuple(sorted(late, key=str)))
            )
            continue
        s1, s2 = mcshane.finite_edge_sums(r, ev, edges=edges, check=False)
        if abs(s1 + s2 + 1) > 1e-8:
            report.candidates.append(
                RootCandidateReport(rep, False, "edge-sum identity failed",
                                    lambda_orbifold=2 * s1)
            )
            continue
        lam = 2 * s1
        report.candidates.append(
            RootCandidateReport(rep, True, "passed", lambda_orbifold=lam,
                                census=tuple(sorted(late, key=str)))
        )
        survivors.append((rep, lam))

    if not survivors:
        raise NoGeometricRootError("no geometric root found for %s" % (r,))

    positive = [(rep, lam) for rep, lam in survivors if lam.imag > 1e-12]
    lam_keys = {(round(l.real, 6), round(l.imag, 6)) for _, l in positive}
    if len(lam_keys) > 1:
        raise AmbiguousGeometricRootError(
            "more than one root class survives for %s" % (r,), report=report
        )
    if not positive:
        raise NoGeometricRootError(
            "no surviving root has Im(lambda(O)) > 0 for %s" % (r,)
        )

    # deterministic representative: Re > 0, ties broken by Im > 0
    def rep_key(item):
        z = item[0]
        return (round(z.real, 12), round(z.imag, 12))

    chosen = max(positive, key=rep_key)[0]
    ev = MarkoffEvaluation(r, chosen, chain=edges.chain)
    report.selected = chosen
    ev.selection = report
    return ev


def geometric_evaluation(r: Slope, precision: str = "double", depth: int = 20) -> MarkoffEvaluation:
    """Full pipeline chain -> polynomial -> roots -> geometric root."""
    poly = trace_polynomial(r)
    roots = polynomial_roots(poly, precision=precision)
    ev = select_geometric_root(roots, r, depth=depth)
    ev.trace_poly = poly
    return ev
