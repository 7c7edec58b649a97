"""Topological recursion on the local curve ``x = z**2``, ``y`` odd.

Everything is stripped of differentials: a correlator is the coefficient of
``dz0 dz1 ... dz_{n-1}``.  Conventions used throughout:

* ``B(a, b) = 1/(a - b)**2``.
* ``K(q, p) = (1/2) * int_q^{-q} B(xi, p) dxi / omega(q) = 1/(4 y(q) (q**2 - p**2))``
  with ``omega(q) = (y(q) - y(-q)) * 2q``.
* A slot at the conjugate point ``-q`` carries a factor ``-1`` (``d(-q) = -dq``),
  so every recursion vertex contributes exactly one ``-1``.

With these, Airy gives ``W(0,3) = 1/(2 z0^2 z1^2 z2^2)`` and ``W(1,1) = 1/(16 z0^4)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, count
from typing import Mapping, Sequence

from .graphs import (
    TaggedGraph,
    Tree,
    WorkLimitExceeded,
    check_work,
    eo_classes,
    eo_family,
    is_leaf,
    marked_labels,
    recursion_count,
)
from .hopf import coproduct_graph
from .laurent import Poly, RatExpr, ZERO, residue_of_product

Point = tuple[str, int]  # (variable, sign): the point sign*variable

MAX_DESK = 8  # 2g + n bound for the direct evaluator


class NonEOGraph(ValueError):
    pass


# ---------------------------------------------------------------- curve


@dataclass(frozen=True)
class CurveModel:
    """``y(z) = sum_j y_odd[j] * z**(2j+1)``."""

    y_odd: tuple[Fraction, ...] = (Fraction(1),)

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.y_odd)
        if not coeffs or coeffs[0] == 0:
            raise ValueError("the linear coefficient of y must be nonzero (simple branch point)")
        object.__setattr__(self, "y_odd", coeffs)

    @classmethod
    def airy(cls) -> "CurveModel":
        return cls((Fraction(1),))

    @classmethod
    def parse(cls, text: str) -> "CurveModel":
        text = text.strip()
        if text.lower() == "airy":
            return cls.airy()
        if not text.startswith("y:"):
            raise ValueError(f"curve must be 'airy' or 'y: c1,c3,...', got {text!r}")
        return cls(tuple(Fraction(c.strip()) for c in text[2:].split(",") if c.strip()))

    def y(self, var: str) -> Poly:
        return Poly({((var, 2 * j + 1),): c for j, c in enumerate(self.y_odd) if c})

    def __str__(self) -> str:
        if self.y_odd == (Fraction(1),):
            return "airy"
        return "y: " + ",".join(str(c) for c in self.y_odd)


def _point(p: Point) -> Poly:
    var, sign = p
    return Poly.var(var).scale(sign)


def bergmann(v1: str | Point, v2: str | Point) -> RatExpr:
    a = (v1, 1) if isinstance(v1, str) else v1
    b = (v2, 1) if isinstance(v2, str) else v2
    if a[0] == b[0] and a[1] == b[1]:
        raise ValueError("bergmann kernel needs two distinct points")
    d = _point(a) - _point(b)
    return RatExpr(Poly.const(1), d * d)


def vertex_omega(c: CurveModel, var: str = "z") -> RatExpr:
    # (y(z) - y(-z)) * dx/dz with y odd
    return RatExpr(c.y(var).scale(4) * Poly.var(var))


def recursion_kernel(c: CurveModel, p: str | Point, var: str = "z") -> RatExpr:
    pv = p if isinstance(p, str) else p[0]  # K depends on p only through p**2
    den = c.y(var).scale(4) * (Poly.var(var, 2) - Poly.var(pv, 2))
    return RatExpr(Poly.const(1), den)


# ---------------------------------------------------------------- correlators


@dataclass(frozen=True, eq=False)
class Correlator:
    g: int
    variables: tuple[str, ...]
    value: RatExpr

    def __eq__(self, other) -> bool:
        return (isinstance(other, Correlator) and self.g == other.g
                and self.variables == other.variables and self.value == other.value)

    __hash__ = None

    def permuted(self, order: Sequence[int]) -> RatExpr:
        """The value with variable ``i`` renamed to variable ``order[i]``."""
        names = self.variables
        return self.value.rename({names[i]: names[order[i]] for i in range(len(names))})

    def is_symmetric(self) -> bool:
        import itertools

        n = len(self.variables)
        return all(self.permuted(p) == self.value for p in itertools.permutations(range(n)))

    def to_json(self) -> dict:
        return {"genus": self.g, "variables": list(self.variables), "value": self.value.to_json(),
                "text": str(self.value)}


def zvars(n: int) -> tuple[str, ...]:
    return tuple(f"z{i}" for i in range(n))


@lru_cache(maxsize=None)
def _w_canonical(c: CurveModel, g: int, n: int) -> RatExpr:
    if g < 0 or n < 1 or (g == 0 and n == 1):
        return ZERO
    if g == 0 and n == 2:
        return bergmann("z0", "z1")
    if 2 * g + n > MAX_DESK:
        raise WorkLimitExceeded(f"w_direct({g},{n}) exceeds the desk bound 2g+n <= {MAX_DESK}")
    return _recursion_step(c, g, zvars(n), "z0")


def _w_at(c: CurveModel, g: int, points: Sequence[Point]) -> RatExpr:
    """The canonical correlator evaluated at the given (signed) points."""
    n = len(points)
    val = _w_canonical(c, g, n)
    if val.is_zero():
        return val
    return val.substitute({f"z{i}": p for i, p in enumerate(points)})


def _recursion_step(c: CurveModel, g: int, names: tuple[str, ...], root: str) -> RatExpr:
    q = "_q"
    rest = [(v, 1) for v in names[1:]]
    kernel = recursion_kernel(c, root, q)
    total = ZERO
    k = len(rest)
    for m in range(g + 1):
        for i in range(k + 1):
            if (m, i) in ((0, 0), (g, k)):
                continue  # one factor is W(0,1) = 0
            for inside in combinations(range(k), i):
                left = [rest[j] for j in inside]
                right = [rest[j] for j in range(k) if j not in inside]
                a = _w_at(c, m, [(q, 1)] + left)
                b = _w_at(c, g - m, [(q, -1)] + right)
                if a.is_zero() or b.is_zero():
                    continue
                total = total + residue_of_product([kernel, a, b], q)
    handle = _w_at(c, g - 1, [(q, 1), (q, -1)] + rest)
    if not handle.is_zero():
        total = total + residue_of_product([kernel, handle], q)
    return -total  # the conjugate slot's -1


def w_direct(c: CurveModel, g: int, n: int) -> Correlator:
    """The genus-g, n-point correlator in variables ``z0..z{n-1}`` by direct recursion."""
    if n < 1:
        raise ValueError("need at least one point")
    return Correlator(g, zvars(n), _w_canonical(c, g, n))


# ---------------------------------------------------------------- graph evaluation


class _GraphEval:
    """Evaluate a tree vertex by vertex, integrating from the leaves towards the root."""

    def __init__(self, c: CurveModel, labels: Mapping[str, str], prefix: str = "_v"):
        self.c = c
        self.labels = labels
        self.prefix = prefix
        self.ids = count()
        self.loop_points: dict[int, list[tuple[Point, tuple[int, ...]]]] = {}

    def _collect(self, t: Tree, point: Point, path: tuple[int, ...]):
        if is_leaf(t):
            if isinstance(t, int):
                self.loop_points.setdefault(t, []).append((point, path))
            elif t not in self.labels:
                raise KeyError(f"no variable for leaf label {t!r}")
            return
        v = next(self.ids)
        q = f"{self.prefix}{v}"
        self._collect(t[0], (q, 1), path + (v,))
        self._collect(t[1], (q, -1), path + (v,))

    def _loop_factors(self) -> dict[int, list[RatExpr]]:
        """Each loop's propagator, attached to the deeper of its two vertices."""
        at: dict[int, list[RatExpr]] = {}
        for lid, ((pa, a), (pb, b)) in self.loop_points.items():
            if a[: len(b)] == b:
                deep = a
            elif b[: len(a)] == a:
                deep = b
            else:
                raise NonEOGraph(f"loop {lid} joins vertices on different branches")
            at.setdefault(deep[-1], []).append(bergmann(pa, pb))
        return at

    def value(self, t: Tree, point: Point) -> RatExpr:
        self.ids = count()
        self._collect(t, point, ())
        self.loops = self._loop_factors()
        self.ids = count()
        return self._go(t, point)

    def _go(self, t: Tree, point: Point) -> RatExpr:
        if is_leaf(t):
            if isinstance(t, int):
                return RatExpr.const(1)
            return bergmann(point, self.labels[t])
        v = next(self.ids)
        q = f"{self.prefix}{v}"
        left = self._go(t[0], (q, 1))
        right = self._go(t[1], (q, -1))
        factors = [recursion_kernel(self.c, point, q), left, right] + self.loops.get(v, [])
        return -residue_of_product(factors, q)


def default_label_vars(k: int) -> dict[str, str]:
    return {lab: f"z{i}" for i, lab in enumerate(marked_labels(k), start=1)}


def phi_eval(c: CurveModel, graph: TaggedGraph, root: str = "z0",
             leaf_labels: Mapping[str, str] | None = None) -> RatExpr:
    """Weighted map: K on skeleton edges, B on leaf and loop edges, residues leaves-first."""
    if graph.is_empty:
        raise ValueError("the empty graph has no evaluation")
    if leaf_labels is None:
        leaf_labels = default_label_vars(len(graph.free_labels))
    missing = set(graph.free_labels) - set(leaf_labels)
    if missing:
        raise KeyError(f"no variable for labels {sorted(missing)}")
    return _GraphEval(c, leaf_labels).value(graph.tree, (root, 1))


def w_graph_sum(c: CurveModel, g: int, n: int, method: str = "weighted") -> Correlator:
    """Sum of the weighted map over the recursion graphs.

    ``weighted``: every balanced mirror-distinct graph with its symmetry weight.
    ``orbit``: one graph per mirror orbit times the number of recursion terms in it.
    """
    k = n - 1
    if 2 * g + n < 3:
        return w_direct(c, g, n)
    check_work(recursion_count(k, g), f"graph sum ({g},{n})")
    labels = default_label_vars(k)
    total = ZERO
    if method == "weighted":
        for G, w in eo_family(k, g):
            total = total + phi_eval(c, G, "z0", labels) * w
    elif method == "orbit":
        for cl in eo_classes(k, g):
            rep = cl.representatives[0] if cl.representatives else cl.fallback
            total = total + phi_eval(c, rep, "z0", labels) * cl.multiplicity
    else:
        raise ValueError("method must be 'weighted' or 'orbit'")
    return Correlator(g, zvars(n), total)


# ---------------------------------------------------------------- coefficients


def s_sequence(m: int) -> int:
    if m < 1:
        raise ValueError("s_m is defined for m >= 1")
    return _s(m)


@lru_cache(maxsize=None)
def _s(m: int) -> int:
    if m == 0:
        return 1  # extension used by the a^m formula at m = 0 or m = g
    if m == 1:
        return 1
    return 2 * (3 * m - 4) * _s(m - 1) + sum(_s(j) * _s(m - j) for j in range(1, m))


def gbinom(x: Fraction | int, k: int) -> Fraction:
    """Generalized binomial ``x (x-1) ... (x-k+1) / k!`` for rational ``x``."""
    if k < 0:
        return Fraction(0)
    out = Fraction(1)
    for j in range(k):
        out *= Fraction(x) - j
    return out / math.factorial(k)


def catalan_ext(n: int) -> int:
    return 0 if n < 0 else math.comb(2 * n, n) // (n + 1)


MODES = ("statement", "proof", "brute")


@dataclass(frozen=True)
class CoeffEntry:
    kind: str  # "a" or "b"
    m: int
    i: int
    value: Fraction | None
    provenance: str
    numerator: int | None = None
    denominator: int | None = None

    @property
    def reciprocal_is_integer(self) -> bool | None:
        if self.value is None or self.value == 0:
            return None
        return (1 / self.value).denominator == 1

    def to_json(self) -> dict:
        return {
            "kind": self.kind, "m": self.m, "i": self.i,
            "value": None if self.value is None else str(self.value),
            "provenance": self.provenance,
            "numerator": self.numerator, "denominator": self.denominator,
            "reciprocal_is_integer": self.reciprocal_is_integer,
        }


@dataclass
class CoeffTable:
    g: int
    k: int
    mode: str
    entries: list[CoeffEntry] = field(default_factory=list)

    def a(self, m: int, i: int) -> Fraction | None:
        for e in self.entries:
            if e.kind == "a" and (e.m, e.i) == (m, i):
                return e.value
        return None

    def b(self) -> Fraction | None:
        for e in self.entries:
            if e.kind == "b":
                return e.value
        return None

    @property
    def violations(self) -> list[CoeffEntry]:
        if self.mode != "brute":
            return []
        return [e for e in self.entries if e.reciprocal_is_integer is False]

    def to_json(self) -> dict:
        return {"genus": self.g, "k": self.k, "mode": self.mode,
                "entries": [e.to_json() for e in self.entries]}


def _a_formula(g: int, k: int, m: int, i: int, mode: str) -> Fraction:
    if g == 0:
        top = catalan_ext(i) if mode == "statement" else catalan_ext(i - 1)
        return Fraction(top * catalan_ext(k - i - 1), catalan_ext(k - 1) * math.comb(k, i))
    h = Fraction(3, 2)
    num = _s(m) * _s(g - m) * gbinom(h * (m - 1) + i, i) * gbinom(h * (g - m - 1) + k - i, k - i)
    den = _s(g) * math.comb(k, i) * math.comb(g, m) * gbinom(h * (g - 1) + k, k)
    return num / den


def _b_formula(g: int, k: int, mode: str) -> Fraction:
    top = g if mode == "statement" else 1
    return Fraction(top, 2 ** k * (4 ** g - 2 ** g))


@dataclass
class TensorTerm:
    left: TaggedGraph
    right: TaggedGraph
    coef: Fraction
    source: TaggedGraph
    glued: bool

    @property
    def type(self) -> tuple[int, int]:
        return (self.left.n_loops, len(self.left.free_labels))


def delta_prime_terms(k: int, g: int) -> list[TensorTerm]:
    """All terms of the reduced coproduct summed over the recursion family."""
    marks = set(marked_labels(k))
    out = []
    for G, _w in eo_family(k, g):
        for (a, b), c in coproduct_graph(G).terms.items():
            if a.is_empty or (b.is_empty and a == G):
                continue
            glued = b.is_empty
            if glued and not (set(a.free_labels) - marks):
                raise AssertionError("glued term without a merged leaf")
            out.append(TensorTerm(a, b, c, G, glued))
    return out


def coeff_table(g: int, k: int, mode: str) -> CoeffTable:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if g > 2 or k > 5:
        raise WorkLimitExceeded("coefficient tables are limited to g <= 2, k <= 5")
    table = CoeffTable(g, k, mode)
    if mode != "brute":
        for m in range(g + 1) if g else [0]:
            for i in range(1, k):
                table.entries.append(CoeffEntry("a", m, i, _a_formula(g, k, m, i, mode), mode))
        if g >= 1:
            table.entries.append(CoeffEntry("b", g - 1, k + 1, _b_formula(g, k, mode), mode))
        return table
    counts: dict[tuple[int, int], Fraction] = {}
    handle = Fraction(0)
    for t in delta_prime_terms(k, g):
        if t.glued:
            handle += t.coef
        else:
            counts[t.type] = counts.get(t.type, Fraction(0)) + t.coef
    for (m, i) in sorted(counts):
        rec = math.comb(k, i) * recursion_count(i, m) * recursion_count(k - i, g - m)
        den = counts[(m, i)]
        table.entries.append(CoeffEntry("a", m, i, Fraction(rec) / den, "brute", rec, int(den)))
    if g >= 1:
        rec = recursion_count(k + 1, g - 1)
        value = Fraction(rec) / handle if handle else None
        table.entries.append(CoeffEntry("b", g - 1, k + 1, value, "brute", rec, int(handle)))
    return table


# ---------------------------------------------------------------- coproduct identity


def _glued_to_graph(t: TensorTerm, marks: set[str]) -> Tree:
    """``< T, loop >``: the merged leaf of a glued term re-joined to the root's conjugate slot."""
    merged = (set(t.left.free_labels) - marks).pop()
    tree = t.left.tree
    lid = 1 + max([x for x in t.left.slots if isinstance(x, int)], default=-1)

    def f(x):
        if is_leaf(x):
            return lid if x == merged else x
        return (f(x[0]), f(x[1]))

    return (f(tree), lid)


def tensor_value(c: CurveModel, left: TaggedGraph, right: TaggedGraph, labels: Mapping[str, str],
                 root: str = "z0") -> RatExpr:
    """``Res K(q, root) * phi(left at q) * phi(right at -q)`` with the conjugate slot's ``-1``."""
    q = "_r"
    a = _GraphEval(c, labels, "_a").value(left.tree, (q, 1))
    b = _GraphEval(c, labels, "_b").value(right.tree, (q, -1))
    return -residue_of_product([recursion_kernel(c, root, q), a, b], q)


@dataclass
class IdentityReport:
    g: int
    k: int
    table: CoeffTable
    lhs: RatExpr | None
    rhs: RatExpr
    equal: bool
    violations: list[str]

    def to_json(self) -> dict:
        return {
            "genus": self.g, "k": self.k, "equal": self.equal,
            "lhs": None if self.lhs is None else str(self.lhs),
            "rhs": str(self.rhs),
            "coefficients": self.table.to_json(),
            "violations": self.violations,
        }


def verify_coproduct_identity(c: CurveModel, g: int, k: int, table: CoeffTable | None = None) -> IdentityReport:
    """Evaluate the coefficient-weighted reduced coproduct of the family and compare with the recursion."""
    if table is None:
        table = coeff_table(g, k, "brute")
    labels = default_label_vars(k)
    marks = set(labels)
    rhs = w_direct(c, g, k + 1).value
    total = ZERO
    violations: list[str] = []
    for t in delta_prime_terms(k, g):
        try:
            if t.glued:
                coef = table.b()
                if coef is None:
                    violations.append(f"no handle coefficient for glued term {t.left}")
                    continue
                lbl = dict(labels)
                val = _GraphEval(c, lbl).value(_glued_to_graph(t, marks), ("z0", 1))
            else:
                coef = table.a(*t.type)
                if coef is None:
                    violations.append(f"no coefficient for type {t.type} ({t.left} (x) {t.right})")
                    continue
                val = tensor_value(c, t.left, t.right, labels)
        except NonEOGraph as e:
            violations.append(f"{t.left} (x) {t.right}: {e}")
            continue
        total = total + val * (coef * t.coef)
    equal = not violations and total == rhs
    if not equal and not violations:
        violations.append(f"sum differs from the recursion by {total - rhs}")
    return IdentityReport(g, k, table, total, rhs, equal, violations)
