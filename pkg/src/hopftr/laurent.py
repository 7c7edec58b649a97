"""Exact multivariate rational expressions and local Laurent expansion.

Polynomials are sparse maps from monomials to :class:`fractions.Fraction`.
Monomials may carry negative exponents, so a rational expression whose
denominator is a single monomial is stored as a Laurent polynomial over ``1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by variable name
Scalar = Union[int, Fraction]

ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        ne = out.get(v, 0) + e
        if ne:
            out[v] = ne
        else:
            del out[v]
    return tuple(sorted(out.items()))


def _mono_inv(a: Monomial) -> Monomial:
    return tuple((v, -e) for v, e in a)


def _mono_exp(a: Monomial, var: str) -> int:
    for v, e in a:
        if v == var:
            return e
    return 0


def _mono_drop(a: Monomial, var: str) -> Monomial:
    return tuple((v, e) for v, e in a if v != var)


def _grlex_key(m: Monomial, variables: tuple[str, ...] = ()):
    if not variables:
        variables = tuple(sorted({v for v, _ in m}, reverse=True))
    exps = dict(m)
    return (sum(exps.values()), tuple(exps.get(v, 0) for v in variables))


class Poly:
    """Sparse Laurent polynomial with rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls({ONE_MONO: c})

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "Poly":
        return cls({((name, exp),) if exp else ONE_MONO: 1})

    @classmethod
    def monomial(cls, coeff: Scalar, mono: Mapping[str, int]) -> "Poly":
        return cls({tuple(sorted((v, e) for v, e in mono.items() if e)): coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def __add__(self, other: "Poly") -> "Poly":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(out)

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly._raw({})
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Poly._raw(out)

    def scale(self, c: Scalar) -> "Poly":
        if not c:
            return Poly._raw({})
        return Poly._raw({m: v * c for m, v in self.terms.items()})

    def shift(self, mono: Monomial) -> "Poly":
        return Poly._raw({_mono_mul(m, mono): c for m, c in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def min_exp(self, var: str) -> int:
        return min(_mono_exp(m, var) for m in self.terms)

    def max_exp(self, var: str) -> int:
        return max(_mono_exp(m, var) for m in self.terms)

    def min_monomial(self) -> Monomial:
        """Componentwise minimum exponent over all terms."""
        vs = self.variables()
        return tuple(sorted((v, self.min_exp(v)) for v in vs if self.min_exp(v)))

    def coeffs_in(self, var: str) -> dict[int, "Poly"]:
        out: dict[int, dict] = {}
        for m, c in self.terms.items():
            out.setdefault(_mono_exp(m, var), {})[_mono_drop(m, var)] = c
        return {e: Poly._raw(t) for e, t in out.items()}

    def substitute(self, mapping: Mapping[str, tuple[str, int]]) -> "Poly":
        """Rename variables: ``v -> sign * w`` for each ``v: (w, sign)``."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            new: dict[str, int] = {}
            for v, e in m:
                if v in mapping:
                    w, sign = mapping[v]
                    if sign < 0 and e % 2:
                        c = -c
                    v = w
                ne = new.get(v, 0) + e
                if ne:
                    new[v] = ne
                else:
                    new.pop(v, None)
            key = tuple(sorted(new.items()))
            s = out.get(key, 0) + c
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Poly._raw(out)

    def leading(self, variables: tuple[str, ...] | None = None) -> tuple[Monomial, Fraction]:
        if variables is None:
            variables = tuple(sorted(self.variables(), reverse=True))
        m = max(self.terms, key=lambda t: _grlex_key(t, variables))
        return m, self.terms[m]

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        vs = tuple(sorted(self.variables()))
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0], vs), reverse=True)

    def to_json(self) -> list:
        return [[str(c), {v: e for v, e in m}] for m, c in self.sorted_terms()]

    @classmethod
    def from_json(cls, data: list) -> "Poly":
        return cls({tuple(sorted((v, int(e)) for v, e in mono.items())): Fraction(c) for c, mono in data})

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [f"{v}^{e}" if e != 1 else v for v, e in m]
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            parts.append(("-" if c < 0 else "+", body))
        text = parts[0][1] if parts[0][0] == "+" else "-" + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    __repr__ = __str__


def _exact_divide(num: Poly, den: Poly) -> Poly | None:
    """Multivariate division; returns the quotient when it is exact."""
    if den.is_monomial():
        (m, c), = den.terms.items()
        return num.shift(_mono_inv(m)).scale(1 / c)
    order = tuple(sorted(num.variables() | den.variables(), reverse=True))
    lm, lc = den.leading(order)
    rem = num
    quot = Poly()
    # Laurent exponents make plain grlex division non-terminating in general;
    # bound the number of reduction steps by the size of the operands.
    for _ in range(4 * (len(num.terms) + 1) * (len(den.terms) + 1)):
        if rem.is_zero():
            return quot
        m, c = rem.leading(order)
        t = Poly._raw({_mono_mul(m, _mono_inv(lm)): c / lc})
        quot = quot + t
        rem = rem - t * den
    return None


@dataclass(frozen=True, eq=False)
class RatExpr:
    """A quotient ``num / den`` of Laurent polynomials, kept lightly normalized."""

    num: Poly
    den: Poly = field(default_factory=lambda: Poly.const(1))

    def __post_init__(self):
        num, den = self.num, self.den
        if den.is_zero():
            raise ZeroDivisionError("rational expression with zero denominator")
        if num.is_zero():
            object.__setattr__(self, "den", Poly.const(1))
            return
        if den.is_const() and den.terms == {ONE_MONO: Fraction(1)}:
            return
        q = _exact_divide(num, den)
        if q is not None:
            object.__setattr__(self, "num", q)
            object.__setattr__(self, "den", Poly.const(1))
            return
        shift = _mono_inv(den.min_monomial())
        den = den.shift(shift)
        num = num.shift(shift)
        _, lc = den.leading()
        object.__setattr__(self, "num", num.scale(1 / lc))
        object.__setattr__(self, "den", den.scale(1 / lc))

    @classmethod
    def const(cls, c: Scalar) -> "RatExpr":
        return cls(Poly.const(c))

    @classmethod
    def var(cls, name: str, exp: int = 1) -> "RatExpr":
        return cls(Poly.var(name, exp))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        return self.den.is_const()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def __add__(self, other: "RatExpr | Scalar") -> "RatExpr":
        other = _coerce(other)
        if self.den == other.den:
            return RatExpr(self.num + other.num, self.den)
        return RatExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RatExpr":
        return RatExpr(-self.num, self.den)

    def __sub__(self, other: "RatExpr | Scalar") -> "RatExpr":
        return self + (-_coerce(other))

    def __rsub__(self, other: Scalar) -> "RatExpr":
        return _coerce(other) - self

    def __mul__(self, other: "RatExpr | Scalar") -> "RatExpr":
        if isinstance(other, (int, Fraction)):
            return RatExpr(self.num.scale(other), self.den)
        if self.is_laurent() and other.is_laurent():
            return RatExpr(self.num * other.num)
        return RatExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RatExpr | Scalar") -> "RatExpr":
        other = _coerce(other)
        return RatExpr(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "RatExpr":
        if n < 0:
            return RatExpr(self.den ** (-n), self.num ** (-n))
        return RatExpr(self.num ** n, self.den ** n)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RatExpr.const(other)
        if not isinstance(other, RatExpr):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None  # equality is up to cross-multiplication

    def substitute(self, mapping: Mapping[str, tuple[str, int]]) -> "RatExpr":
        return RatExpr(self.num.substitute(mapping), self.den.substitute(mapping))

    def rename(self, mapping: Mapping[str, str]) -> "RatExpr":
        return self.substitute({k: (v, 1) for k, v in mapping.items()})

    def valuation(self, var: str) -> int:
        """Order of vanishing at ``var = 0`` (negative for poles)."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        return self.num.min_exp(var) - self.den.min_exp(var)

    def laurent_terms(self) -> dict[Monomial, Fraction]:
        if not self.is_laurent():
            raise ValueError("not a Laurent polynomial")
        c = self.den.terms[ONE_MONO]
        return {m: v / c for m, v in self.num.terms.items()}

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RatExpr":
        return cls(Poly.from_json(data["num"]), Poly.from_json(data["den"]))

    def __str__(self) -> str:
        if self.is_laurent():
            return str(self.num.scale(1 / self.den.terms[ONE_MONO]))
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _coerce(x: "RatExpr | Scalar") -> RatExpr:
    return x if isinstance(x, RatExpr) else RatExpr.const(x)


ZERO = RatExpr(Poly())


def substitute_negate(e: RatExpr, var: str) -> RatExpr:
    """Replace ``var`` by ``-var``."""
    return e.substitute({var: (var, -1)})


@dataclass
class LocalSeries:
    """Truncated Laurent series in ``var``: exact for every exponent below ``order``."""

    var: str
    coeffs: dict[int, RatExpr]
    order: int

    def __post_init__(self):
        self.coeffs = {e: c for e, c in self.coeffs.items() if e < self.order and not c.is_zero()}

    def valuation(self) -> int:
        return min(self.coeffs) if self.coeffs else self.order

    def coefficient(self, exp: int) -> RatExpr:
        if exp >= self.order:
            raise ValueError(f"exponent {exp} lies beyond truncation order {self.order}")
        return self.coeffs.get(exp, ZERO)

    def __add__(self, other: "LocalSeries") -> "LocalSeries":
        order = min(self.order, other.order)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LocalSeries(self.var, out, order)

    def __mul__(self, other: "LocalSeries") -> "LocalSeries":
        order = min(self.order + other.valuation(), other.order + self.valuation())
        out: dict[int, RatExpr] = {}
        for ea, ca in self.coeffs.items():
            for eb, cb in other.coeffs.items():
                e = ea + eb
                if e >= order:
                    continue
                t = ca * cb
                out[e] = out[e] + t if e in out else t
        return LocalSeries(self.var, out, order)

    def terms(self) -> list[tuple[int, RatExpr]]:
        return sorted(self.coeffs.items())


def expand_local(e: RatExpr, var: str, order: int) -> LocalSeries:
    """Laurent expansion of ``e`` around ``var = 0``, exact below ``order``."""
    if e.is_zero():
        return LocalSeries(var, {}, order)
    num = e.num.coeffs_in(var)
    den = e.den.coeffs_in(var)
    shift = min(den)
    d = {j - shift: p for j, p in den.items()}
    d0 = d.get(0)
    if d0 is None or d0.is_zero():
        raise ValueError("pole off origin in expansion variable")
    lowest = min(num) - shift
    need = order - lowest  # number of inverse-denominator coefficients
    if need <= 0:
        return LocalSeries(var, {}, order)
    d0e = RatExpr(d0)
    inv: list[RatExpr] = [RatExpr.const(1) / d0e]
    deg = max(d)
    for k in range(1, need):
        acc = ZERO
        for j in range(1, min(k, deg) + 1):
            if j in d:
                acc = acc + RatExpr(d[j]) * inv[k - j]
        inv.append(-acc / d0e)
    out: dict[int, RatExpr] = {}
    for i, ni in num.items():
        ne = RatExpr(ni)
        for k in range(need):
            ex = i - shift + k
            if ex >= order:
                break
            if inv[k].is_zero():
                continue
            t = ne * inv[k]
            out[ex] = out[ex] + t if ex in out else t
    return LocalSeries(var, out, order)


def residue_at_origin(s: LocalSeries) -> RatExpr:
    """Coefficient of ``var**-1``."""
    if s.order < 0:
        raise ValueError("insufficient truncation: the residue lies beyond the computed window")
    return s.coeffs.get(-1, ZERO)


def residue_of_product(factors: Iterable[RatExpr], var: str) -> RatExpr:
    """Residue at ``var = 0`` of a product, expanding each factor only as far as needed."""
    factors = list(factors)
    if any(f.is_zero() for f in factors):
        return ZERO
    vals = [f.valuation(var) for f in factors]
    total = sum(vals)
    if total > -1:
        return ZERO
    series = None
    for f, v in zip(factors, vals):
        s = expand_local(f, var, -(total - v))
        series = s if series is None else series * s
    return residue_at_origin(series)


def derivative(e: RatExpr, var: str) -> RatExpr:
    def d(p: Poly) -> Poly:
        out = {}
        for m, c in p.terms.items():
            k = _mono_exp(m, var)
            if k:
                out[_mono_mul(m, ((var, -1),))] = c * k
        return Poly(out)

    return RatExpr(d(e.num) * e.den - e.num * d(e.den), e.den * e.den)
