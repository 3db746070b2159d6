"""Exact multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`, so nested brackets never lose
precision and identities can be checked by plain equality. Every polynomial
carries its ordered tuple of variable names; arithmetic between polynomials
with different variable tuples raises :class:`VariableMismatchError` rather
than merging silently.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

Exponents = tuple[int, ...]


class VariableMismatchError(ValueError):
    pass


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coefficient required, got {type(value).__name__}")


class Polynomial:
    """Sparse polynomial ``sum_k c_k x^alpha_k`` with rational coefficients."""

    __slots__ = ("variables", "_terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponents, object] | None = None):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in {self.variables}")
        n = len(self.variables)
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for {n} variables")
            c = _as_fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
                if not clean[exps]:
                    del clean[exps]
        self._terms = clean

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponents, Fraction]) -> Polynomial:
        p = cls.__new__(cls)
        p.variables = variables
        p._terms = terms
        return p

    # constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, variables: Iterable[str]) -> Polynomial:
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, value, variables: Iterable[str]) -> Polynomial:
        variables = tuple(variables)
        c = _as_fraction(value)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def variable(cls, name: str, variables: Iterable[str]) -> Polynomial:
        variables = tuple(variables)
        try:
            i = variables.index(name)
        except ValueError:
            raise VariableMismatchError(f"unknown variable {name!r}") from None
        exps = [0] * len(variables)
        exps[i] = 1
        return cls._raw(variables, {tuple(exps): Fraction(1)})

    # inspection -----------------------------------------------------------

    @property
    def terms(self) -> dict[Exponents, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * len(self.variables), Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    # arithmetic -----------------------------------------------------------

    def _check(self, other: Polynomial) -> None:
        if other.variables != self.variables:
            raise VariableMismatchError(
                f"variable lists differ: {self.variables} vs {other.variables}"
            )

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.variables)

    def __add__(self, other) -> Polynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for exps, c in other._terms.items():
            s = out.get(exps, 0) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Polynomial._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> Polynomial:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> Polynomial:
        return (-self) + other

    def __mul__(self, other) -> Polynomial:
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.variables, out)

    def __rmul__(self, other) -> Polynomial:
        return self.__mul__(other)

    def __truediv__(self, other) -> Polynomial:
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self.scale(1 / c)

    def __pow__(self, n: int) -> Polynomial:
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = Polynomial.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, factor) -> Polynomial:
        c = _as_fraction(factor)
        if not c:
            return Polynomial.zero(self.variables)
        return Polynomial._raw(self.variables, {e: v * c for e, v in self._terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.variables == other.variables and self._terms == other._terms
        try:
            return self == Polynomial.constant(other, self.variables)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.variables, frozenset(self._terms.items())))

    # calculus and substitution --------------------------------------------

    def partial(self, var: str) -> Polynomial:
        try:
            i = self.variables.index(var)
        except ValueError:
            raise VariableMismatchError(f"unknown variable {var!r}") from None
        out: dict[Exponents, Fraction] = {}
        for exps, c in self._terms.items():
            k = exps[i]
            if k:
                e = exps[:i] + (k - 1,) + exps[i + 1:]
                out[e] = c * k
        return Polynomial._raw(self.variables, out)

    def substitute(self, mapping: Mapping[str, Polynomial], variables: Iterable[str]) -> Polynomial:
        """Compose: replace each variable by a polynomial over ``variables``.

        Variables absent from ``mapping`` must also appear in the target list
        and are carried over unchanged.
        """
        target = tuple(variables)
        images = []
        for name in self.variables:
            if name in mapping:
                img = mapping[name]
                if img.variables != target:
                    raise VariableMismatchError(f"image of {name!r} is over {img.variables}")
            else:
                img = Polynomial.variable(name, target)
            images.append(img)
        result = Polynomial.zero(target)
        powers: list[dict[int, Polynomial]] = [{} for _ in images]

        def power(i: int, k: int) -> Polynomial:
            if k not in powers[i]:
                powers[i][k] = images[i] ** k
            return powers[i][k]

        for exps, c in self._terms.items():
            term = Polynomial.constant(c, target)
            for i, k in enumerate(exps):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def embed(self, variables: Iterable[str]) -> Polynomial:
        """Re-express over a superset (or reordering) of the current variables."""
        target = tuple(variables)
        missing = [v for v in self.variables if v not in target]
        used = {self.variables[i] for e in self._terms for i, k in enumerate(e) if k}
        if used & set(missing):
            raise VariableMismatchError(f"variables {sorted(used & set(missing))} not in target")
        index = [target.index(v) if v in target else None for v in self.variables]
        out = {}
        for exps, c in self._terms.items():
            e = [0] * len(target)
            for j, k in zip(index, exps):
                if k:
                    e[j] = k
            out[tuple(e)] = c
        return Polynomial._raw(target, out)

    def evaluate(self, values: Mapping[str, object]):
        """Evaluate at a point; exact when all values are rational."""
        point = [values[v] for v in self.variables]
        total = 0
        for exps, c in self._terms.items():
            term = c
            for x, k in zip(point, exps):
                if k:
                    term = term * x**k
            total = total + term
        return total

    def integrate_box(self, bounds: Mapping[str, tuple[object, object]]) -> Polynomial:
        """Exact definite integral over the named variables (a box domain)."""
        out: dict[Exponents, Fraction] = {}
        idx = {}
        for name, (lo, hi) in bounds.items():
            if name not in self.variables:
                raise VariableMismatchError(f"unknown variable {name!r}")
            idx[self.variables.index(name)] = (_as_fraction(lo), _as_fraction(hi))
        for exps, c in self._terms.items():
            e = list(exps)
            for i, (lo, hi) in idx.items():
                k = e[i] + 1
                c = c * (hi**k - lo**k) / k
                e[i] = 0
            if c:
                key = tuple(e)
                s = out.get(key, 0) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Polynomial._raw(self.variables, out)

    # rendering ------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps in sorted(self._terms, reverse=True):
            c = self._terms[exps]
            mono = "*".join(
                name if k == 1 else f"{name}^{k}"
                for name, k in zip(self.variables, exps)
                if k
            )
            mag = abs(c)
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Polynomial({self.variables}, {str(self)!r})"


@dataclass(frozen=True)
class PolyVec3:
    """Three polynomial components over a shared variable list."""

    x: Polynomial
    y: Polynomial
    z: Polynomial

    def __post_init__(self):
        if not (self.x.variables == self.y.variables == self.z.variables):
            raise VariableMismatchError("PolyVec3 components must share variables")

    @classmethod
    def zero(cls, variables: Iterable[str]) -> PolyVec3:
        z = Polynomial.zero(variables)
        return cls(z, z, z)

    @classmethod
    def of(cls, components: Iterable[Polynomial]) -> PolyVec3:
        return cls(*components)

    @property
    def variables(self) -> tuple[str, ...]:
        return self.x.variables

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def __getitem__(self, i: int) -> Polynomial:
        return (self.x, self.y, self.z)[i]

    def __add__(self, other: PolyVec3) -> PolyVec3:
        return PolyVec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: PolyVec3) -> PolyVec3:
        return PolyVec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> PolyVec3:
        return PolyVec3(-self.x, -self.y, -self.z)

    def scale(self, factor) -> PolyVec3:
        if isinstance(factor, Polynomial):
            return PolyVec3(self.x * factor, self.y * factor, self.z * factor)
        return PolyVec3(self.x.scale(factor), self.y.scale(factor), self.z.scale(factor))

    def substitute(self, mapping: Mapping[str, Polynomial], variables: Iterable[str]) -> PolyVec3:
        variables = tuple(variables)
        return PolyVec3(*(p.substitute(mapping, variables) for p in self))

    def embed(self, variables: Iterable[str]) -> PolyVec3:
        return PolyVec3(*(p.embed(variables) for p in self))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self)


def _axes(axis_triple: Iterable[str]) -> tuple[str, str, str]:
    axes = tuple(axis_triple)
    if len(axes) != 3:
        raise ValueError("axis_triple must name exactly three variables")
    return axes  # type: ignore[return-value]


def grad3(p: Polynomial, axis_triple: Iterable[str]) -> PolyVec3:
    a, b, c = _axes(axis_triple)
    return PolyVec3(p.partial(a), p.partial(b), p.partial(c))


def div3(v: PolyVec3, axis_triple: Iterable[str]) -> Polynomial:
    a, b, c = _axes(axis_triple)
    return v.x.partial(a) + v.y.partial(b) + v.z.partial(c)


def curl3(v: PolyVec3, axis_triple: Iterable[str]) -> PolyVec3:
    a, b, c = _axes(axis_triple)
    return PolyVec3(
        v.z.partial(b) - v.y.partial(c),
        v.x.partial(c) - v.z.partial(a),
        v.y.partial(a) - v.x.partial(b),
    )


def cross3(u: PolyVec3, w: PolyVec3) -> PolyVec3:
    return PolyVec3(
        u.y * w.z - u.z * w.y,
        u.z * w.x - u.x * w.z,
        u.x * w.y - u.y * w.x,
    )


def dot3(u: PolyVec3, w: PolyVec3) -> Polynomial:
    return u.x * w.x + u.y * w.y + u.z * w.z


def triple3(u: PolyVec3, v: PolyVec3, w: PolyVec3) -> Polynomial:
    """Scalar triple product ``u . (v x w)``."""
    return dot3(u, cross3(v, w))


def random_polynomial(rng, variables: Iterable[str], max_degree: int, n_terms: int,
                      max_num: int = 5, max_den: int = 4) -> Polynomial:
    """Sparse random polynomial with small rational coefficients.

    ``rng`` is a :class:`random.Random`; the result is deterministic for a
    seeded generator.
    """
    variables = tuple(variables)
    n = len(variables)
    terms: dict[Exponents, Fraction] = {}
    for _ in range(n_terms):
        deg = rng.randint(0, max_degree)
        exps = [0] * n
        for _ in range(deg):
            exps[rng.randrange(n)] += 1
        num = rng.randint(-max_num, max_num)
        den = rng.randint(1, max_den)
        terms[tuple(exps)] = terms.get(tuple(exps), Fraction(0)) + Fraction(num, den)
    return Polynomial(variables, terms)

