"""Canonical rational expressions over jet coordinates.

An :class:`Expression` is kept in canonical form at all times: a quotient
``num / den`` of sparse polynomials with exact rational coefficients over
*atoms*.  Atoms are jet variables, the mass parameter ``m``, square roots
of canonical polynomials and ``sin``/``cos`` of canonical expressions.

Normalisation rules applied after every operation:

* ``sqrt(p)**2 -> p`` and ``cos(a)**2 -> 1 - sin(a)**2``;
* square roots are removed from the denominator by conjugate
  multiplication;
* common polynomial factors of numerator and denominator are cancelled
  (multivariate gcd, treating every atom as an independent symbol);
* the leading coefficient of the denominator is 1.

Two expressions that differ only by these rules therefore compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

import numpy as np

MAX_JET_LEVEL = 8

Number = Union[int, Fraction]


class JetOrderError(ValueError):
    """Raised when an operation would need a jet level above MAX_JET_LEVEL."""


class MissingAssignment(KeyError):
    pass


class NegativeRadicand(ValueError):
    pass


# ---------------------------------------------------------------------------
# atoms


class Atom:
    __slots__ = ()

    def diff(self, var: "JetVariable | Parameter") -> "Expression | None":
        raise NotImplementedError

    def text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class JetVariable(Atom):
    """A coordinate of the jet chart: ``x^i`` (level -1) or ``u^(k) i`` (level k).

    Level 0 is the velocity ``u``, level 1 its derivative ``u dot``, and so on.
    """

    level: int
    index: int
    sort_key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.index not in (1, 2):
            raise ValueError(f"coordinate index must be 1 or 2, got {self.index}")
        if not -1 <= self.level <= MAX_JET_LEVEL:
            raise JetOrderError(f"jet level {self.level} outside [-1, {MAX_JET_LEVEL}]")
        object.__setattr__(self, "sort_key", (0, self.level, self.index))

    @property
    def kind(self) -> str:
        return "position" if self.level < 0 else "velocity"

    @property
    def jet_order(self) -> int | None:
        return None if self.level < 0 else self.level

    @property
    def name(self) -> str:
        if self.level < 0:
            return f"x{self.index}"
        return "d" * self.level + f"u{self.index}"

    def raised(self) -> "JetVariable":
        if self.level >= MAX_JET_LEVEL:
            raise JetOrderError(f"total derivative of {self.name} exceeds jet level {MAX_JET_LEVEL}")
        return JetVariable(self.level + 1, self.index)

    def diff(self, var):
        return ONE if var == self else None

    def free_variables(self) -> frozenset:
        return frozenset((self,))

    def text(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Parameter(Atom):
    name: str
    sort_key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sort_key", (1, self.name))

    def diff(self, var):
        return ONE if var == self else None

    def free_variables(self) -> frozenset:
        return frozenset((self,))

    def text(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Sqrt(Atom):
    radicand: "Poly"
    sort_key: tuple = field(init=False, repr=False, compare=False)
    free: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sort_key", (2, self.radicand.key))
        object.__setattr__(self, "free", self.radicand.free_variables())

    def diff(self, var):
        if var not in self.free:
            return None
        d = _poly_diff(self.radicand, var)
        if d.is_zero_canonical():
            return None
        return d * Expression._atom(self) / (2 * Expression._from_poly(self.radicand))

    def free_variables(self) -> frozenset:
        return self.free

    def text(self) -> str:
        return f"sqrt({_poly_text(self.radicand)})"


@dataclass(frozen=True, slots=True)
class Sin(Atom):
    arg: "Expression"
    sort_key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sort_key", (3, self.arg.key))

    def diff(self, var):
        if var not in self.arg.free_variables():
            return None
        return self.arg.diff(var) * cos(self.arg)

    def free_variables(self) -> frozenset:
        return self.arg.free_variables()

    def text(self) -> str:
        return f"sin({self.arg.to_text()})"


@dataclass(frozen=True, slots=True)
class Cos(Atom):
    arg: "Expression"
    sort_key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sort_key", (4, self.arg.key))

    def diff(self, var):
        if var not in self.arg.free_variables():
            return None
        return -(self.arg.diff(var) * sin(self.arg))

    def free_variables(self) -> frozenset:
        return self.arg.free_variables()

    def text(self) -> str:
        return f"cos({self.arg.to_text()})"


# ---------------------------------------------------------------------------
# sparse polynomials; a monomial is a tuple of (atom, exponent) sorted by atom key


def _mono_key(mono) -> tuple:
    return tuple((a.sort_key, e) for a, e in mono)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for a, e in m2:
        d[a] = d.get(a, 0) + e
    return tuple(sorted(d.items(), key=lambda t: t[0].sort_key))


class Poly:
    """Immutable sparse polynomial ``{monomial: Fraction}`` without zero terms."""

    __slots__ = ("terms", "_key", "_atoms", "_free")

    def __init__(self, terms: dict):
        self.terms = terms
        self._key = None
        self._atoms = None
        self._free = None

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(sorted((_mono_key(m), (c.numerator, c.denominator)) for m, c in self.terms.items()))
        return self._key

    def __eq__(self, other):
        return isinstance(other, Poly) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def atoms(self) -> frozenset:
        if self._atoms is None:
            self._atoms = frozenset(a for m in self.terms for a, _ in m)
        return self._atoms

    def free_variables(self) -> frozenset:
        if self._free is None:
            out = set()
            for a in self.atoms():
                out |= a.free_variables()
            self._free = frozenset(out)
        return self._free

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and () in self.terms:
            return self.terms[()]
        return None

    def leading(self):
        mono = max(self.terms, key=_mono_key)
        return mono, self.terms[mono]

    def __repr__(self):
        return f"Poly({_poly_text(self)})"


def _const_poly(c) -> Poly:
    c = Fraction(c)
    return Poly({(): c} if c else {})


def _add_terms(t1: dict, t2: dict, sign: int = 1) -> dict:
    out = dict(t1)
    for m, c in t2.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _mul_terms(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for m1, c1 in t1.items():
        for m2, c2 in t2.items():
            m = _mono_mul(m1, m2)
            v = out.get(m, 0) + c1 * c2
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _scale_terms(t: dict, c) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in t.items()}


def _reducible(mono):
    for k, (a, e) in enumerate(mono):
        if e >= 2 and isinstance(a, (Sqrt, Cos)):
            return k
    return None


def _reduce(terms: dict) -> dict:
    """Apply sqrt(p)^2 -> p and cos^2 -> 1 - sin^2 until no monomial is reducible."""
    if not any(_reducible(m) is not None for m in terms):
        return terms
    out: dict = {}
    pending = list(terms.items())
    while pending:
        mono, c = pending.pop()
        k = _reducible(mono)
        if k is None:
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
            continue
        a, e = mono[k]
        rest = mono[:k] + mono[k + 1:]
        if isinstance(a, Sqrt):
            base = a.radicand.terms
        else:
            base = {(): Fraction(1), ((Sin(a.arg), 2),): Fraction(-1)}
        repl = {rest: c}
        for _ in range(e // 2):
            repl = _mul_terms(repl, base)
        if e % 2:
            repl = _mul_terms(repl, {((a, 1),): Fraction(1)})
        pending.extend(repl.items())
    return out


def _poly_pow_terms(t: dict, n: int) -> dict:
    out = {(): Fraction(1)}
    for _ in range(n):
        out = _reduce(_mul_terms(out, t))
    return out


def _formal_partial(p: Poly, atom: Atom) -> dict:
    out: dict = {}
    for mono, c in p.terms.items():
        for k, (a, e) in enumerate(mono):
            if a == atom:
                if e == 1:
                    m = mono[:k] + mono[k + 1:]
                else:
                    m = mono[:k] + ((a, e - 1),) + mono[k + 1:]
                out[m] = out.get(m, 0) + c * e
                break
    return {m: c for m, c in out.items() if c}


def _poly_diff(p: Poly, var) -> "Expression":
    total = ZERO
    if var not in p.free_variables():
        return total
    for a in sorted(p.atoms(), key=lambda t: t.sort_key):
        da = a.diff(var)
        if da is None:
            continue
        total = total + Expression._from_terms(_formal_partial(p, a)) * da
    return total


# ---------------------------------------------------------------------------
# gcd cancellation


@lru_cache(maxsize=None)
def _ring(n: int):
    from sympy.polys.domains import QQ
    from sympy.polys.rings import ring

    return ring(",".join(f"z{i}" for i in range(n)), QQ)[0]


def _cancel(num: dict, den: dict) -> tuple[dict, dict]:
    if len(den) == 1:
        (dm, dc), = den.items()
        # monomial denominator: divide out the common monomial factor
        common = dict(dm)
        for m in num:
            md = dict(m)
            for a in list(common):
                e = min(common[a], md.get(a, 0))
                if e:
                    common[a] = e
                else:
                    del common[a]
            if not common:
                break
        if common:
            num = {_mono_div(m, common): c for m, c in num.items()}
            den = {_mono_div(dm, common): dc}
        return num, den
    atoms = sorted({a for m in num for a, _ in m} | {a for m in den for a, _ in m}, key=lambda t: t.sort_key)
    idx = {a: i for i, a in enumerate(atoms)}
    n = len(atoms)
    R = _ring(n)
    dom = R.domain

    def to_ring(t):
        d = {}
        for m, c in t.items():
            exps = [0] * n
            for a, e in m:
                exps[idx[a]] = e
            d[tuple(exps)] = dom(c.numerator, c.denominator)
        return R.from_dict(d)

    def from_ring(p):
        out = {}
        for exps, c in p.items():
            mono = tuple((atoms[i], e) for i, e in enumerate(exps) if e)
            out[mono] = Fraction(int(c.numerator), int(c.denominator))
        return out

    p, q = to_ring(num).cancel(to_ring(den))
    return from_ring(p), from_ring(q)


def _mono_div(mono, common: dict):
    out = []
    for a, e in mono:
        e2 = e - common.get(a, 0)
        if e2:
            out.append((a, e2))
    return tuple(out)


def _split_on(terms: dict, atom: Atom) -> tuple[dict, dict]:
    """Write terms as a + b*atom (atom appears with exponent <= 1)."""
    a: dict = {}
    b: dict = {}
    for mono, c in terms.items():
        for k, (at, e) in enumerate(mono):
            if at == atom:
                b[mono[:k] + mono[k + 1:]] = c
                break
        else:
            a[mono] = c
    return a, b


# ---------------------------------------------------------------------------
# expressions


class Expression:
    """Immutable canonical expression ``num/den``.

    Supports ``+ - * /``, integer ``**``, :meth:`diff`, :meth:`subs`,
    :meth:`evaluate` and text round-tripping through :func:`parse`.
    """

    __slots__ = ("num", "den", "_hash", "_free")

    def __init__(self, num: Poly, den: Poly):
        self.num = num
        self.den = den
        self._hash = None
        self._free = None

    def __setattr__(self, name, value):
        # num/den are write-once; the two cache slots may be filled lazily
        if name in ("num", "den") and hasattr(self, name):
            raise AttributeError("Expression is immutable")
        object.__setattr__(self, name, value)

    # construction -----------------------------------------------------------
    @classmethod
    def _from_terms(cls, num: dict, den: dict | None = None) -> "Expression":
        num = _reduce(num)
        if den is None:
            return cls(Poly(num), _ONE_POLY)
        if not den:
            raise ZeroDivisionError("division by a canonically zero expression")
        den = _reduce(den)
        # conjugate multiplication until the denominator is free of square roots
        while True:
            roots = sorted((a for m in den for a, _ in m if isinstance(a, Sqrt)), key=lambda t: t.sort_key)
            if not roots:
                break
            r = roots[-1]
            a, b = _split_on(den, r)
            conj = _add_terms(a, _mul_terms(b, {((r, 1),): Fraction(1)}), -1)
            num = _reduce(_mul_terms(num, conj))
            den = _reduce(_add_terms(_mul_terms(a, a), _mul_terms(_mul_terms(b, b), r.radicand.terms), -1))
            if not den:
                raise ZeroDivisionError("denominator vanishes after rationalisation")
        if not num:
            return ZERO
        const = Poly(den).constant_value()
        if const is None:
            num, den = _cancel(num, den)
        dpoly = Poly(den)
        _, lc = dpoly.leading()
        if lc != 1:
            num = _scale_terms(num, 1 / lc)
            den = _scale_terms(den, 1 / lc)
            dpoly = Poly(den)
        return cls(Poly(num), dpoly)

    @classmethod
    def _from_poly(cls, p: Poly) -> "Expression":
        return cls(p, _ONE_POLY)

    @classmethod
    def _atom(cls, a: Atom) -> "Expression":
        return cls(Poly({((a, 1),): Fraction(1)}), _ONE_POLY)

    @classmethod
    def constant(cls, c: Number | float) -> "Expression":
        if isinstance(c, float):
            c = Fraction(c).limit_denominator(10**12) if not c.is_integer() else Fraction(int(c))
        return cls(_const_poly(c), _ONE_POLY)

    @classmethod
    def variable(cls, v: JetVariable | Parameter) -> "Expression":
        return cls._atom(v)

    # identity ---------------------------------------------------------------
    @property
    def key(self) -> tuple:
        return (self.num.key, self.den.key)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Expression.constant(other)
        return isinstance(other, Expression) and self.key == other.key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def is_zero_canonical(self) -> bool:
        return self.num.is_zero()

    def constant_value(self) -> Fraction | None:
        c = self.num.constant_value()
        if c is None or self.den.constant_value() != 1:
            return None
        return c

    def free_variables(self) -> frozenset:
        """Jet variables and parameters the expression depends on (including inside roots)."""
        if self._free is None:
            self._free = self.num.free_variables() | self.den.free_variables()
        return self._free

    def jet_variables(self) -> frozenset:
        return frozenset(v for v in self.free_variables() if isinstance(v, JetVariable))

    def jet_order(self) -> int:
        """Highest velocity level present; -1 if only positions (or nothing) appear."""
        return max((v.level for v in self.jet_variables()), default=-1)

    def atoms(self) -> frozenset:
        out = set()
        stack = list(self.num.atoms() | self.den.atoms())
        while stack:
            a = stack.pop()
            if a in out:
                continue
            out.add(a)
            if isinstance(a, Sqrt):
                stack.extend(a.radicand.atoms())
            elif isinstance(a, (Sin, Cos)):
                stack.extend(a.arg.atoms())
        return frozenset(out)

    def has_transcendentals(self) -> bool:
        """True if square roots or trig atoms appear (zero tests may be inconclusive)."""
        return any(isinstance(a, (Sqrt, Sin, Cos)) for a in self.atoms())

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = as_expression(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            if self.den is _ONE_POLY or self.den.constant_value() == 1:
                return Expression._from_terms(_add_terms(self.num.terms, other.num.terms))
            return Expression._from_terms(_add_terms(self.num.terms, other.num.terms), self.den.terms)
        num = _add_terms(_mul_terms(self.num.terms, other.den.terms), _mul_terms(other.num.terms, self.den.terms))
        return Expression._from_terms(num, _mul_terms(self.den.terms, other.den.terms))

    __radd__ = __add__

    def __neg__(self):
        return Expression(Poly(_scale_terms(self.num.terms, -1)), self.den)

    def __sub__(self, other):
        return self + (-as_expression(other))

    def __rsub__(self, other):
        return as_expression(other) + (-self)

    def __mul__(self, other):
        other = as_expression(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        num = _mul_terms(self.num.terms, other.num.terms)
        if self.den.constant_value() == 1 and other.den.constant_value() == 1:
            return Expression._from_terms(num)
        return Expression._from_terms(num, _mul_terms(self.den.terms, other.den.terms))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_expression(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by a canonically zero expression")
        return Expression._from_terms(_mul_terms(self.num.terms, other.den.terms),
                                      _mul_terms(self.den.terms, other.num.terms))

    def __rtruediv__(self, other):
        return as_expression(other) / self

    def __pow__(self, n: int):
        if isinstance(n, Fraction) and n.denominator == 1:
            n = int(n)
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported; use sqrt() for halves")
        if n == 0:
            return ONE
        if n < 0:
            return ONE / (self ** (-n))
        num = _poly_pow_terms(self.num.terms, n)
        if self.den.constant_value() == 1:
            return Expression._from_terms(num)
        return Expression._from_terms(num, _poly_pow_terms(self.den.terms, n))

    # calculus ---------------------------------------------------------------
    def diff(self, var: JetVariable | Parameter) -> "Expression":
        """Partial derivative with respect to a jet variable or parameter."""
        if var not in self.free_variables():
            return ZERO
        dn = _poly_diff(self.num, var)
        if self.den.constant_value() == 1:
            return dn
        dd = _poly_diff(self.den, var)
        d = Expression._from_poly(self.den)
        n = Expression._from_poly(self.num)
        return (dn * d - n * dd) / (d * d)

    def subs(self, mapping: Mapping) -> "Expression":
        """Substitute expressions (or numbers) for jet variables / parameters (objects or names)."""
        mapping = {_as_atom_key(k): as_expression(v) for k, v in mapping.items()}
        if not (self.free_variables() & set(mapping)):
            return self
        cache: dict = {}
        num = _poly_subs(self.num, mapping, cache)
        if self.den.constant_value() == 1:
            return num
        return num / _poly_subs(self.den, mapping, cache)

    # numerics ---------------------------------------------------------------
    def evaluate(self, point: Mapping):
        """Evaluate at a point; values may be floats or equally shaped numpy arrays.

        Keys may be JetVariable/Parameter objects or their names (``"du1"``, ``"m"``).
        """
        env = _normalise_point(point)
        cache: dict = {}
        num = _poly_value(self.num, env, cache)
        if self.den.constant_value() == 1:
            return num
        return num / _poly_value(self.den, env, cache)

    def lambdify(self, args: Iterable, module: str = "math"):
        """Compile to a Python function of the given variables (positional)."""
        args = [_as_atom_key(a) for a in args]
        names = {a: f"a{i}" for i, a in enumerate(args)}
        missing = [v for v in self.free_variables() if v not in names]
        if missing:
            raise MissingAssignment(f"lambdify: no argument for {sorted(map(repr, missing))}")
        body = self._code(names)
        src = f"def _f({', '.join(names[a] for a in args)}):\n    return {body}\n"
        ns = {"_sqrt": _checked_sqrt if module == "math" else np.sqrt,
              "_sin": math.sin if module == "math" else np.sin,
              "_cos": math.cos if module == "math" else np.cos}
        exec(compile(src, "<expression>", "exec"), ns)
        fn = ns["_f"]
        fn.__doc__ = self.to_text()
        return fn

    def _code(self, names) -> str:
        body = f"({_poly_code(self.num, names)})"
        if self.den.constant_value() != 1:
            body += f"/({_poly_code(self.den, names)})"
        return body

    # text -------------------------------------------------------------------
    def to_text(self) -> str:
        num = _poly_text(self.num)
        if self.den.constant_value() == 1:
            return num
        return f"({num})/({_poly_text(self.den)})"

    __str__ = to_text

    def __repr__(self):
        return f"Expression({self.to_text()!r})"

    def leaves(self) -> int:
        """Number of variable leaves in the printed canonical tree."""
        count = 0
        stack = [self.num, self.den]
        while stack:
            p = stack.pop()
            for mono in p.terms:
                for a, _ in mono:
                    if isinstance(a, (JetVariable, Parameter)):
                        count += 1
                    elif isinstance(a, Sqrt):
                        stack.append(a.radicand)
                    else:
                        stack.extend([a.arg.num, a.arg.den])
        return count


def compile_many(exprs, args: Iterable, module: str = "math"):
    """Compile several expressions into one function returning a tuple of values."""
    exprs = [as_expression(e) for e in exprs]
    args = [_as_atom_key(a) for a in args]
    names = {a: f"a{i}" for i, a in enumerate(args)}
    for e in exprs:
        missing = [v for v in e.free_variables() if v not in names]
        if missing:
            raise MissingAssignment(f"compile_many: no argument for {sorted(map(repr, missing))}")
    body = ", ".join(e._code(names) for e in exprs)
    src = f"def _f({', '.join(names[a] for a in args)}):\n    return ({body}{',' if len(exprs) == 1 else ''})\n"
    ns = {"_sqrt": _checked_sqrt if module == "math" else np.sqrt,
          "_sin": math.sin if module == "math" else np.sin,
          "_cos": math.cos if module == "math" else np.cos}
    exec(compile(src, "<expressions>", "exec"), ns)
    return ns["_f"]


_ONE_POLY = Poly({(): Fraction(1)})
ZERO = Expression(Poly({}), _ONE_POLY)
ONE = Expression(_ONE_POLY, _ONE_POLY)


def as_expression(v) -> Expression:
    if isinstance(v, Expression):
        return v
    if isinstance(v, (int, Fraction, float)) and not isinstance(v, bool):
        return Expression.constant(v)
    if isinstance(v, (JetVariable, Parameter)):
        return Expression.variable(v)
    raise TypeError(f"cannot convert {type(v).__name__} to Expression")


# ---------------------------------------------------------------------------
# functions


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def _sqrt_fraction(c: Fraction) -> Fraction | None:
    if _is_square(c.numerator) and _is_square(c.denominator):
        return Fraction(math.isqrt(c.numerator), math.isqrt(c.denominator))
    return None


def _sqrt_poly(p: Poly) -> Expression:
    if p.is_zero():
        return ZERO
    c = p.constant_value()
    if c is not None:
        if c < 0:
            raise NegativeRadicand(f"square root of negative constant {c}")
        s = _sqrt_fraction(c)
        return Expression.constant(s) if s is not None else Expression._atom(Sqrt(p))
    _, lc = p.leading()
    outer = ONE
    mag = abs(lc)
    if mag != 1:
        s = _sqrt_fraction(mag)
        outer = Expression.constant(s) if s is not None else Expression._atom(Sqrt(_const_poly(mag)))
        p = Poly(_scale_terms(p.terms, 1 / mag))
    if len(p.terms) == 1:
        (mono, coef), = p.terms.items()
        pulled = []
        left = []
        for a, e in mono:
            # sqrt atoms are nonnegative; other atoms only come out of 4th powers
            step = 2 if isinstance(a, Sqrt) else 4
            q, r = divmod(e, step)
            if q:
                pulled.append((a, q * step // 2))
            if r:
                left.append((a, r))
        outer = outer * Expression._from_terms({tuple(pulled): Fraction(1)})
        if not left:
            if coef < 0:
                raise NegativeRadicand("square root of a negative monomial")
            return outer
        p = Poly({tuple(left): coef})
    return outer * Expression._atom(Sqrt(p))


def sqrt(e) -> Expression:
    """Principal square root, simplified where exact."""
    e = as_expression(e)
    if e.den.constant_value() == 1:
        return _sqrt_poly(e.num)
    # sqrt(N/D) = sqrt(N*D) / sqrt(D^2), valid for either sign of D
    nd = Poly(_reduce(_mul_terms(e.num.terms, e.den.terms)))
    dd = Poly(_reduce(_mul_terms(e.den.terms, e.den.terms)))
    return _sqrt_poly(nd) / _sqrt_poly(dd)


def sin(e) -> Expression:
    e = as_expression(e)
    if e.is_zero_canonical():
        return ZERO
    return Expression._atom(Sin(e))


def cos(e) -> Expression:
    e = as_expression(e)
    if e.is_zero_canonical():
        return ONE
    return Expression._atom(Cos(e))


# ---------------------------------------------------------------------------
# substitution, evaluation, code generation, printing


def _atom_subs(a: Atom, mapping, cache) -> Expression:
    if a in cache:
        return cache[a]
    if isinstance(a, (JetVariable, Parameter)):
        out = mapping.get(a) or Expression._atom(a)
    elif isinstance(a, Sqrt):
        out = sqrt(_poly_subs(a.radicand, mapping, cache)) if a.free & set(mapping) else Expression._atom(a)
    elif isinstance(a, Sin):
        out = sin(a.arg.subs(mapping))
    else:
        out = cos(a.arg.subs(mapping))
    cache[a] = out
    return out


def _poly_subs(p: Poly, mapping, cache) -> Expression:
    total = ZERO
    for mono, c in sorted(p.terms.items(), key=lambda t: _mono_key(t[0])):
        term = Expression.constant(c)
        for a, e in mono:
            term = term * _atom_subs(a, mapping, cache) ** e
        total = total + term
    return total


def _as_atom_key(k):
    if isinstance(k, (JetVariable, Parameter)):
        return k
    if isinstance(k, str):
        from .parser import identifier_atom

        return identifier_atom(k)
    raise TypeError(f"bad variable key {k!r}")


def _normalise_point(point: Mapping) -> dict:
    return {_as_atom_key(k): v for k, v in point.items()}


def _atom_value(a: Atom, env, cache):
    if a in cache:
        return cache[a]
    if isinstance(a, (JetVariable, Parameter)):
        try:
            v = env[a]
        except KeyError:
            raise MissingAssignment(f"no value assigned to {a.text()}") from None
    elif isinstance(a, Sqrt):
        r = _poly_value(a.radicand, env, cache)
        if np.any(np.asarray(r) < 0):
            raise NegativeRadicand(f"negative radicand in {a.text()}")
        v = np.sqrt(r)
    elif isinstance(a, Sin):
        v = np.sin(a.arg.evaluate(env))
    else:
        v = np.cos(a.arg.evaluate(env))
    cache[a] = v
    return v


def _poly_value(p: Poly, env, cache):
    total = 0.0
    for mono, c in p.terms.items():
        term = float(c)
        for a, e in mono:
            v = _atom_value(a, env, cache)
            term = term * (v if e == 1 else v ** e)
        total = total + term
    return total


def _checked_sqrt(x):
    if x < 0:
        raise NegativeRadicand("negative radicand")
    return math.sqrt(x)


def _atom_code(a: Atom, names) -> str:
    if isinstance(a, (JetVariable, Parameter)):
        return names[a]
    if isinstance(a, Sqrt):
        return f"_sqrt({_poly_code(a.radicand, names)})"
    inner = f"({_poly_code(a.arg.num, names)})"
    if a.arg.den.constant_value() != 1:
        inner += f"/({_poly_code(a.arg.den, names)})"
    return f"_{'sin' if isinstance(a, Sin) else 'cos'}({inner})"


def _poly_code(p: Poly, names) -> str:
    if p.is_zero():
        return "0.0"
    parts = []
    for mono, c in sorted(p.terms.items(), key=lambda t: _mono_key(t[0])):
        factors = [repr(float(c))]
        for a, e in mono:
            code = _atom_code(a, names)
            factors.append(code if e == 1 else f"{code}**{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_text(p: Poly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for mono, c in sorted(p.terms.items(), key=lambda t: _mono_key(t[0]), reverse=True):
        mag = abs(c)
        factors = [a.text() if e == 1 else f"{a.text()}^{e}" for a, e in mono]
        if mag != 1 or not factors:
            factors.insert(0, _coef_text(mag))
        body = "*".join(factors)
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)
