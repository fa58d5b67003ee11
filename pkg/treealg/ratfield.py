import logging
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

import sympy
from sympy import Poly, QQ

from treealg.errors import (IndexRangeError, PoleError, UndefinedDegreeError,
                            UnsupportedSubstitutionError, VariableMismatchError)

'''
Exact arithmetic in the graded ring M(n) of rational functions on the ordered
configuration space of n points: polynomials in z_0, ..., z_{n-1} with the
differences (z_i - z_j)^-1 adjoined.

A RatFunc is stored as a numerator (sparse map exponent tuple -> Fraction)
over a product of diagonal factors (z_i - z_j)^m with i < j. The canonical
form divides the numerator by every diagonal factor it is divisible by, so two
RatFuncs are equal exactly when their stored data are equal.
'''

logger = logging.getLogger(__name__)


def _fraction(value):
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def _poly_add(p, q, scale=1):
    "Return p + scale * q"
    result = dict(p)
    for exps, c in q.items():
        total = result.get(exps, 0) + scale * c
        if total:
            result[exps] = total
        else:
            result.pop(exps, None)
    return result


def _poly_scale(p, c):
    if not c:
        return {}
    return {exps: c * v for exps, v in p.items()}


def _poly_mul(p, q):
    if not p or not q:
        return {}
    result = defaultdict(Fraction)
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            result[tuple(a + b for a, b in zip(e1, e2))] += c1 * c2
    return {exps: c for exps, c in result.items() if c}


def _shift(p, j):
    "Multiply p by z_j"
    return {exps[:j] + (exps[j] + 1,) + exps[j + 1:]: c for exps, c in p.items()}


@lru_cache(maxsize=None)
def _diagonal_power(n, i, j, k):
    "(z_i - z_j)^k as a frozen polynomial, k >= 0"
    unit = tuple(0 for _ in range(n))
    p = {unit: Fraction(1)}
    if k:
        base = {unit[:i] + (1,) + unit[i + 1:]: Fraction(1), unit[:j] + (1,) + unit[j + 1:]: Fraction(-1)}
        for _ in range(k):
            p = _poly_mul(p, base)
    return tuple(p.items())


def _diagonal_poly(n, i, j, k):
    return dict(_diagonal_power(n, i, j, k))


def _divide_by_diagonal(p, i, j):
    """Synthetic division of p by (z_i - z_j), seen as a polynomial in z_i.
    Return the quotient, or None when the remainder is nonzero."""
    by_power = defaultdict(dict)
    for exps, c in p.items():
        by_power[exps[i]][exps[:i] + (0,) + exps[i + 1:]] = c
    carry = {}
    quotient = {}
    for k in range(max(by_power), 0, -1):
        carry = _poly_add(by_power.get(k, {}), _shift(carry, j))
        for exps, c in carry.items():
            quotient[exps[:i] + (k - 1,) + exps[i + 1:]] = c
    remainder = _poly_add(by_power.get(0, {}), _shift(carry, j))
    return None if remainder else quotient


def _poly_diff(p, i):
    result = {}
    for exps, c in p.items():
        if exps[i]:
            result[exps[:i] + (exps[i] - 1,) + exps[i + 1:]] = c * exps[i]
    return result


class RatFunc():
    '''
    An element of M(n). Instances are immutable: every operation returns a new
    normalized RatFunc.
    @n_vars: number of variables z_0..z_{n-1}
    @num: map exponent tuple -> rational coefficient
    @den: map (i, j), i < j -> multiplicity of (z_i - z_j) in the denominator
    '''

    __slots__ = ("n_vars", "num", "den", "_hash")

    def __init__(self, n_vars, num=None, den=None, normalized=False):
        self.n_vars = n_vars
        self.num = {}
        for exps, c in (num or {}).items():
            assert len(exps) == n_vars, f"exponent {exps} does not have {n_vars} entries"
            c = _fraction(c)
            if c:
                self.num[tuple(exps)] = c
        self.den = {}
        for (i, j), m in (den or {}).items():
            if not 0 <= i < j < n_vars:
                raise IndexRangeError(f"diagonal factor ({i}, {j}) is not ordered inside {n_vars} variables")
            if m < 0:
                raise ValueError(f"negative multiplicity {m} for factor ({i}, {j})")
            if m:
                self.den[(i, j)] = m
        if not normalized:
            self._normalize()
        self._hash = None

    def _normalize(self):
        if not self.num:
            self.den = {}
            return
        for pair in sorted(self.den):
            while self.den[pair]:
                quotient = _divide_by_diagonal(self.num, *pair)
                if quotient is None:
                    break
                self.num = quotient
                self.den[pair] -= 1
        self.den = {pair: m for pair, m in self.den.items() if m}

    # constructors

    @classmethod
    def zero(cls, n_vars):
        return cls(n_vars, normalized=True)

    @classmethod
    def constant(cls, n_vars, c):
        return cls(n_vars, {(0,) * n_vars: c}, normalized=True)

    @classmethod
    def variable(cls, n_vars, i):
        if not 0 <= i < n_vars:
            raise IndexRangeError(f"variable {i} out of range for {n_vars} variables")
        return cls(n_vars, {tuple(int(k == i) for k in range(n_vars)): 1}, normalized=True)

    @classmethod
    def diagonal(cls, n_vars, i, j, power=1):
        "(z_i - z_j)^power for any integer power, i != j"
        if i == j or not (0 <= i < n_vars and 0 <= j < n_vars):
            raise IndexRangeError(f"no diagonal factor ({i}, {j}) in {n_vars} variables")
        sign = 1
        if i > j:
            i, j = j, i
            sign = -1 if power % 2 else 1
        if power >= 0:
            return cls(n_vars, _poly_scale(_diagonal_poly(n_vars, i, j, power), Fraction(sign)), normalized=True)
        return cls(n_vars, {(0,) * n_vars: sign}, {(i, j): -power}, normalized=True)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.n_vars != self.n_vars:
                raise VariableMismatchError(f"{self.n_vars} variables against {other.n_vars}")
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.constant(self.n_vars, other)
        return NotImplemented

    # ring structure

    def _lift(self, den):
        "numerator of self written over the (larger) denominator den"
        p = self.num
        for (i, j), m in den.items():
            extra = m - self.den.get((i, j), 0)
            assert extra >= 0, "target denominator must contain the current one"
            if extra:
                p = _poly_mul(p, _diagonal_poly(self.n_vars, i, j, extra))
        return p

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        den = dict(self.den)
        for pair, m in other.den.items():
            den[pair] = max(m, den.get(pair, 0))
        return RatFunc(self.n_vars, _poly_add(self._lift(den), other._lift(den)), den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.n_vars, _poly_scale(self.num, Fraction(-1)), self.den, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatFunc(self.n_vars, _poly_scale(self.num, _fraction(other)), self.den, normalized=True)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return RatFunc.zero(self.n_vars)
        den = dict(self.den)
        for pair, m in other.den.items():
            den[pair] = den.get(pair, 0) + m
        return RatFunc(self.n_vars, _poly_mul(self.num, other.num), den)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = RatFunc.constant(self.n_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise PoleError("division by the zero constant")
            return self * (1 / _fraction(other))
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RatFunc.constant(self.n_vars, other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.n_vars == other.n_vars and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_vars, frozenset(self.num.items()), frozenset(self.den.items())))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # inspection

    @property
    def is_zero(self):
        return not self.num

    @property
    def is_constant(self):
        return not self.den and all(not any(exps) for exps in self.num)

    @property
    def constant_value(self):
        assert self.is_constant, f"{self} is not a constant"
        return self.num.get((0,) * self.n_vars, Fraction(0))

    @property
    def denominator_degree(self):
        return sum(self.den.values())

    def components(self):
        "Homogeneous components, as a map degree -> RatFunc"
        parts = defaultdict(dict)
        for exps, c in self.num.items():
            parts[sum(exps)][exps] = c
        shift = self.denominator_degree
        return {d - shift: RatFunc(self.n_vars, p, self.den) for d, p in sorted(parts.items())}

    @property
    def degree(self):
        "Grading degree of a homogeneous element, None for zero or inhomogeneous input"
        degrees = {sum(exps) for exps in self.num}
        if len(degrees) != 1:
            return None
        return degrees.pop() - self.denominator_degree

    @property
    def is_homogeneous(self):
        return self.degree is not None

    def unit_factorization(self):
        """Write a unit of M(n) as c * prod (z_i - z_j)^e_ij.
        Return (c, {(i, j): e_ij}) or None when self is not a unit."""
        if not self.num:
            return None
        p = self.num
        exponents = {pair: -m for pair, m in self.den.items()}
        for i in range(self.n_vars):
            for j in range(i + 1, self.n_vars):
                while len(p) > 1 or any(any(exps) for exps in p):
                    quotient = _divide_by_diagonal(p, i, j)
                    if quotient is None:
                        break
                    p = quotient
                    exponents[(i, j)] = exponents.get((i, j), 0) + 1
        if len(p) != 1 or any(any(exps) for exps in p):
            return None
        return next(iter(p.values())), {pair: e for pair, e in exponents.items() if e}

    def inverse(self):
        factorization = self.unit_factorization()
        if factorization is None:
            raise UnsupportedSubstitutionError(f"{self} is not a unit of M({self.n_vars})")
        c, exponents = factorization
        num = {(0,) * self.n_vars: 1 / c}
        den = {}
        for (i, j), e in exponents.items():
            if e > 0:
                den[(i, j)] = e
            else:
                num = _poly_mul(num, _diagonal_poly(self.n_vars, i, j, -e))
        return RatFunc(self.n_vars, num, den, normalized=True)

    # calculus

    def partial(self, i):
        if not 0 <= i < self.n_vars:
            raise IndexRangeError(f"variable {i} out of range for {self.n_vars} variables")
        result = RatFunc(self.n_vars, _poly_diff(self.num, i), self.den)
        for (a, b), m in self.den.items():
            if i not in (a, b):
                continue
            sign = -m if i == a else m
            den = dict(self.den)
            den[(a, b)] = m + 1
            result = result + RatFunc(self.n_vars, _poly_scale(self.num, Fraction(sign)), den)
        return result

    def euler(self):
        "sum_i z_i * d f / d z_i"
        result = RatFunc.zero(self.n_vars)
        for i in range(self.n_vars):
            result = result + RatFunc.variable(self.n_vars, i) * self.partial(i)
        return result

    # substitutions

    def relabel(self, mapping, n_target):
        """Send z_k to z_mapping[k] inside M(n_target); mapping must be injective."""
        if len(mapping) != self.n_vars:
            raise VariableMismatchError(f"mapping of length {len(mapping)} for {self.n_vars} variables")
        if len(set(mapping)) != len(mapping) or any(not 0 <= t < n_target for t in mapping):
            raise IndexRangeError(f"mapping {mapping} is not an injection into {n_target} variables")
        num = {}
        for exps, c in self.num.items():
            target = [0] * n_target
            for k, e in enumerate(exps):
                target[mapping[k]] = e
            num[tuple(target)] = c
        den = {}
        sign = 1
        for (i, j), m in self.den.items():
            a, b = mapping[i], mapping[j]
            if a > b:
                a, b = b, a
                sign *= (-1) ** m
            den[(a, b)] = m
        return RatFunc(n_target, _poly_scale(num, Fraction(sign)), den, normalized=True)

    def subst(self, images):
        """Compose with z_k -> images[k]. Every substituted diagonal difference
        must be a unit of the target ring."""
        if len(images) != self.n_vars:
            raise VariableMismatchError(f"{len(images)} images for {self.n_vars} variables")
        n_target = images[0].n_vars if images else 0
        powers = [{0: RatFunc.constant(n_target, 1)} for _ in images]

        def power(k, e):
            if e not in powers[k]:
                powers[k][e] = power(k, e - 1) * images[k]
            return powers[k][e]

        result = RatFunc.zero(n_target)
        for exps, c in self.num.items():
            term = RatFunc.constant(n_target, c)
            for k, e in enumerate(exps):
                if e:
                    term = term * power(k, e)
            result = result + term
        for (i, j), m in self.den.items():
            difference = images[i] - images[j]
            try:
                result = result * difference.inverse() ** m
            except UnsupportedSubstitutionError:
                raise UnsupportedSubstitutionError(
                    f"z_{i} - z_{j} becomes {difference}, which has poles off the diagonals") from None
        return result

    # numerics

    def eval(self, point):
        """Value at a point of pairwise distinct complex coordinates.
        Monomials are evaluated first, the exact coefficient is applied last."""
        if len(point) != self.n_vars:
            raise VariableMismatchError(f"point of length {len(point)} for {self.n_vars} variables")
        z = [complex(v) for v in point]
        value = 0j
        for exps, c in self.num.items():
            term = 1 + 0j
            for k, e in enumerate(exps):
                if e:
                    term *= z[k] ** e
            value += term * c.numerator / c.denominator
        for (i, j), m in self.den.items():
            difference = z[i] - z[j]
            if difference == 0:
                raise PoleError(f"z_{i} = z_{j} at {point}")
            value /= difference ** m
        return value

    def restrict_to_line(self, a, b, u):
        """Restriction to z = a + u b as a pair (numerator, denominator) of
        univariate polynomials in the sympy symbol u over QQ."""
        lines = [Poly(_rational(bk) * u + _rational(ak), u, domain=QQ) for ak, bk in zip(a, b)]
        numerator = Poly(0, u, domain=QQ)
        for exps, c in self.num.items():
            term = Poly(_rational(c), u, domain=QQ)
            for k, e in enumerate(exps):
                if e:
                    term = term * lines[k] ** e
            numerator = numerator + term
        denominator = Poly(1, u, domain=QQ)
        for (i, j), m in self.den.items():
            difference = lines[i] - lines[j]
            if difference.is_zero:
                raise PoleError(f"the line lies inside the diagonal z_{i} = z_{j}")
            denominator = denominator * difference ** m
        return numerator, denominator

    def __repr__(self):
        return f"RatFunc({self})"

    def __str__(self):
        if not self.num:
            return "0"
        terms = []
        for exps, c in sorted(self.num.items(), reverse=True):
            factors = [f"z{k}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(exps) if e]
            if not factors:
                terms.append(str(c))
            elif c == 1:
                terms.append("*".join(factors))
            else:
                terms.append(f"{c}*" + "*".join(factors))
        text = " + ".join(terms).replace("+ -", "- ")
        if not self.den:
            return text
        den = "*".join(f"(z{i}-z{j})" + (f"^{m}" if m > 1 else "") for (i, j), m in sorted(self.den.items()))
        return f"({text})/({den})"


def _rational(c):
    c = _fraction(c)
    return sympy.Rational(c.numerator, c.denominator)


class OneForm():
    "An element of the Kähler differentials: sum_i components[i] dz_i"

    def __init__(self, components):
        components = list(components)
        assert components, "a one-form needs at least one component"
        n = components[0].n_vars
        if len(components) != n or any(c.n_vars != n for c in components):
            raise VariableMismatchError(f"{len(components)} components for {n} variables")
        self.components = components

    @property
    def n_vars(self):
        return len(self.components)

    @classmethod
    def d(cls, f):
        "The universal differential df"
        return cls([f.partial(i) for i in range(f.n_vars)])

    @classmethod
    def dlog_diagonal(cls, n_vars, i, j, coefficient=1):
        "coefficient * dlog(z_i - z_j)"
        inv = RatFunc.diagonal(n_vars, i, j, -1) * _fraction(coefficient)
        components = [RatFunc.zero(n_vars) for _ in range(n_vars)]
        components[i] = inv
        components[j] = -inv
        return cls(components)

    def __add__(self, other):
        return OneForm([a + b for a, b in zip(self.components, other.components)])

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.components == other.components

    def exterior_derivative(self):
        "Map (i, j), i < j -> coefficient of dz_i ^ dz_j in d(self)"
        return {(i, j): self.components[j].partial(i) - self.components[i].partial(j)
                for i in range(self.n_vars) for j in range(i + 1, self.n_vars)}

    def contract_euler(self):
        "sum_i z_i * components[i]"
        return sum((RatFunc.variable(self.n_vars, i) * c for i, c in enumerate(self.components)),
                   RatFunc.zero(self.n_vars))


def rf_add(f, g):
    return f + g


def rf_mul(f, g):
    return f * g


def rf_neg(f):
    return -f


def rf_partial(f, i):
    return f.partial(i)


def rf_subst(f, images):
    return f.subst(images)


def rf_eval(f, point):
    return f.eval(point)


def euler_degree(f):
    """Return k with sum_i z_i df/dz_i = k f, or None when f is not homogeneous.
    The ratio is read off the leading numerator monomial and then verified
    on the whole element."""
    if f.is_zero:
        raise UndefinedDegreeError("the zero function has no degree")
    g = f.euler()
    den = dict(f.den)
    for pair, m in g.den.items():
        den[pair] = max(m, den.get(pair, 0))
    fp, gp = f._lift(den), g._lift(den)
    leading = max(fp)
    k = gp.get(leading, Fraction(0)) / fp[leading]
    if gp != _poly_scale(fp, k):
        return None
    return k
