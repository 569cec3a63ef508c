"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of (name, exponent) pairs sorted by name, exponents
positive; the empty tuple is the constant monomial. Terms map monomials to
nonzero Fraction coefficients, so structural equality is mathematical
equality.
"""

from fractions import Fraction


class DegreeError(Exception):
    """Raised when an expansion exceeds the degree guard."""


MAX_DEGREE = 12  # well above anything the identity suite produces (< 6)


def _mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for name, e in m2:
        exps[name] = exps.get(name, 0) + e
    return tuple(sorted(exps.items()))


def _mono_degree(m):
    return sum(e for _, e in m)


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                clean[mono] = coeff
        self.terms = clean

    @staticmethod
    def const(value):
        value = Fraction(value)
        if not value:
            return Polynomial()
        return Polynomial({(): value})

    @staticmethod
    def var(name):
        return Polynomial({((name, 1),): Fraction(1)})

    @staticmethod
    def _lift(other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return None

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(_mono_degree(m) for m in self.terms)

    def variables(self):
        names = set()
        for mono in self.terms:
            for name, _ in mono:
                names.add(name)
        return names

    def __add__(self, other):
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            s = out.get(mono, Fraction(0)) + coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        p = Polynomial.__new__(Polynomial)
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Polynomial.__new__(Polynomial)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono, Fraction(0)) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        for mono in out:
            if _mono_degree(mono) > MAX_DEGREE:
                raise DegreeError(
                    f"expansion reached degree {_mono_degree(mono)} > {MAX_DEGREE}")
        p = Polynomial.__new__(Polynomial)
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = Polynomial._lift(other)
        if other is None:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def substitute(self, bindings):
        """Simultaneous substitution name -> Polynomial/Fraction/int,
        fully expanded."""
        lifted = {}
        for name, val in bindings.items():
            v = Polynomial._lift(val)
            if v is None:
                raise TypeError(f"cannot substitute {val!r} for {name}")
            lifted[name] = v
        out = Polynomial()
        for mono, coeff in self.terms.items():
            term = Polynomial.const(coeff)
            for name, e in mono:
                factor = lifted.get(name, Polynomial.var(name))
                term = term * factor ** e
            out = out + term
        return out

    def coefficient_of(self, monomial):
        """Coefficient of a monomial given as {name: exp} or ((name, exp), ...)."""
        if isinstance(monomial, dict):
            monomial = tuple(sorted((n, e) for n, e in monomial.items() if e))
        return self.terms.get(tuple(monomial), Fraction(0))

    def evaluate(self, assignment, field=None):
        """Evaluate with name -> value. Values may be Fractions, ints, or
        FieldElements; with a field given, coefficients are coerced into it
        (rejecting denominators divisible by p)."""
        if field is not None:
            lift = field.element
            total = field.zero()
        else:
            lift = Fraction
            total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = lift(coeff)
            for name, e in mono:
                v = assignment[name]
                for _ in range(e):
                    term = term * v
            total = total + term
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda m: (-_mono_degree(m), m)):
            coeff = self.terms[mono]
            body = "*".join(f"{n}^{e}" if e > 1 else n for n, e in mono)
            if not body:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        s = " + ".join(parts)
        return s.replace("+ -", "- ")


def variables(*names):
    return tuple(Polynomial.var(n) for n in names)
