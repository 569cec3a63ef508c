"""Exact scalar arithmetic over the rationals and over prime fields F_p.

Every value is exact: Fraction for the rationals, canonical residue in
[0, p) for F_p. No floats anywhere.
"""

from fractions import Fraction

MAX_PRIME = 1 << 61  # residue products must fit double-width intermediates


def xgcd(x, y):
    """Extended Euclid. Returns (g, a, b) with a*x + b*y = g = gcd(x, y)."""
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def is_prime(n):
    """Trial division, good enough below 2**61 for the sizes we accept."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Field:
    """The rationals (p is None) or F_p for prime p."""

    def __init__(self, p=None):
        if p is not None:
            p = int(p)
            if p >= MAX_PRIME:
                raise ValueError(f"modulus {p} exceeds 2**61 cap")
            if not is_prime(p):
                raise ValueError(f"modulus {p} is not prime")
        self.p = p

    @property
    def is_prime_field(self):
        return self.p is not None

    def element(self, value):
        """Coerce an int, Fraction, or FieldElement into this field."""
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError(f"element of {value.field} used in {self}")
            return value
        if self.p is None:
            return FieldElement(self, Fraction(value))
        if isinstance(value, Fraction):
            num = value.numerator % self.p
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(
                    f"denominator of {value} vanishes mod {self.p}")
            return FieldElement(self, num * _inverse_mod(den, self.p) % self.p)
        return FieldElement(self, int(value) % self.p)

    def from_string(self, s):
        """Parse an exact scalar string: "12", "-7", or "3/2". No floats."""
        s = s.strip()
        return self.element(Fraction(s))

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    def sample(self, rng, bound=50):
        """Uniform residue for F_p; numerator in [-bound, bound] and
        denominator in [1, bound] for the rationals."""
        if self.p is not None:
            return self.element(rng.randrange(self.p))
        num = rng.randint(-bound, bound)
        den = rng.randint(1, bound)
        return self.element(Fraction(num, den))

    def sample_nonzero(self, rng, bound=50):
        while True:
            x = self.sample(rng, bound)
            if x:
                return x

    def __eq__(self, other):
        return isinstance(other, Field) and self.p == other.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p is None else f"F_{self.p}"

    def to_json(self):
        if self.p is None:
            return {"kind": "Q"}
        return {"kind": "Fp", "p": self.p}

    @staticmethod
    def from_json(obj):
        if obj.get("kind") == "Q":
            return Field()
        if obj.get("kind") == "Fp":
            return Field(obj["p"])
        raise ValueError(f"unknown field spec {obj!r}")


QQ = Field()


def _inverse_mod(x, p):
    g, a, _ = xgcd(x % p, p)
    if g != 1:
        raise ZeroDivisionError(f"{x} is not invertible mod {p}")
    return a % p


class FieldElement:
    __slots__ = ("field", "value")

    def __init__(self, field, value):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError(f"mixed fields {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.field.p is None:
            return FieldElement(self.field, self.value + other.value)
        return FieldElement(self.field, (self.value + other.value) % self.field.p)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.field.p is None:
            return FieldElement(self.field, self.value - other.value)
        return FieldElement(self.field, (self.value - other.value) % self.field.p)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.field.p is None:
            return FieldElement(self.field, self.value * other.value)
        return FieldElement(self.field, (self.value * other.value) % self.field.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        if self.field.p is None:
            return FieldElement(self.field, -self.value)
        return FieldElement(self.field, (-self.value) % self.field.p)

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            return self.inverse() ** (-k)
        if self.field.p is None:
            return FieldElement(self.field, self.value ** k)
        return FieldElement(self.field, pow(self.value, k, self.field.p))

    def inverse(self):
        if not self:
            raise ZeroDivisionError("division by zero")
        if self.field.p is None:
            return FieldElement(self.field, 1 / self.value)
        return FieldElement(self.field, _inverse_mod(self.value, self.field.p))

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field == other.field and self.value == other.value

    def __hash__(self):
        return hash((self.field, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return str(self.value)


def format_scalar(x):
    """Exact string form used in JSON: "12", "-7", "3/2"."""
    if isinstance(x, FieldElement):
        x = x.value
    return str(x)
