"""Strata over F_p^n and Q^n: declarative ratio labels, empirical discovery
by commutant clustering, and closure checks.

Vectors inside this module are tuples of canonical residues (plain ints)
when a prime field is in play; the numpy kernels chew those in bulk.
"""

import hashlib
import itertools
from collections import namedtuple
from fractions import Fraction

import numpy as np

from . import _kernels
from .field import Field, FieldElement
from .algebra import multiply, is_zero_vector

SPACE_CAP = 1 << 24  # p**n above this refuses to enumerate

INFINITY = "inf"


class RatioPoint:
    """A point of the projective line: a field value or infinity."""

    __slots__ = ("value",)

    def __init__(self, value=None):
        self.value = value  # None means infinity

    @property
    def is_infinite(self):
        return self.value is None

    def __eq__(self, other):
        return isinstance(other, RatioPoint) and self.value == other.value

    def __hash__(self):
        return hash(("RatioPoint", self.value))

    def __str__(self):
        return INFINITY if self.value is None else str(self.value)

    def __repr__(self):
        return f"RatioPoint({self})"


class RatioPair:
    __slots__ = ("first", "second")

    def __init__(self, first, second):
        self.first = first
        self.second = second

    def __eq__(self, other):
        return (isinstance(other, RatioPair)
                and self.first == other.first and self.second == other.second)

    def __hash__(self):
        return hash(("RatioPair", self.first, self.second))

    def __str__(self):
        return f"({self.first},{self.second})"

    def __repr__(self):
        return f"RatioPair{self}"


def _as_value(x):
    return x.value if isinstance(x, FieldElement) else x


def _ratio(x, y, field):
    """x/y as a canonical scalar value (residue or Fraction)."""
    if field is not None and field.is_prime_field:
        xe = field.element(x)
        ye = field.element(y)
        return (xe / ye).value
    return Fraction(_as_value(x)) / Fraction(_as_value(y))


def ratio_stratum_of(v, rule, field=None):
    """Canonical stratum label of a nonzero vector under a declarative rule.

    For the single-ratio rule on coords (c1, c2): label alpha with
    v[c1] = alpha v[c2], infinity when v[c2] = 0. For the ratio-pair rule on
    (c1, c2, c3): (alpha', alpha'') with v[c1] = alpha' v[c2] and
    v[c2] = alpha'' v[c3]; when a denominator vanishes the slot goes to
    infinity unless the numerator also vanishes, in which case the slot is 0
    (the label then still satisfies the defining proportionality).
    """
    vals = [_as_value(x) for x in v]
    if all(x == 0 for x in vals):
        raise ValueError("zero vector carries no stratum label")
    coords = rule["coords"]
    if rule["kind"] == "ratio":
        x, y = vals[coords[0]], vals[coords[1]]
        if y == 0:
            return RatioPoint(None)
        return RatioPoint(_ratio(x, y, field))
    if rule["kind"] == "ratio-pair":
        v1, v2, v3 = (vals[c] for c in coords)
        if v3 != 0:
            second = RatioPoint(_ratio(v2, v3, field))
            if v2 != 0:
                first = RatioPoint(_ratio(v1, v2, field))
            elif v1 != 0:
                first = RatioPoint(None)
            else:
                first = RatioPoint(_zero_scalar(field))
        else:
            second = RatioPoint(None)
            if v2 != 0:
                first = RatioPoint(_ratio(v1, v2, field))
            else:
                first = RatioPoint(None)
        return RatioPair(first, second)
    raise ValueError(f"unknown strata rule {rule!r}")


def _zero_scalar(field):
    if field is not None and field.is_prime_field:
        return 0
    return Fraction(0)


def tails_proportional(v, w, rule):
    """Ground truth for co-stratality: the rule coordinates of v and w are
    proportional (all pairwise cross products vanish). Equivalent to equal
    canonical labels except inside the lumped (inf, 0) ratio-pair label,
    which this predicate splits correctly."""
    coords = rule["coords"]
    xs = [_as_value(v[c]) for c in coords]
    ys = [_as_value(w[c]) for c in coords]
    for i in range(len(coords)):
        for j in range(i + 1, len(coords)):
            if xs[i] * ys[j] != xs[j] * ys[i]:
                return False
    return True


def enumerate_space(p, n):
    """All p**n - 1 nonzero residue vectors, lexicographic."""
    if p ** n > SPACE_CAP:
        raise ValueError(f"{p}**{n} exceeds enumeration cap 2**24")
    for v in itertools.product(range(p), repeat=n):
        if any(v):
            yield v


def space_matrix(p, n):
    """enumerate_space as an (p**n - 1, n) int64 matrix."""
    if p ** n > SPACE_CAP:
        raise ValueError(f"{p}**{n} exceeds enumeration cap 2**24")
    idx = np.arange(1, p ** n, dtype=np.int64)
    cols = []
    for c in range(n - 1, -1, -1):
        cols.append(idx % p)
        idx //= p
    return np.stack(cols[::-1], axis=1)


def _as_operation(op):
    return op.operation if hasattr(op, "operation") else op


def to_dense_arrays(op, p):
    """Dense int64 (T, La, Lb) reduced mod p for the kernels."""
    op = _as_operation(op)
    n = op.n
    T = np.zeros((n, n, n), dtype=np.int64)
    for (i, j, k), c in op.bilinear.entries.items():
        T[i, j, k] = _residue(c, p)
    La = np.zeros((n, n), dtype=np.int64)
    for (i, k), c in op.linear_a.items():
        La[i, k] = _residue(c, p)
    Lb = np.zeros((n, n), dtype=np.int64)
    for (j, k), c in op.linear_b.items():
        Lb[j, k] = _residue(c, p)
    return T, La, Lb


def _residue(c, p):
    v = _as_value(c)
    if isinstance(v, Fraction):
        if v.denominator % p == 0:
            raise ZeroDivisionError(f"denominator of {v} vanishes mod {p}")
        return v.numerator * pow(v.denominator, -1, p) % p
    return int(v) % p


def inverse_table(p):
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    return inv


def label_indices(V, p, rule):
    """Numeric stratum label per row of V. Single ratio: index in [0, p],
    p meaning infinity. Ratio pair: first*(p+1) + second with the same
    convention per slot."""
    inv = inverse_table(p)
    coords = rule["coords"]
    if rule["kind"] == "ratio":
        x = V[:, coords[0]]
        y = V[:, coords[1]]
        return np.where(y != 0, (x * inv[y]) % p, p)
    v1 = V[:, coords[0]]
    v2 = V[:, coords[1]]
    v3 = V[:, coords[2]]
    second = np.where(v3 != 0, (v2 * inv[v3]) % p, p)
    first = np.where(
        v2 != 0,
        (v1 * inv[v2]) % p,
        np.where((v3 != 0) & (v1 == 0), 0, p),
    )
    return first * (p + 1) + second


def label_index_to_str(idx, p, rule):
    if rule["kind"] == "ratio":
        return INFINITY if idx == p else str(int(idx))
    first, second = divmod(int(idx), p + 1)
    f = INFINITY if first == p else str(first)
    s = INFINITY if second == p else str(second)
    return f"({f},{s})"


Landings = namedtuple("Landings", "inside boundary zero outside")

ClosureReport = namedtuple(
    "ClosureReport",
    "closed commutative associative landings witnesses counts")


class StratumPartition:
    """Disjoint labeled strata plus an exceptional ledger covering
    F_p^n minus zero."""

    def __init__(self, p, n, strata, exceptional, provenance):
        self.p = p
        self.n = n
        self.strata = strata  # list of (label str, list of int tuples)
        self.exceptional = exceptional
        self.provenance = provenance
        self._index = {}
        for label, members in strata:
            for m in members:
                self._index[m] = label

    def label_of(self, v):
        v = tuple(int(_as_value(x)) % self.p for x in v)
        if v in self._index:
            return self._index[v]
        if v in set(self.exceptional):
            return "exceptional"
        return None

    def sizes(self):
        return {label: len(members) for label, members in self.strata}

    def total(self):
        return sum(len(m) for _, m in self.strata) + len(self.exceptional)

    def to_json(self, full=False):
        strata = []
        for label, members in self.strata:
            entry = {"label": label, "size": len(members)}
            if full or len(members) <= 10 ** 4:
                entry["members"] = [list(map(int, m)) for m in members]
            strata.append(entry)
        return {
            "p": self.p,
            "n": self.n,
            "provenance": self.provenance,
            "strata": strata,
            "exceptional": [list(map(int, m)) for m in self.exceptional],
        }


def ratio_partition(model, p=None):
    """Enumerated partition of F_p^n by the model's declarative rule."""
    field = model.field
    p = p or field.p
    if p is None:
        raise ValueError("ratio_partition needs a prime field")
    rule = model.strata_rule
    if rule is None:
        raise ValueError(f"model {model.name} declares no strata rule")
    V = space_matrix(p, model.dimension)
    idx = label_indices(V, p, rule)
    groups = {}
    for row, lab in zip(V, idx):
        groups.setdefault(int(lab), []).append(tuple(int(x) for x in row))
    strata = [(label_index_to_str(lab, p, rule), groups[lab])
              for lab in sorted(groups)]
    return StratumPartition(p, model.dimension, strata, [], "declared-ratio")


def discover_strata(op, p):
    """Cluster nonzero vectors by commutant equality.

    commutant(v) = {w != 0 : v*w = w*v}; equal commutants share a stratum.
    Central vectors (commutant is the whole space) go to the exceptional
    ledger unless everything is central. Rows are fingerprinted, then
    verified exactly inside each fingerprint bucket.
    """
    op = _as_operation(op)
    n = op.n
    T, La, Lb = to_dense_arrays(op, p)
    V = space_matrix(p, n)
    N = len(V)
    rows = _kernels.commute_rows(T, La, Lb, V, p)
    buckets = {}
    for i in range(N):
        fp = hashlib.blake2b(rows[i].tobytes(), digest_size=16).digest()
        buckets.setdefault(fp, []).append(i)
    groups = []
    for fp in buckets:
        idxs = buckets[fp]
        # exact verification inside the bucket; collisions split here
        by_bytes = {}
        for i in idxs:
            by_bytes.setdefault(rows[i].tobytes(), []).append(i)
        groups.extend(by_bytes.values())
    all_ones = np.packbits(np.ones(N, dtype=bool)).tobytes()
    central_group = None
    strata_groups = []
    for g in groups:
        if rows[g[0]].tobytes() == all_ones:
            central_group = g
        else:
            strata_groups.append(g)
    members = lambda g: sorted(tuple(int(x) for x in V[i]) for i in g)
    if central_group is not None and not strata_groups:
        strata_groups = [central_group]
        central_group = None
    strata_members = sorted((members(g) for g in strata_groups),
                            key=lambda ms: ms[0])
    strata = [(f"S{i}", ms) for i, ms in enumerate(strata_members)]
    exceptional = members(central_group) if central_group else []
    return StratumPartition(p, n, strata, exceptional, "discovered")


def partitions_agree(discovered, model):
    """Do the discovered strata and the declarative ratio labels induce the
    same equivalence on the non-exceptional vectors? Returns (bool, detail).
    """
    p = discovered.p
    rule = model.strata_rule
    V = space_matrix(p, discovered.n)
    idx = label_indices(V, p, rule)
    ratio_of = {tuple(int(x) for x in row): int(l) for row, l in zip(V, idx)}
    seen_ratio = {}
    for label, ms in discovered.strata:
        ratios = {ratio_of[m] for m in ms}
        if len(ratios) != 1:
            return False, f"discovered stratum {label} spans ratio labels {sorted(ratios)}"
        r = ratios.pop()
        if r in seen_ratio:
            return False, (f"ratio label {label_index_to_str(r, p, rule)} split "
                           f"across {seen_ratio[r]} and {label}")
        seen_ratio[r] = label
    return True, f"{len(discovered.strata)} strata matched one-to-one"


def verify_closure(op, members, field, constraint=None, rng=None,
                   triple_samples=1000):
    """Closure, commutativity, and associativity verdicts for a member set.

    Pairs are exhaustive while |members|^2 <= 10**6, triples while
    |members|^3 <= 10**7, otherwise seeded sampling with recorded counts.
    closed means no product lands strictly outside: products inside the set
    count as inside; products satisfying the constraint without being
    members (boundary) and exact zeros are tallied separately and do not
    break closure.
    """
    members = [tuple(int(_as_value(x)) % field.p if field.is_prime_field
                     else _as_value(x) for x in v) for v in members]
    if not members:
        raise ValueError("empty member set")
    m = len(members)
    pair_mode = "exhaustive" if m * m <= 10 ** 6 else "randomized"
    triple_mode = "exhaustive" if m ** 3 <= 10 ** 7 else "randomized"
    if field.is_prime_field:
        return _verify_closure_fp(op, members, field.p, constraint, rng,
                                  pair_mode, triple_mode, triple_samples)
    return _verify_closure_generic(op, members, field, constraint, rng,
                                   pair_mode, triple_mode, triple_samples)


def _verify_closure_fp(op, members, p, constraint, rng, pair_mode,
                       triple_mode, triple_samples):
    T, La, Lb = to_dense_arrays(op, p)
    M = np.array(members, dtype=np.int64)
    m = len(members)
    member_set = set(members)
    if pair_mode == "exhaustive":
        ia, ib = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        ia = ia.ravel()
        ib = ib.ravel()
    else:
        ia = np.array([rng.randrange(m) for _ in range(10 ** 5)])
        ib = np.array([rng.randrange(m) for _ in range(10 ** 5)])
    A = M[ia]
    B = M[ib]
    AB = _kernels.bulk_multiply(T, La, Lb, A, B, p)
    BA = _kernels.bulk_multiply(T, La, Lb, B, A, p)
    commutative = True
    comm_witness = None
    bad = np.nonzero((AB != BA).any(axis=1))[0]
    if len(bad):
        commutative = False
        i = int(bad[0])
        comm_witness = (members[ia[i]], members[ib[i]])
    inside = boundary = zero = outside = 0
    closed = True
    close_witness = None
    for row, prod in zip(range(len(AB)), AB):
        t = tuple(int(x) for x in prod)
        if t in member_set:
            inside += 1
        elif not any(t):
            zero += 1
        elif constraint is not None and constraint(t):
            boundary += 1
        else:
            outside += 1
            if close_witness is None:
                closed = False
                close_witness = (members[ia[row]], members[ib[row]], t)
    associative = True
    assoc_witness = None
    if triple_mode == "exhaustive":
        triples = itertools.product(range(m), repeat=3)
        count = m ** 3
    else:
        triples = ((rng.randrange(m), rng.randrange(m), rng.randrange(m))
                   for _ in range(triple_samples))
        count = triple_samples
    fobj = Field(p)
    fm = [tuple(fobj.element(x) for x in v) for v in members]
    for i, j, k in triples:
        u = multiply(op, multiply(op, fm[i], fm[j]), fm[k])
        v = multiply(op, fm[i], multiply(op, fm[j], fm[k]))
        if u != v:
            associative = False
            assoc_witness = (members[i], members[j], members[k])
            break
    landings = Landings(inside, boundary, zero, outside)
    witnesses = {k: v for k, v in (("commutative", comm_witness),
                                   ("closed", close_witness),
                                   ("associative", assoc_witness)) if v}
    counts = {"pairs": len(AB), "pair_mode": pair_mode,
              "triples": count, "triple_mode": triple_mode}
    return ClosureReport(closed, commutative, associative, landings,
                         witnesses, counts)


def _verify_closure_generic(op, members, field, constraint, rng, pair_mode,
                            triple_mode, triple_samples):
    fm = [tuple(field.element(x) for x in v) for v in members]
    member_set = set(members)
    inside = boundary = zero = outside = 0
    closed = commutative = True
    witnesses = {}
    for a in fm:
        for b in fm:
            ab = multiply(op, a, b)
            if multiply(op, b, a) != ab and "commutative" not in witnesses:
                commutative = False
                witnesses["commutative"] = (a, b)
            t = tuple(x.value for x in ab)
            if t in member_set:
                inside += 1
            elif is_zero_vector(ab):
                zero += 1
            elif constraint is not None and constraint(t):
                boundary += 1
            else:
                outside += 1
                if "closed" not in witnesses:
                    closed = False
                    witnesses["closed"] = (a, b, t)
    associative = True
    m = len(fm)
    if triple_mode == "exhaustive":
        triples = itertools.product(range(m), repeat=3)
        count = m ** 3
    else:
        triples = ((rng.randrange(m), rng.randrange(m), rng.randrange(m))
                   for _ in range(triple_samples))
        count = triple_samples
    for i, j, k in triples:
        u = multiply(op, multiply(op, fm[i], fm[j]), fm[k])
        v = multiply(op, fm[i], multiply(op, fm[j], fm[k]))
        if u != v:
            associative = False
            witnesses["associative"] = (members[i], members[j], members[k])
            break
    counts = {"pairs": m * m, "pair_mode": pair_mode,
              "triples": count, "triple_mode": triple_mode}
    return ClosureReport(closed, commutative, associative,
                         Landings(inside, boundary, zero, outside),
                         witnesses, counts)


def constraint_for_label(rule, label, p):
    """Membership predicate for the constraint set behind a canonical label
    (the paper-style set, which also contains the degenerate vectors whose
    relevant coordinates all vanish)."""
    coords = rule["coords"]
    if rule["kind"] == "ratio":
        c1, c2 = coords

        def check(v):
            x, y = v[c1] % p, v[c2] % p
            if label.is_infinite:
                return y == 0
            return x == int(label.value) * y % p

        return check
    c1, c2, c3 = coords
    first, second = label.first, label.second

    def check(v):
        v1, v2, v3 = v[c1] % p, v[c2] % p, v[c3] % p
        if second.is_infinite:
            ok2 = v3 == 0
        else:
            ok2 = v2 == int(second.value) * v3 % p
        if first.is_infinite:
            ok1 = v2 == 0
        else:
            ok1 = v1 == int(first.value) * v2 % p
        return ok1 and ok2

    return check


Stability = namedtuple("Stability", "stable outcome final_label labels")

DepthReport = namedtuple("DepthReport", "count labels flags")


def _subexpression_values(op, tree, leaves):
    vals = []

    def walk(t):
        if t.is_leaf:
            return leaves[t.index]
        v = multiply(op, walk(t.left), walk(t.right))
        vals.append(v)
        return v

    walk(tree)
    return vals


def is_stratum_stable(op, tree, leaves, labeler):
    """Does the final value stay inside the union of the operand strata?
    Zero or exceptional landings are distinct outcomes, not booleans."""
    leaf_labels = [labeler(v) for v in leaves]
    vals = _subexpression_values(op, tree, leaves)
    final = vals[-1] if vals else leaves[0]
    if is_zero_vector(final):
        return Stability(None, "zero", None, leaf_labels)
    flabel = labeler(final)
    if flabel in (None, "exceptional"):
        return Stability(None, "exceptional", flabel, leaf_labels)
    stable = flabel in leaf_labels
    return Stability(stable, "stable" if stable else "unstable",
                     flabel, leaf_labels)


def stratified_depth(op, tree, leaves, labeler):
    """Count of distinct strata traversed by leaves and subexpressions."""
    labels = [labeler(v) for v in leaves]
    flags = []
    for v in _subexpression_values(op, tree, leaves):
        if is_zero_vector(v):
            flags.append("zero")
            continue
        lab = labeler(v)
        if lab in (None, "exceptional"):
            flags.append("exceptional")
            continue
        labels.append(lab)
    return DepthReport(len(set(labels)), labels, flags)
