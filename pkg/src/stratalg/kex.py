"""Toy two-party key agreement over a stratified operation on F_p^n.

Both parties share a public base vector and a public multiplier
stratum. Each walks the base through its own secret multiplier chain,
publishes the endpoint, then walks the other's endpoint through the
same secret chain. Same-stratum order independence makes the two
final values agree. This is explicitly a toy: the brute-force helper
demonstrates that desk-scale parameters fall to exhaustive search.
"""

import json
import random

import numpy as np

from .algebra import is_zero_vector, left_chain, model_to_json, multiply
from .axioms import label_str
from .field import format_scalar
from .strata import space_matrix, to_dense_arrays
from ._kernels import bulk_multiply

# Exhaustive recovery is capped at this many candidate chains.
BRUTE_FORCE_CAP = 10 ** 6


def _vec_json(v):
    return [format_scalar(x) for x in v]


# ---------------------------------------------------------------------------
# parties and sessions


class Party:
    """One participant: a public shared base plus a private ordered
    chain of multipliers, all from one stratum that excludes the base."""

    def __init__(self, name, base, secret, model):
        if not secret:
            raise ValueError(f"{name}: empty secret holds no agreement "
                             "material")
        base = tuple(base)
        secret = [tuple(q) for q in secret]
        if is_zero_vector(base):
            raise ValueError(f"{name}: base must be nonzero")
        labels = set()
        for q in secret:
            if is_zero_vector(q):
                raise ValueError(f"{name}: zero secret multiplier")
            labels.add(label_str(model, q))
        if len(labels) > 1:
            raise ValueError(
                f"{name}: secret multipliers span strata {sorted(labels)}; "
                "order independence needs a single stratum")
        stratum = labels.pop()
        if label_str(model, base) == stratum:
            raise ValueError(
                f"{name}: base lies in the multiplier stratum {stratum}")
        self.name = name
        self.base = base
        self.secret = secret
        self.model = model
        self.stratum = stratum

    def __repr__(self):
        return (f"Party({self.name}, |secret|={len(self.secret)}, "
                f"stratum={self.stratum})")


def init_session(model, p_base, alice_secret, bob_secret,
                 names=("alice", "bob")):
    """Two parties sharing base and model, with disjoint secrets drawn
    from one common public stratum."""
    alice = Party(names[0], p_base, alice_secret, model)
    bob = Party(names[1], p_base, bob_secret, model)
    if alice.stratum != bob.stratum:
        raise ValueError(
            f"secret strata differ ({alice.stratum} vs {bob.stratum}); "
            "the commuting-chain argument needs one shared stratum")
    return alice, bob


class SessionTranscript:
    """Everything produced by one exchange. The public messages carry
    only base, S1 and S2; secrets never enter them."""

    def __init__(self, model, base, stratum, s1, s2, s12, s21, agreed,
                 path_strata, failure=None):
        self.model = model
        self.base = base
        self.stratum = stratum
        self.s1 = s1
        self.s2 = s2
        self.s12 = s12
        self.s21 = s21
        self.agreed = agreed
        self.path_strata = path_strata
        self.failure = failure
        self.redacted = False

    @property
    def public_messages(self):
        return [("setup", self.base),
                ("alice", self.s1),
                ("bob", self.s2)]

    def to_json(self):
        messages = [{"type": "pub", "sender": who, "vector": _vec_json(v)}
                    for who, v in self.public_messages]
        out = {
            "model": model_to_json(self.model),
            "stratum": self.stratum,
            "messages": messages,
            "agreed": self.agreed,
        }
        if self.redacted:
            out["redacted"] = True
            return out
        out["S12"] = _vec_json(self.s12) if self.s12 else None
        out["S21"] = _vec_json(self.s21) if self.s21 else None
        out["path_strata"] = self.path_strata
        if self.failure:
            out["failure"] = self.failure
        return out

    def serialize(self):
        return json.dumps(self.to_json(), sort_keys=True,
                          separators=(",", ":"))


def _walk(model, start, multipliers):
    """Left chain with per-step labels; stops at a zero product.
    Returns (final, labels, truncated)."""
    v = tuple(start)
    labels = [label_str(model, v)]
    for q in multipliers:
        v = tuple(multiply(model.operation, v, q))
        if is_zero_vector(v):
            labels.append("zero")
            return v, labels, True
        labels.append(label_str(model, v))
    return v, labels, False


def run_exchange(alice, bob):
    """Announce S1 = base*alice_chain and S2 = base*bob_chain, then
    cross-derive S12 = S1*bob_chain and S21 = S2*alice_chain. Agreement
    means S12 = S21. A zero product anywhere voids the session."""
    model = alice.model
    base = alice.base
    s1, alice_announce, t1 = _walk(model, base, alice.secret)
    s2, bob_announce, t2 = _walk(model, base, bob.secret)
    failure = None
    s12 = s21 = None
    bob_derive, alice_derive = [], []
    if t1 or t2:
        failure = "zero product while announcing"
    else:
        s12, bob_derive, t12 = _walk(model, s1, bob.secret)
        s21, alice_derive, t21 = _walk(model, s2, alice.secret)
        if t12 or t21:
            failure = "zero product while deriving"
    agreed = failure is None and s12 == s21
    path_strata = {
        alice.name: {"announce": alice_announce, "derive": alice_derive},
        bob.name: {"announce": bob_announce, "derive": bob_derive},
    }
    return SessionTranscript(model, base, alice.stratum, s1, s2, s12, s21,
                             agreed, path_strata, failure=failure)


def eavesdropper_view(transcript):
    """What the wire shows: base, S1, S2, model, public stratum.
    Idempotent; never carries secrets or derived keys."""
    view = SessionTranscript(
        transcript.model, transcript.base, transcript.stratum,
        transcript.s1, transcript.s2, None, None, transcript.agreed,
        path_strata=None)
    view.redacted = True
    return view


# ---------------------------------------------------------------------------
# seeded session material


def seeded_session(model, seed, lengths=(3, 4)):
    """Deterministic session over F_p: pick a multiplier stratum (a
    tail direction) and a base outside it, then draw secret chains of
    the given lengths."""
    field = model.field
    p = field.p
    if p is None:
        raise ValueError("seeded sessions need a prime field")
    rng = random.Random(f"{seed}:kex")
    tail = model.dimension - 1

    def draw_tail():
        d = tuple(rng.randrange(p) for _ in range(tail))
        while not any(d):
            d = tuple(rng.randrange(p) for _ in range(tail))
        return d

    def on_direction(d):
        scale = rng.randrange(1, p)
        return tuple(field.element(x) for x in
                     (rng.randrange(p),) + tuple(c * scale % p for c in d))

    d = draw_tail()
    stratum = label_str(model, on_direction(d))
    base = on_direction(draw_tail())
    while label_str(model, base) == stratum:
        base = on_direction(draw_tail())
    alice_secret = [on_direction(d) for _ in range(lengths[0])]
    bob_secret = [on_direction(d) for _ in range(lengths[1])]
    return init_session(model, base, alice_secret, bob_secret)


# ---------------------------------------------------------------------------
# brute-force recovery demo


def brute_force_recover(model, view, max_len=2):
    """Exhaustive toy attack on a redacted transcript: enumerate every
    chain of nonzero vectors of length 1 or 2, keep those mapping the
    base to S1, and derive the would-be shared key from S2 for each.
    Candidates inside the public multiplier stratum are guaranteed to
    reproduce the real key (same-stratum order independence).

    Returns {"tried", "hits": [{"chain", "key", "in_stratum"}]}.
    """
    if max_len not in (1, 2):
        raise ValueError("the recovery demo searches chains of length "
                         "1 or 2 only")
    field = model.field
    p = field.p
    n = model.dimension
    nonzero = p ** n - 1
    if nonzero + nonzero ** 2 > BRUTE_FORCE_CAP:
        raise ValueError("candidate space exceeds the brute-force cap; "
                         "this demo is for toy parameters")
    T, La, Lb = to_dense_arrays(model.operation, p)
    V = space_matrix(p, n)
    base = np.array([[int(x.value) % p for x in view.base]], dtype=np.int64)
    target = np.array([int(x.value) % p for x in view.s1], dtype=np.int64)

    def row_vec(row):
        return tuple(field.element(int(x)) for x in row)

    tried = nonzero
    step1 = bulk_multiply(T, La, Lb, np.repeat(base, nonzero, axis=0), V, p)
    chains = [[row_vec(V[i])]
              for i in np.flatnonzero((step1 == target).all(axis=1))]
    if max_len == 2:
        prods = bulk_multiply(T, La, Lb,
                              np.repeat(step1, nonzero, axis=0),
                              np.tile(V, (nonzero, 1)), p)
        tried += len(prods)
        for flat in np.flatnonzero((prods == target).all(axis=1)):
            i, j = divmod(int(flat), nonzero)
            chains.append([row_vec(V[i]), row_vec(V[j])])

    hits = []
    for chain in chains:
        key = left_chain(model.operation, tuple(view.s2), chain)
        labels = {label_str(model, q) for q in chain}
        hits.append({
            "chain": chain,
            "key": tuple(key),
            "in_stratum": labels == {view.stratum},
        })
    return {"tried": tried, "hits": hits}
