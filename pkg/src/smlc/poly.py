"""Ground-truth polynomial oracles, independent of the circuit passes.

Everything here is deliberately brute force: exact sparse expansion over
arbitrary-precision integers, Leibniz-sum reference determinant/permanent
polynomials, permutation sign, and two equivalence checks (exact term-by-term
comparison, and a seeded Schwartz-Zippel test modulo the fixed 61-bit Mersenne
prime).  Passes are trusted only after they agree with these oracles.

A monomial is a tuple of (row, col) pairs sorted by strictly increasing row;
a polynomial maps monomials to nonzero integer coefficients.  Field elements
are plain ints reduced modulo PRIME at every operation.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .circuit import Add, Bouquet, Circuit, ConstLeaf, Mul, VarLeaf, validate, variables_of

# Fixed carrier for randomized identity testing.  Degree-d polynomials collide
# at a uniform random point with probability at most d / PRIME per trial.
PRIME = 2**61 - 1

DEFAULT_TERM_BUDGET = 10**6
DEFAULT_TRIALS = 20

Monomial = tuple[tuple[int, int], ...]
Assignment = Mapping[tuple[int, int], int]


class OracleError(Exception):
    """Base class for oracle failures."""


class BudgetExceeded(OracleError):
    """Exact expansion would exceed the term budget; instance too large."""


class TooLarge(OracleError):
    """Factorial-size reference construction refused."""


class NotAPermutation(OracleError):
    def __init__(self, seq):
        super().__init__(f"{tuple(seq)} is not a permutation of [1..{len(tuple(seq))}]")


class MissingAssignment(OracleError):
    def __init__(self, row: int, col: int):
        super().__init__(f"no value assigned for variable x[{row},{col}]")


# ---------------------------------------------------------------------------
# Permutations (1-based image tuples: pi[p-1] is the image of p)
# ---------------------------------------------------------------------------

def check_permutation(pi: Iterable[int]) -> tuple[int, ...]:
    pi = tuple(pi)
    if sorted(pi) != list(range(1, len(pi) + 1)):
        raise NotAPermutation(pi)
    return pi


def sign_of_permutation(pi: Iterable[int]) -> int:
    """Parity of pi: +1 for even, -1 for odd, via cycle decomposition."""
    pi = check_permutation(pi)
    seen = [False] * len(pi)
    transpositions = 0
    for start in range(len(pi)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = pi[j] - 1
            length += 1
        transpositions += length - 1
    return -1 if transpositions % 2 else 1


def compose_perms(tau: tuple[int, ...], sigma: tuple[int, ...]) -> tuple[int, ...]:
    """tau after sigma: position p maps to tau(sigma(p))."""
    return tuple(tau[s - 1] for s in sigma)


def invert_perm(pi: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(pi)
    for p, image in enumerate(pi, start=1):
        inv[image - 1] = p
    return tuple(inv)


def identity_perm(n: int) -> tuple[int, ...]:
    return tuple(range(1, n + 1))


def random_perm(n: int, rng: random.Random) -> tuple[int, ...]:
    values = list(range(1, n + 1))
    rng.shuffle(values)
    return tuple(values)


# ---------------------------------------------------------------------------
# Sparse exact polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparsePoly:
    """Exact sparse polynomial: monomial -> nonzero integer coefficient.

    Canonical by construction; two instances over the same grid are equal iff
    they represent the same polynomial.
    """

    n: int
    terms: dict[Monomial, int] = field(default_factory=dict)

    @classmethod
    def zero(cls, n: int) -> "SparsePoly":
        return cls(n, {})

    @classmethod
    def const(cls, n: int, value: int) -> "SparsePoly":
        return cls(n, {(): value} if value else {})

    @classmethod
    def variable(cls, n: int, row: int, col: int) -> "SparsePoly":
        return cls(n, {((row, col),): 1})

    def __add__(self, other: "SparsePoly") -> "SparsePoly":
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            total = out.get(mono, 0) + coeff
            if total:
                out[mono] = total
            else:
                out.pop(mono, None)
        return SparsePoly(self.n, out)

    def __mul__(self, other: "SparsePoly") -> "SparsePoly":
        out: dict[Monomial, int] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _merge_monomials(ma, mb)
                total = out.get(mono, 0) + ca * cb
                if total:
                    out[mono] = total
                else:
                    out.pop(mono, None)
        return SparsePoly(self.n, out)

    def scaled(self, factor: int) -> "SparsePoly":
        if factor == 0:
            return SparsePoly.zero(self.n)
        return SparsePoly(self.n, {m: factor * c for m, c in self.terms.items()})

    def eval_mod(self, assignment: Assignment, prime: int = PRIME) -> int:
        total = 0
        for mono, coeff in self.terms.items():
            term = coeff % prime
            for row, col in mono:
                term = term * (assignment[(row, col)] % prime) % prime
            total = (total + term) % prime
        return total

    def __len__(self) -> int:
        return len(self.terms)


def _merge_monomials(a: Monomial, b: Monomial) -> Monomial:
    # merge two row-sorted monomials; rows must stay distinct
    merged = sorted(a + b)
    for (r1, _), (r2, _) in zip(merged, merged[1:]):
        if r1 == r2:
            raise OracleError(f"monomial product reuses row {r1}")
    return tuple(merged)


def poly_to_text(poly: SparsePoly) -> str:
    """Canonical text form: one `coeff x[r,c] ...` line per term, monomials sorted."""
    lines = []
    for mono in sorted(poly.terms):
        parts = [str(poly.terms[mono])]
        parts.extend(f"x[{r},{c}]" for r, c in mono)
        lines.append(" ".join(parts))
    return "\n".join(lines)


def poly_from_text(text: str, n: int) -> SparsePoly:
    terms: dict[Monomial, int] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        fields = line.split()
        coeff = int(fields[0])
        mono = []
        for tok in fields[1:]:
            if not (tok.startswith("x[") and tok.endswith("]")):
                raise OracleError(f"bad factor {tok!r}")
            r, c = tok[2:-1].split(",")
            mono.append((int(r), int(c)))
        key = tuple(mono)
        if key in terms:
            raise OracleError(f"duplicate monomial in line {line!r}")
        if coeff:
            terms[key] = coeff
    return SparsePoly(n, terms)


# ---------------------------------------------------------------------------
# Circuit expansion and evaluation
# ---------------------------------------------------------------------------

def expand(circuit: Circuit, term_budget: int = DEFAULT_TERM_BUDGET) -> SparsePoly:
    """Exact polynomial computed by the circuit.

    Works bottom-up over the node list.  Because every gate of a valid circuit
    is set-multilinear, the term count of a product is exactly the product of
    the factor term counts, which gives a precise budget check before any
    large multiplication is attempted.

    Intermediate polynomials are dropped (and their dicts reused) at their
    last reference, so long addition chains accumulate in linear rather than
    quadratic time and peak memory stays proportional to the live frontier.
    """
    validate(circuit)
    n = circuit.n
    remaining = [0] * len(circuit.nodes)
    for node in circuit.nodes:
        if isinstance(node, (Add, Mul)):
            remaining[node.left] += 1
            remaining[node.right] += 1
    remaining[circuit.root] += 1

    polys: list[SparsePoly | None] = [None] * len(circuit.nodes)
    for vid, node in enumerate(circuit.nodes):
        if isinstance(node, ConstLeaf):
            result = SparsePoly.const(n, node.value)
        elif isinstance(node, VarLeaf):
            result = SparsePoly.variable(n, node.row, node.col)
        else:
            a = polys[node.left]
            b = polys[node.right]
            remaining[node.left] -= 1
            remaining[node.right] -= 1
            if isinstance(node, Add):
                result = _add_consuming(
                    n,
                    a,
                    b,
                    consume_a=remaining[node.left] == 0 and node.left != node.right,
                    consume_b=remaining[node.right] == 0 and node.left != node.right,
                )
            else:
                if len(a) * len(b) > term_budget:
                    raise BudgetExceeded(
                        f"product of {len(a)} x {len(b)} terms exceeds budget {term_budget}"
                    )
                result = a * b
            if remaining[node.left] == 0:
                polys[node.left] = None
            if remaining[node.right] == 0:
                polys[node.right] = None
        if len(result) > term_budget:
            raise BudgetExceeded(f"{len(result)} terms exceed budget {term_budget}")
        polys[vid] = result
    return polys[circuit.root]


def _add_consuming(
    n: int, a: SparsePoly, b: SparsePoly, consume_a: bool, consume_b: bool
) -> SparsePoly:
    # reuse the dict of a dead operand, preferring the larger one
    if consume_a and (not consume_b or len(a) >= len(b)):
        base, other = a, b
    elif consume_b:
        base, other = b, a
    else:
        return a + b
    terms = base.terms
    for mono, coeff in other.terms.items():
        total = terms.get(mono, 0) + coeff
        if total:
            terms[mono] = total
        else:
            del terms[mono]
    return SparsePoly(n, terms)


def eval_circuit(circuit: Circuit, assignment: Assignment, prime: int = PRIME) -> int:
    """Value of the circuit polynomial at a point, mod prime."""
    values: list[int] = []
    for node in circuit.nodes:
        if isinstance(node, ConstLeaf):
            values.append(node.value % prime)
        elif isinstance(node, VarLeaf):
            key = (node.row, node.col)
            if key not in assignment:
                raise MissingAssignment(node.row, node.col)
            values.append(assignment[key] % prime)
        elif isinstance(node, Add):
            values.append((values[node.left] + values[node.right]) % prime)
        else:
            values.append(values[node.left] * values[node.right] % prime)
    return values[circuit.root]


def expand_bouquet(bouquet: Bouquet, term_budget: int = DEFAULT_TERM_BUDGET) -> SparsePoly:
    """Exact polynomial of the whole bouquet: sign * sum of summand expansions."""
    total = SparsePoly.zero(bouquet.n)
    for rc in bouquet.summands:
        total = total + expand(rc.circuit, term_budget)
    return total.scaled(bouquet.sign)


def eval_bouquet(bouquet: Bouquet, assignment: Assignment, prime: int = PRIME) -> int:
    total = 0
    for rc in bouquet.summands:
        total = (total + eval_circuit(rc.circuit, assignment, prime)) % prime
    return total * bouquet.sign % prime


def bouquet_variables(bouquet: Bouquet) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for rc in bouquet.summands:
        out |= variables_of(rc.circuit)
    return out


# ---------------------------------------------------------------------------
# Reference polynomials
# ---------------------------------------------------------------------------

REFERENCE_MAX_N = 8  # n! terms; 8! = 40320 is the desk-scale ceiling


def reference_det(n: int) -> SparsePoly:
    """Leibniz expansion of the n x n determinant: sum over pi of sgn(pi) prod x[i,pi(i)]."""
    if n > REFERENCE_MAX_N:
        raise TooLarge(f"reference determinant limited to n <= {REFERENCE_MAX_N}, got {n}")
    terms: dict[Monomial, int] = {}
    for pi in itertools.permutations(range(1, n + 1)):
        mono = tuple((i, pi[i - 1]) for i in range(1, n + 1))
        terms[mono] = sign_of_permutation(pi)
    return SparsePoly(n, terms)


def reference_perm(n: int) -> SparsePoly:
    """Permanent analogue: all n! products with coefficient +1."""
    if n > REFERENCE_MAX_N:
        raise TooLarge(f"reference permanent limited to n <= {REFERENCE_MAX_N}, got {n}")
    terms: dict[Monomial, int] = {}
    for pi in itertools.permutations(range(1, n + 1)):
        mono = tuple((i, pi[i - 1]) for i in range(1, n + 1))
        terms[mono] = 1
    return SparsePoly(n, terms)


# ---------------------------------------------------------------------------
# Equivalence checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Equivalent:
    trials: int
    per_trial_bound: float  # Schwartz-Zippel failure probability per trial

    @property
    def error_bound(self) -> float:
        return self.per_trial_bound**self.trials


@dataclass(frozen=True, slots=True)
class Distinct:
    witness: dict[tuple[int, int], int]
    value_a: int
    value_b: int


Verdict = Equivalent | Distinct


def equiv_exact(a: Circuit, b: Circuit, term_budget: int = DEFAULT_TERM_BUDGET) -> bool:
    """Term-by-term equality of the two expansions."""
    return expand(a, term_budget).terms == expand(b, term_budget).terms


def trial_point(
    variables: Iterable[tuple[int, int]], seed: int, trial: int, prime: int = PRIME
) -> dict[tuple[int, int], int]:
    """Deterministic uniform sample in [0, prime-1] for each variable.

    Sub-seeded per (seed, trial) so trials are independent and reorderable.
    """
    rng = random.Random(f"{seed}:{trial}")
    return {var: rng.randrange(prime) for var in sorted(variables)}


def equiv_random(
    a: Circuit,
    b: Circuit,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    prime: int = PRIME,
) -> Verdict:
    """Schwartz-Zippel identity test at `trials` seeded random points.

    Returns Distinct with the first separating point, or Equivalent with the
    per-trial error bound d/prime where d is the larger circuit degree.
    """
    if trials < 1:
        raise OracleError("trials must be >= 1")
    deg_a = len(validate(a)[a.root])
    deg_b = len(validate(b)[b.root])
    variables = variables_of(a) | variables_of(b)
    for t in range(trials):
        point = trial_point(variables, seed, t, prime)
        va = eval_circuit(a, point, prime)
        vb = eval_circuit(b, point, prime)
        if va != vb:
            return Distinct(point, va, vb)
    return Equivalent(trials, max(deg_a, deg_b) / prime)
