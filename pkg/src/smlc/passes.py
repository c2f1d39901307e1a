"""Structural passes over regular circuits and bouquets.

All passes are pure: they rebuild node lists and never mutate their inputs.
Each output is re-checked through `regular`, so a pass that broke typing or
interval structure fails loudly instead of producing a corrupt bouquet.

The passes:

  reverse             swap the children of every product gate; the result is
                      regular w.r.t. the reversed order and computes the same
                      commutative polynomial.
  compose             substitute x[t(r),c] for x[r,c] everywhere; each
                      summand's order becomes t o sigma, and the bouquet sign
                      flips when t is odd (on an alternating-sign polynomial
                      the row relabeling flips the whole sum).
  monotone_subsequence  exact longest increasing/decreasing subsequence with
                      a deterministic tie-break.
  project             restrict to a kept row subset by 0/1 substitution,
                      constant-fold, and rank-rename rows/columns to 1..|A|.
  merge_summands      join summands that share an order under addition gates.
  drop_last_index     projection dropping the highest row/column index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .circuit import (
    Add,
    Bouquet,
    Circuit,
    CircuitError,
    ConstLeaf,
    Mul,
    Node,
    RegularCircuit,
    VarLeaf,
    regular,
)
from .poly import (
    NotAPermutation,
    check_permutation,
    compose_perms,
    identity_perm,
    sign_of_permutation,
)

__all__ = [
    "Direction",
    "MonotoneResult",
    "PassError",
    "DuplicateEntries",
    "EmptyKeepSet",
    "OrderIncompatible",
    "DegreeTooSmall",
    "reverse",
    "compose",
    "monotone_subsequence",
    "project",
    "merge_summands",
    "drop_last_index",
    "is_zero_summand",
    "distinct_orders",
]


class PassError(Exception):
    """Base class for pass-level domain errors."""


class DuplicateEntries(PassError):
    def __init__(self, value: int):
        super().__init__(f"sequence entries must be distinct; {value} repeats")


class EmptyKeepSet(PassError):
    def __init__(self):
        super().__init__("projection needs a non-empty keep set")


class OrderIncompatible(PassError):
    """A projected summand failed regularity re-inference.

    Unreachable when the input bouquet is well formed; raised to surface
    pipeline bugs instead of silently propagating a corrupt circuit.
    """


class DegreeTooSmall(PassError):
    def __init__(self, degree: int):
        super().__init__(f"cannot drop an index at degree {degree}; need >= 2")


# ---------------------------------------------------------------------------
# Reversal
# ---------------------------------------------------------------------------

def reverse(rc: RegularCircuit) -> RegularCircuit:
    """Swap the children of every product gate.

    The node count, ids, and the computed commutative polynomial are all
    unchanged; only the interval structure flips, so the result is regular
    w.r.t. the reversed order.  Any value set that appears as a decreasing
    run in the original order appears as an increasing run afterwards.
    """
    nodes = tuple(
        Mul(node.right, node.left) if isinstance(node, Mul) else node
        for node in rc.circuit.nodes
    )
    flipped = Circuit(rc.circuit.n, nodes, rc.circuit.root)
    return regular(flipped, tuple(reversed(rc.sigma)))


# ---------------------------------------------------------------------------
# Composition with a row permutation
# ---------------------------------------------------------------------------

def compose(bouquet: Bouquet, tau: Iterable[int]) -> Bouquet:
    """Relabel row r to tau(r) in every variable leaf of every summand.

    Summand i becomes regular w.r.t. tau o sigma_i.  On a bouquet computing
    the determinant this preserves the polynomial: relabeling rows by tau
    multiplies the value by sign(tau), which the bouquet sign absorbs.  On
    arbitrary polynomials it is NOT value-preserving (it genuinely permutes
    monomials), which is exactly why the determinant contract matters.
    """
    tau = check_permutation(tau)
    if len(tau) != bouquet.n:
        raise NotAPermutation(tau)
    if tau == identity_perm(bouquet.n):
        return bouquet

    summands = []
    for rc in bouquet.summands:
        nodes = tuple(
            VarLeaf(tau[node.row - 1], node.col) if isinstance(node, VarLeaf) else node
            for node in rc.circuit.nodes
        )
        circuit = Circuit(bouquet.n, nodes, rc.circuit.root)
        summands.append(regular(circuit, compose_perms(tau, rc.sigma)))
    sign = bouquet.sign * sign_of_permutation(tau)
    return Bouquet(bouquet.n, tuple(summands), sign)


# ---------------------------------------------------------------------------
# Monotone subsequences
# ---------------------------------------------------------------------------

class Direction(enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True, slots=True)
class MonotoneResult:
    positions: tuple[int, ...]  # 1-based indices into the input sequence
    direction: Direction
    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.positions)


def _longest_run(seq: Sequence[int], decreasing: bool) -> list[int]:
    # O(m^2) DP; strict improvement keeps the leftmost optimum, which makes
    # both the chosen end and every back-pointer deterministic
    m = len(seq)
    best = [1] * m
    prev = [-1] * m
    for i in range(m):
        si = seq[i]
        for j in range(i):
            better = seq[j] > si if decreasing else seq[j] < si
            if better and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
                prev[i] = j
    end = best.index(max(best))
    out: list[int] = []
    while end != -1:
        out.append(end)
        end = prev[end]
    out.reverse()
    return out


def monotone_subsequence(seq: Sequence[int]) -> MonotoneResult:
    """Longest strictly monotone subsequence of a sequence of distinct integers.

    Computes both the longest increasing and the longest decreasing
    subsequence exactly and returns the longer one, preferring increasing on
    ties.  For input length m the result has length at least ceil(sqrt(m)).
    """
    seq = list(seq)
    if not seq:
        raise PassError("sequence must be non-empty")
    seen: set[int] = set()
    for value in seq:
        if value in seen:
            raise DuplicateEntries(value)
        seen.add(value)

    inc = _longest_run(seq, decreasing=False)
    dec = _longest_run(seq, decreasing=True)
    if len(inc) >= len(dec):
        chosen, direction = inc, Direction.INCREASING
    else:
        chosen, direction = dec, Direction.DECREASING
    return MonotoneResult(
        positions=tuple(i + 1 for i in chosen),
        direction=direction,
        values=tuple(seq[i] for i in chosen),
    )


# ---------------------------------------------------------------------------
# Projection onto a kept row subset
# ---------------------------------------------------------------------------

_CONST = 0  # descriptor tags
_REF = 1


def _substitute_and_fold(
    circuit: Circuit, keep: frozenset[int], rank: dict[int, int], new_n: int
) -> Circuit:
    """Apply the 0/1 substitutions for dropped rows, fold constants, rename.

    Dropped-row variables become 1 on the diagonal and 0 elsewhere; kept-row
    variables with a dropped column become 0.  Folding keeps the result
    well typed: products with a 0 factor collapse, unit factors disappear,
    constant-only gates fold, and a dead (zero) branch of an addition is
    dropped.  Node counts never grow.
    """
    nodes: list[Node] = []
    const_ids: dict[int, int] = {}

    def emit(node: Node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def emit_const(value: int) -> int:
        got = const_ids.get(value)
        if got is None:
            got = emit(ConstLeaf(value))
            const_ids[value] = got
        return got

    # descriptor per old node: (_CONST, value) or (_REF, new id)
    desc: list[tuple[int, int]] = []
    for node in circuit.nodes:
        if isinstance(node, ConstLeaf):
            desc.append((_CONST, node.value))
        elif isinstance(node, VarLeaf):
            if node.row not in keep:
                desc.append((_CONST, 1 if node.col == node.row else 0))
            elif node.col not in keep:
                desc.append((_CONST, 0))
            else:
                desc.append((_REF, emit(VarLeaf(rank[node.row], rank[node.col]))))
        elif isinstance(node, Add):
            lt, lv = desc[node.left]
            rt, rv = desc[node.right]
            if lt == _CONST and rt == _CONST:
                desc.append((_CONST, lv + rv))
            elif lt == _CONST and lv == 0:
                desc.append((_REF, rv))
            elif rt == _CONST and rv == 0:
                desc.append((_REF, lv))
            elif lt == _CONST or rt == _CONST:
                # nonzero constant next to a live branch cannot happen for a
                # well-typed input; materialize and let regularity re-checking
                # reject it
                left = emit_const(lv) if lt == _CONST else lv
                right = emit_const(rv) if rt == _CONST else rv
                desc.append((_REF, emit(Add(left, right))))
            else:
                desc.append((_REF, emit(Add(lv, rv))))
        else:
            lt, lv = desc[node.left]
            rt, rv = desc[node.right]
            if lt == _CONST and rt == _CONST:
                desc.append((_CONST, lv * rv))
            elif (lt == _CONST and lv == 0) or (rt == _CONST and rv == 0):
                desc.append((_CONST, 0))
            elif lt == _CONST and lv == 1:
                desc.append((_REF, rv))
            elif rt == _CONST and rv == 1:
                desc.append((_REF, lv))
            elif lt == _CONST:
                desc.append((_REF, emit(Mul(emit_const(lv), rv))))
            elif rt == _CONST:
                desc.append((_REF, emit(Mul(lv, emit_const(rv)))))
            else:
                desc.append((_REF, emit(Mul(lv, rv))))

    tag, value = desc[circuit.root]
    root = emit_const(value) if tag == _CONST else value
    return Circuit(n=new_n, nodes=tuple(nodes), root=root)


def project(bouquet: Bouquet, keep: Iterable[int]) -> Bouquet:
    """Restrict a bouquet to the rows/columns in `keep` and rename by rank.

    For every dropped index j the substitution fixes x[j,j]=1 and zeroes the
    rest of row and column j; the j-th smallest kept index is then renamed to
    j.  On a degree-m determinant bouquet the result computes the determinant
    of the kept principal submatrix, renamed to degree |keep|.  Each summand
    comes back regular w.r.t. its order restricted to the kept values.
    """
    keep_list = sorted(set(keep))
    if not keep_list:
        raise EmptyKeepSet()
    if keep_list[0] < 1 or keep_list[-1] > bouquet.n:
        raise PassError(f"keep set {keep_list} not within [1..{bouquet.n}]")
    keep_set = frozenset(keep_list)
    rank = {value: i + 1 for i, value in enumerate(keep_list)}
    new_n = len(keep_list)

    summands = []
    for idx, rc in enumerate(bouquet.summands):
        projected = _substitute_and_fold(rc.circuit, keep_set, rank, new_n)
        induced = tuple(rank[v] for v in rc.sigma if v in keep_set)
        try:
            summands.append(regular(projected, induced))
        except CircuitError as exc:
            raise OrderIncompatible(
                f"summand {idx} lost regularity under keep set {keep_list}: {exc}"
            ) from exc
    return Bouquet(new_n, tuple(summands), bouquet.sign)


def drop_last_index(bouquet: Bouquet) -> Bouquet:
    """Drop the highest row/column index, lowering a determinant's degree by one."""
    if bouquet.n < 2:
        raise DegreeTooSmall(bouquet.n)
    return project(bouquet, range(1, bouquet.n))


# ---------------------------------------------------------------------------
# Summand merging
# ---------------------------------------------------------------------------

def is_zero_summand(rc: RegularCircuit) -> bool:
    node = rc.circuit.nodes[rc.circuit.root]
    return isinstance(node, ConstLeaf) and node.value == 0


def distinct_orders(bouquet: Bouquet) -> int:
    """Number of distinct orders among non-zero summands (the k' of a bouquet)."""
    return len({rc.sigma for rc in bouquet.summands if not is_zero_summand(rc)})


def _join_add(a: RegularCircuit, b: RegularCircuit, n: int) -> RegularCircuit:
    offset = len(a.circuit.nodes)
    nodes: list[Node] = list(a.circuit.nodes)
    for node in b.circuit.nodes:
        if isinstance(node, (Add, Mul)):
            nodes.append(type(node)(node.left + offset, node.right + offset))
        else:
            nodes.append(node)
    nodes.append(Add(a.circuit.root, b.circuit.root + offset))
    return regular(Circuit(n, tuple(nodes), len(nodes) - 1), a.sigma)


def merge_summands(bouquet: Bouquet) -> Bouquet:
    """Join same-order summands under addition gates.

    Afterwards all non-zero summands carry pairwise distinct orders.  Zero
    summands are left in place (adding them to a non-constant summand would
    not even type-check) and never absorb a join.  Joining g summands costs
    g-1 addition gates; the summed polynomial is unchanged.
    """
    groups: dict[tuple[int, ...], int] = {}  # sigma -> output position
    out: list[RegularCircuit] = []
    for rc in bouquet.summands:
        if is_zero_summand(rc):
            out.append(rc)
            continue
        slot = groups.get(rc.sigma)
        if slot is None:
            groups[rc.sigma] = len(out)
            out.append(rc)
        else:
            out[slot] = _join_add(out[slot], rc, bouquet.n)
    return Bouquet(bouquet.n, tuple(out), bouquet.sign)
