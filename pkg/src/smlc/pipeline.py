"""Iterative reduction of a bouquet to a single regular circuit.

Given a sum of k regular summands computing a degree-n determinant, each
iteration (1) relabels rows so the leading summand is ordered by the identity,
(2) merges same-order summands, (3) picks the first non-identity summand,
extracts an exact longest monotone run from its order (reversing the summand
first if the run is decreasing), and (4) projects the whole bouquet onto the
run's value set.  Every iteration turns one more summand into an
identity-ordered block, so the number of distinct orders drops by at least
one and at most k-1 iterations remain.  Since a monotone run in a length-m
sequence has length at least ceil(sqrt(m)), the final degree is at least
n^(1/2^(k-1)) when every run is at its floor; the transcript records both the
running guarantee and the lengths actually achieved.

The driver can verify every intermediate bouquet against the reference
determinant of the current degree: exactly (term-by-term expansion) up to
degree 6, by seeded random evaluation up to degree 8, and not at all beyond
that (the reference itself is factorial-sized).  A failed check raises
VerificationFailed: some pass broke semantics, the strongest possible error.

The even-degree trim (`trim_even`) drops one final index when the degree is
odd and reports half the even degree, which is the degree parameter the
downstream determinant-to-permanent conversion would produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from .circuit import (
    Bouquet,
    Circuit,
    ConstLeaf,
    RegularCircuit,
    bouquet_gate_count,
    gate_count,
    Mul,
    regular,
)
from .generators import DET_MAX_N, det_regular_circuit
from .passes import (
    DegreeTooSmall,
    Direction,
    MonotoneResult,
    compose,
    distinct_orders,
    drop_last_index,
    is_zero_summand,
    merge_summands,
    monotone_subsequence,
    project,
    reverse,
)
from .poly import (
    BudgetExceeded,
    DEFAULT_TERM_BUDGET,
    DEFAULT_TRIALS,
    PRIME,
    eval_bouquet,
    eval_circuit,
    expand_bouquet,
    identity_perm,
    invert_perm,
    reference_det,
    trial_point,
)

__all__ = [
    "ReductionStep",
    "Transcript",
    "TrimResult",
    "VerificationFailed",
    "OracleBudgetExceeded",
    "normalize_first",
    "reduce_to_single",
    "trim_even",
    "ceil_sqrt",
]

EXACT_VERIFY_MAX = 6  # factorial oracle ceiling for exact per-step checks


class VerificationFailed(Exception):
    """An intermediate bouquet no longer matches the reference determinant."""

    def __init__(self, step: int, detail: str):
        super().__init__(f"verification failed after step {step}: {detail}")
        self.step = step


class OracleBudgetExceeded(Exception):
    """Exact verification was requested on an instance too large to expand."""


@dataclass(frozen=True)
class ReductionStep:
    iteration: int
    tau_applied: tuple[int, ...] | None
    summand_reversed: int | None
    subsequence: MonotoneResult
    kept_indices: tuple[int, ...]
    sizes_before_after: tuple[int, int]  # internal gate counts, pending sign included
    k_before_after: tuple[int, int]  # distinct non-zero summand orders

    def to_obj(self) -> dict[str, Any]:
        return {
            "iteration": self.iteration,
            "tau_applied": list(self.tau_applied) if self.tau_applied else None,
            "summand_reversed": self.summand_reversed,
            "subsequence": {
                "direction": self.subsequence.direction.value,
                "positions": list(self.subsequence.positions),
                "values": list(self.subsequence.values),
            },
            "kept_indices": list(self.kept_indices),
            "sizes_before_after": list(self.sizes_before_after),
            "k_before_after": list(self.k_before_after),
        }

    @classmethod
    def from_obj(cls, obj: dict[str, Any]) -> "ReductionStep":
        sub = obj["subsequence"]
        return cls(
            iteration=obj["iteration"],
            tau_applied=tuple(obj["tau_applied"]) if obj["tau_applied"] else None,
            summand_reversed=obj["summand_reversed"],
            subsequence=MonotoneResult(
                positions=tuple(sub["positions"]),
                direction=Direction(sub["direction"]),
                values=tuple(sub["values"]),
            ),
            kept_indices=tuple(obj["kept_indices"]),
            sizes_before_after=tuple(obj["sizes_before_after"]),
            k_before_after=tuple(obj["k_before_after"]),
        )


@dataclass(frozen=True)
class Transcript:
    """Replayable record of one reduction run.

    Identical inputs and seed reproduce the transcript bit for bit.  The
    epsilon guarantee is 1/2^(k-1) for k distinct input orders; es_guarantee
    is that bound already instantiated (iterated ceil-sqrt of the input
    degree), and final_degree is never below it.
    """

    n_input: int
    k_input: int
    k_distinct_input: int
    verify: str
    seed: int
    trials: int
    pit_prime: int
    steps: tuple[ReductionStep, ...]
    verdicts: tuple[dict[str, Any], ...]
    final_degree: int
    final_gates: int
    epsilon_guarantee: float
    es_guarantee: int
    final_tau: tuple[int, ...] | None
    zero_summands_dropped: int

    def to_obj(self) -> dict[str, Any]:
        return {
            "config": {
                "n": self.n_input,
                "k": self.k_input,
                "k_distinct": self.k_distinct_input,
                "verify": self.verify,
                "seed": self.seed,
                "trials": self.trials,
                "pit_prime": str(self.pit_prime),
            },
            "steps": [step.to_obj() for step in self.steps],
            "verdicts": list(self.verdicts),
            "final_degree": self.final_degree,
            "final_gates": self.final_gates,
            "epsilon_guarantee": self.epsilon_guarantee,
            "es_guarantee": self.es_guarantee,
            "final_tau": list(self.final_tau) if self.final_tau else None,
            "zero_summands_dropped": self.zero_summands_dropped,
        }

    @classmethod
    def from_obj(cls, obj: dict[str, Any]) -> "Transcript":
        cfg = obj["config"]
        return cls(
            n_input=cfg["n"],
            k_input=cfg["k"],
            k_distinct_input=cfg["k_distinct"],
            verify=cfg["verify"],
            seed=cfg["seed"],
            trials=cfg["trials"],
            pit_prime=int(cfg["pit_prime"]),
            steps=tuple(ReductionStep.from_obj(s) for s in obj["steps"]),
            verdicts=tuple(obj["verdicts"]),
            final_degree=obj["final_degree"],
            final_gates=obj["final_gates"],
            epsilon_guarantee=obj["epsilon_guarantee"],
            es_guarantee=obj["es_guarantee"],
            final_tau=tuple(obj["final_tau"]) if obj["final_tau"] else None,
            zero_summands_dropped=obj["zero_summands_dropped"],
        )


@dataclass(frozen=True)
class TrimResult:
    circuit: RegularCircuit
    even_degree: int
    permanent_degree: int


def ceil_sqrt(m: int) -> int:
    c = math.isqrt(m)
    return c if c * c == m else c + 1


def _first_nonzero(bouquet: Bouquet) -> RegularCircuit | None:
    for rc in bouquet.summands:
        if not is_zero_summand(rc):
            return rc
    return None


def normalize_first(bouquet: Bouquet) -> Bouquet:
    """Compose with the inverse of the leading order so it becomes the identity.

    The leading order is taken from the first non-zero summand; a bouquet of
    zeros has nothing to normalize.  Adds no nodes; an odd inverse flips the
    pending bouquet sign, which counts as one gate in the size accounting.
    """
    ref = _first_nonzero(bouquet)
    if ref is None or ref.sigma == identity_perm(bouquet.n):
        return bouquet
    return compose(bouquet, invert_perm(ref.sigma))


def _normalize_tau(bouquet: Bouquet) -> tuple[int, ...] | None:
    ref = _first_nonzero(bouquet)
    if ref is None or ref.sigma == identity_perm(bouquet.n):
        return None
    return invert_perm(ref.sigma)


def _verify_step(
    bouquet: Bouquet,
    mode: str,
    step: int,
    seed: int,
    trials: int,
    term_budget: int,
) -> dict[str, Any]:
    if mode == "off":
        return {"step": step, "mode": "off", "ok": None}
    d = bouquet.n
    if mode == "exact" and d <= EXACT_VERIFY_MAX:
        try:
            got = expand_bouquet(bouquet, term_budget)
        except BudgetExceeded as exc:
            raise OracleBudgetExceeded(str(exc)) from exc
        if got.terms != reference_det(d).terms:
            raise VerificationFailed(step, f"expansion differs from degree-{d} determinant")
        return {"step": step, "mode": "exact", "ok": True}
    if d <= DET_MAX_N:
        ref = det_regular_circuit(d, identity_perm(d))
        grid = [(r, c) for r in range(1, d + 1) for c in range(1, d + 1)]
        for t in range(trials):
            point = trial_point(grid, seed, step * trials + t)
            if eval_bouquet(bouquet, point) != eval_circuit(ref.circuit, point):
                raise VerificationFailed(
                    step, f"random evaluation differs from degree-{d} determinant"
                )
        return {
            "step": step,
            "mode": "random",
            "ok": True,
            "trials": trials,
            "per_trial_bound": d / PRIME,
        }
    return {"step": step, "mode": "skipped", "ok": None, "reason": f"degree {d} beyond reference range"}


def reduce_to_single(
    bouquet: Bouquet,
    verify: str = "exact",
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
    term_budget: int = DEFAULT_TERM_BUDGET,
) -> tuple[RegularCircuit, Transcript]:
    """Run the full reduction and return the single regular circuit plus transcript.

    verify is one of "off", "random", "exact"; exact checking silently tiers
    down to random evaluation between degrees 7 and 8 and is skipped above
    (the reference determinant cannot even be built there).  The caller
    promises the input computes the determinant of degree n; with verify on,
    a broken promise (or a broken pass) surfaces as VerificationFailed.
    """
    if verify not in ("off", "random", "exact"):
        raise ValueError(f"unknown verify mode {verify!r}")

    cur = bouquet
    steps: list[ReductionStep] = []
    verdicts: list[dict[str, Any]] = [
        _verify_step(cur, verify, 0, seed, trials, term_budget)
    ]
    iteration = 0
    guarantee = cur.n

    while distinct_orders(cur) > 1:
        iteration += 1
        k_before = distinct_orders(cur)
        gates_before = bouquet_gate_count(cur)

        tau = _normalize_tau(cur)
        cur = normalize_first(cur)
        cur = merge_summands(cur)

        ident = identity_perm(cur.n)
        target_idx = next(
            i
            for i, rc in enumerate(cur.summands)
            if not is_zero_summand(rc) and rc.sigma != ident
        )
        run = monotone_subsequence(cur.summands[target_idx].sigma)
        reversed_idx = None
        if run.direction is Direction.DECREASING:
            flipped = reverse(cur.summands[target_idx])
            summands = list(cur.summands)
            summands[target_idx] = flipped
            cur = Bouquet(cur.n, tuple(summands), cur.sign)
            reversed_idx = target_idx
        kept = tuple(sorted(run.values))

        cur = project(cur, kept)
        guarantee = ceil_sqrt(guarantee)
        verdicts.append(_verify_step(cur, verify, iteration, seed, trials, term_budget))
        steps.append(
            ReductionStep(
                iteration=iteration,
                tau_applied=tau,
                summand_reversed=reversed_idx,
                subsequence=run,
                kept_indices=kept,
                sizes_before_after=(gates_before, bouquet_gate_count(cur)),
                k_before_after=(k_before, distinct_orders(cur)),
            )
        )

    final_tau = _normalize_tau(cur)
    cur = normalize_first(cur)
    cur = merge_summands(cur)

    survivors = [rc for rc in cur.summands if not is_zero_summand(rc)]
    dropped = len(cur.summands) - len(survivors)
    if not survivors:
        single = regular(
            Circuit(cur.n, (ConstLeaf(0),), 0), identity_perm(cur.n)
        )
    else:
        single = survivors[0]
        if cur.sign < 0:
            nodes = list(single.circuit.nodes)
            nodes.append(ConstLeaf(-1))
            nodes.append(Mul(len(nodes) - 1, single.circuit.root))
            single = regular(
                Circuit(cur.n, tuple(nodes), len(nodes) - 1), single.sigma
            )

    transcript = Transcript(
        n_input=bouquet.n,
        k_input=len(bouquet.summands),
        k_distinct_input=max(1, distinct_orders(bouquet)),
        verify=verify,
        seed=seed,
        trials=trials,
        pit_prime=PRIME,
        steps=tuple(steps),
        verdicts=tuple(verdicts),
        final_degree=cur.n,
        final_gates=gate_count(single.circuit),
        epsilon_guarantee=1.0 / 2 ** (max(1, distinct_orders(bouquet)) - 1),
        es_guarantee=guarantee,
        final_tau=final_tau,
        zero_summands_dropped=dropped,
    )
    return single, transcript


def trim_even(rc: RegularCircuit) -> TrimResult:
    """Drop the last index if the degree is odd; report the implied half degree.

    The input is a single regular circuit computing the determinant of its
    grid size d.  Odd d is lowered to d-1 by one projection; the returned
    permanent_degree is (even degree)/2.
    """
    d = rc.circuit.n
    if d < 2:
        raise DegreeTooSmall(d)
    if d % 2 == 0:
        return TrimResult(rc, d, d // 2)
    trimmed = drop_last_index(Bouquet(d, (rc,)))
    return TrimResult(trimmed.summands[0], d - 1, (d - 1) // 2)
