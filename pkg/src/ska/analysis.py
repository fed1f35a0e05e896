"""Growth and loss rates of the MMI under common-randomness perturbations.

Everything here is driven by the optimal-partition set. The growth rate of
a subset S is the worst normalized block-crossing count over optimal
partitions; the loss rate of an edge is the best one; critical edges are
the minimal subsets with positive growth rate (equivalently: minimal
subsets crossing every optimal partition); excess edges are the ones whose
marginal removal leaves the MMI unchanged (equivalently: edges inside one
fundamental block). All critical edges share one size, which the
T1/T2 dichotomy turns into an explicit construction.

Each closed-form route keeps a brute-force twin
(:func:`critical_edges_bruteforce`, :func:`perturbation_verify`) so the two
can be pitted against each other, exactly, in tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import MissingEdgeError, SkaError
from .mmi import MmiResult, mmi
from .rationals import format_rational, parse_rational
from .source_model import HypergraphicalSource, SourceModel, UserSet
from .structure import TMaxReport, t_max


def growth_rate(source: SourceModel, result: MmiResult, subset) -> Fraction:
    """One-sided derivative of the MMI when common randomness is added to
    the subset: min over optimal partitions P of
    ``(blocks crossed - 1) / (|P| - 1)``; 0 for the empty subset."""
    mask = source.users.as_mask(subset)
    if mask == 0:
        return Fraction(0)
    return min(
        Fraction(p.blocks_crossed(mask) - 1, p.n_blocks - 1)
        for p in result.optimal_partitions
    )


def loss_rate(source: SourceModel, result: MmiResult, edge) -> Fraction:
    """One-sided derivative of the MMI when common randomness is removed
    from an edge the source carries: max over optimal partitions of
    ``(blocks crossed - 1) / (|P| - 1)``."""
    mask = _require_edge(source, edge)
    return max(
        Fraction(p.blocks_crossed(mask) - 1, p.n_blocks - 1)
        for p in result.optimal_partitions
    )


def is_excess(source: SourceModel, result: MmiResult, edge) -> bool:
    """True when the edge sits inside one block of the fundamental
    partition, i.e. its marginal removal does not lower the MMI."""
    mask = _require_edge(source, edge)
    return any(mask & ~block == 0 for block in result.fundamental.blocks)


def _require_edge(source: SourceModel, edge) -> int:
    if not isinstance(source, HypergraphicalSource):
        raise MissingEdgeError("edge-wise analysis needs a hypergraphical source")
    mask = source.users.as_mask(edge)
    if source.has_edge(mask) <= 0:
        raise MissingEdgeError(
            f"source does not have edge {{{source.users.subset_key(mask)}}}"
        )
    return mask


@dataclass(frozen=True)
class GrowthCurve:
    """Best growth rate per subset-size budget k, with witnesses.

    ``values[k]`` is the maximum growth rate over subsets of size at most k
    (0 for k <= 1, reaching 1 exactly from the fundamental block count on);
    ``witnesses[k]`` is a subset mask attaining it.
    """

    users: UserSet
    values: tuple
    witnesses: tuple

    def value(self, k: int) -> Fraction:
        return self.values[k]

    def witness_labels(self, k: int) -> tuple[str, ...]:
        return self.users.labels_of(self.witnesses[k])

    def to_json_dict(self) -> dict:
        return {
            "values": {str(k): format_rational(v) for k, v in enumerate(self.values)},
            "witnesses": {
                str(k): list(self.users.labels_of(w))
                for k, w in enumerate(self.witnesses)
            },
        }

    @classmethod
    def from_json_dict(cls, users: UserSet, data: dict) -> "GrowthCurve":
        k_max = max(int(k) for k in data["values"])
        return cls(
            users=users,
            values=tuple(parse_rational(data["values"][str(k)]) for k in range(k_max + 1)),
            witnesses=tuple(
                users.as_mask(tuple(data["witnesses"][str(k)])) for k in range(k_max + 1)
            ),
        )


def growth_curve(source: SourceModel, result: MmiResult, k_max: int | None = None) -> GrowthCurve:
    """Exact growth rates of every order up to ``k_max`` by subset
    enumeration (size-k layer per step, early exit at the ceiling 1).

    When the optimal partition is unique the curve must be the straight line
    ``(k - 1) / (ell - 1)`` up to the fundamental block count; that shortcut
    is cross-checked against the enumerated values and any disagreement
    raises, since it would mean a bug.
    """
    users = source.users
    n = users.n
    if k_max is None:
        k_max = n
    if not 0 <= k_max <= n:
        raise SkaError(f"k_max must lie in 0..{n}")
    values = [Fraction(0)]
    witnesses = [0]
    best = Fraction(0)
    best_witness = 0
    for k in range(1, k_max + 1):
        if best < 1:
            for combo in itertools.combinations(range(n), k):
                mask = 0
                for i in combo:
                    mask |= 1 << i
                rate = growth_rate(source, result, mask)
                if rate > best:
                    best, best_witness = rate, mask
                    if best == 1:
                        break
        values.append(best)
        witnesses.append(best_witness)
    if len(result.optimal_partitions) == 1:
        ell = result.ell
        for k in range(1, min(k_max, ell) + 1):
            expected = Fraction(k - 1, ell - 1)
            if values[k] != expected:
                raise SkaError(
                    f"unique-optimum shortcut disagrees with enumeration at k={k}: "
                    f"{values[k]} != {expected}; this indicates a bug"
                )
    return GrowthCurve(users=users, values=tuple(values), witnesses=tuple(witnesses))


@dataclass(frozen=True)
class CriticalEdgeReport:
    """All critical edges, their common size, and the dichotomy case that
    produced them."""

    users: UserSet
    edges: tuple[int, ...]
    common_size: int
    case: str

    def edge_labels(self) -> tuple[tuple[str, ...], ...]:
        return tuple(self.users.labels_of(m) for m in self.edges)

    def to_json_dict(self) -> dict:
        return {
            "edges": [list(e) for e in self.edge_labels()],
            "common_size": self.common_size,
            "case": self.case,
        }

    @classmethod
    def from_json_dict(cls, users: UserSet, data: dict) -> "CriticalEdgeReport":
        return cls(
            users=users,
            edges=tuple(users.as_mask(tuple(e)) for e in data["edges"]),
            common_size=int(data["common_size"]),
            case=str(data["case"]),
        )


def critical_edges(
    source: SourceModel,
    result: MmiResult,
    report: TMaxReport | None = None,
) -> CriticalEdgeReport:
    """Critical edges from the maximal optimal blocks.

    Case T1 (maximal blocks partition the ground set): all pairs with one
    element inside a maximal block and one outside, so the common size is 2.
    Case T2: one representative from each complement of a maximal block;
    the complements are disjoint, so the common size is the number of
    maximal blocks.
    """
    rep = report if report is not None else t_max(source, result)
    users = source.users
    full = users.full_mask
    if rep.case == "T1":
        edges = {
            1 << i | 1 << j
            for block in rep.t_max
            for i in _bits(block)
            for j in _bits(full & ~block)
        }
        size = 2
    else:
        assert rep.complement_family is not None
        edges = set()
        for combo in itertools.product(*(_bits(c) for c in rep.complement_family)):
            mask = 0
            for i in combo:
                mask |= 1 << i
            edges.add(mask)
        size = len(rep.t_max)
    ordered = tuple(sorted(edges, key=lambda m: tuple(_bits(m))))
    return CriticalEdgeReport(users=users, edges=ordered, common_size=size, case=rep.case)


def critical_edges_bruteforce(source: SourceModel, result: MmiResult) -> tuple[int, ...]:
    """Definitional oracle: the inclusion-wise minimal subsets that cross
    (at least two blocks of) every optimal partition, by full subset scan.
    Independent of the dichotomy construction on purpose."""
    users = source.users
    n = users.n

    def crosses_all(mask: int) -> bool:
        return all(p.blocks_crossed(mask) >= 2 for p in result.optimal_partitions)

    qualifying = [mask for mask in range(1, 1 << n) if crosses_all(mask)]
    qualifying_set = set(qualifying)
    minimal = [
        mask
        for mask in qualifying
        if not any(mask & ~(1 << i) in qualifying_set for i in _bits(mask))
    ]
    return tuple(sorted(minimal, key=lambda m: tuple(_bits(m))))


def greedy_critical_edge(source: SourceModel, result: MmiResult) -> tuple[str, ...]:
    """One critical edge by the shrinking scan: start from the full set and
    drop users in label order whenever the remainder still has positive
    growth rate."""
    users = source.users
    current = users.full_mask
    for i in range(users.n):
        candidate = current & ~(1 << i)
        if candidate and growth_rate(source, result, candidate) > 0:
            current = candidate
    return users.labels_of(current)


@dataclass(frozen=True)
class GranularityCheck:
    """Secondary verification at the integer-entropy step size
    ``1 / ((n - 1)(n - 2))``."""

    epsilon: Fraction
    measured_rate: Fraction
    ok: bool

    def to_json_dict(self) -> dict:
        return {
            "epsilon": format_rational(self.epsilon),
            "measured_rate": format_rational(self.measured_rate),
            "ok": self.ok,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GranularityCheck":
        return cls(
            epsilon=parse_rational(data["epsilon"]),
            measured_rate=parse_rational(data["measured_rate"]),
            ok=bool(data["ok"]),
        )


@dataclass(frozen=True)
class PerturbationVerdict:
    """Outcome of replaying a rate prediction against a real perturbation.

    ``identity_ok`` asserts the exact equality of the closed-form rate and
    the recomputed difference quotient; ``containment_ok`` asserts that the
    perturbed source's optimal partitions all were optimal already (checked
    only at the default step gap/2, where it is guaranteed).
    """

    mode: str
    subset: tuple[str, ...]
    epsilon: Fraction
    formula_rate: Fraction
    measured_rate: Fraction
    identity_ok: bool
    containment_ok: bool
    granularity: GranularityCheck | None

    @property
    def ok(self) -> bool:
        return (
            self.identity_ok
            and self.containment_ok
            and (self.granularity is None or self.granularity.ok)
        )

    def describe(self) -> str:
        status = "ok" if self.ok else "FAILED"
        parts = [
            f"{self.mode} {{{','.join(self.subset)}}}: {status}",
            f"rate {format_rational(self.formula_rate)}",
            f"measured {format_rational(self.measured_rate)} at eps {format_rational(self.epsilon)}",
        ]
        if not self.containment_ok:
            parts.append("new optimal partitions appeared")
        if self.granularity is not None and not self.granularity.ok:
            parts.append(
                f"integer-step check failed at eps {format_rational(self.granularity.epsilon)}"
            )
        return "; ".join(parts)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "subset": list(self.subset),
            "epsilon": format_rational(self.epsilon),
            "formula_rate": format_rational(self.formula_rate),
            "measured_rate": format_rational(self.measured_rate),
            "identity_ok": self.identity_ok,
            "containment_ok": self.containment_ok,
            "granularity": None if self.granularity is None else self.granularity.to_json_dict(),
            "ok": self.ok,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PerturbationVerdict":
        return cls(
            mode=str(data["mode"]),
            subset=tuple(str(x) for x in data["subset"]),
            epsilon=parse_rational(data["epsilon"]),
            formula_rate=parse_rational(data["formula_rate"]),
            measured_rate=parse_rational(data["measured_rate"]),
            identity_ok=bool(data["identity_ok"]),
            containment_ok=bool(data["containment_ok"]),
            granularity=(
                None
                if data["granularity"] is None
                else GranularityCheck.from_json_dict(data["granularity"])
            ),
        )


def perturbation_verify(
    source: SourceModel,
    result: MmiResult,
    subset,
    mode: str = "increment",
    *,
    epsilon=None,
    backend: str | None = None,
) -> PerturbationVerdict:
    """Replay a growth or loss rate against a real perturbed source.

    The default step is gap/2 (1 when the gap is infinite), which keeps the
    perturbed minimizers inside the original optimal set, so the difference
    quotient must equal the closed-form rate exactly; a failed verdict
    therefore signals a bug, never noise. For decrements the step is also
    capped by the available edge weight. On integer-entropy sources with at
    least three users the quotient is additionally replayed at the step
    ``1 / ((n - 1)(n - 2))``, which the value grid guarantees to stay below
    the gap.
    """
    users = source.users
    mask = users.as_mask(subset)
    if mode == "increment":
        formula = growth_rate(source, result, mask)
    elif mode == "decrement":
        formula = loss_rate(source, result, mask)
    else:
        raise SkaError(f"unknown mode {mode!r}")

    auto = epsilon is None
    if auto:
        eps = result.gap / 2 if result.gap is not None else Fraction(1)
        if mode == "decrement":
            eps = min(eps, source.has_edge(mask))
    else:
        eps = Fraction(epsilon)
        if eps <= 0:
            raise SkaError("epsilon must be positive")
        if mode == "decrement" and eps > source.has_edge(mask):
            raise MissingEdgeError(
                f"source does not have edge {{{users.subset_key(mask)}}} "
                f"of entropy {eps}"
            )

    measured, contained = _measured_rate(source, result, mask, mode, eps, backend)
    granularity = None
    if auto and source.is_integral() and users.n >= 3 and mask:
        eps_v = Fraction(1, (users.n - 1) * (users.n - 2))
        if mode == "increment" or eps_v <= source.has_edge(mask):
            measured_v, _ = _measured_rate(source, result, mask, mode, eps_v, backend)
            granularity = GranularityCheck(
                epsilon=eps_v, measured_rate=measured_v, ok=measured_v == formula
            )

    return PerturbationVerdict(
        mode=mode,
        subset=users.labels_of(mask),
        epsilon=eps,
        formula_rate=formula,
        measured_rate=measured,
        identity_ok=measured == formula,
        containment_ok=contained if auto else True,
        granularity=granularity,
    )


def _measured_rate(source, result, mask, mode, eps, backend):
    if mode == "increment":
        perturbed = source.increment(mask, eps) if mask else source
        new = mmi(perturbed, backend=backend) if mask else result
        measured = (new.gamma - result.gamma) / eps
    else:
        perturbed = source.decrement(mask, eps)
        new = mmi(perturbed, backend=backend)
        measured = (result.gamma - new.gamma) / eps
    contained = set(new.optimal_partitions) <= set(result.optimal_partitions)
    return measured, contained


@dataclass(frozen=True)
class ConjectureEntry:
    edge: tuple[str, ...]
    rate: Fraction
    predicted: Fraction
    holds: bool

    def to_json_dict(self) -> dict:
        return {
            "edge": list(self.edge),
            "rate": format_rational(self.rate),
            "predicted": format_rational(self.predicted),
            "holds": self.holds,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConjectureEntry":
        return cls(
            edge=tuple(str(x) for x in data["edge"]),
            rate=parse_rational(data["rate"]),
            predicted=parse_rational(data["predicted"]),
            holds=bool(data["holds"]),
        )


@dataclass(frozen=True)
class ConjectureReport:
    """Per-critical-edge comparison of the growth rate against the guess
    ``(|S| - 1) / (ell - 1)``. Violations are reported, never asserted: the
    guess is an open question, not an invariant."""

    entries: tuple[ConjectureEntry, ...]

    @property
    def all_hold(self) -> bool:
        return all(e.holds for e in self.entries)

    @property
    def counts(self) -> tuple[int, int]:
        return sum(1 for e in self.entries if e.holds), len(self.entries)

    def to_json_dict(self) -> dict:
        holds, total = self.counts
        return {
            "entries": [e.to_json_dict() for e in self.entries],
            "holds": holds,
            "total": total,
            "all_hold": self.all_hold,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ConjectureReport":
        return cls(entries=tuple(ConjectureEntry.from_json_dict(e) for e in data["entries"]))


def conjecture_check(
    source: SourceModel,
    result: MmiResult,
    report: CriticalEdgeReport | None = None,
) -> ConjectureReport:
    """Evaluate the growth rate of every critical edge and compare it with
    ``(|S| - 1) / (ell - 1)``."""
    rep = report if report is not None else critical_edges(source, result)
    ell = result.ell
    entries = []
    for mask in rep.edges:
        rate = growth_rate(source, result, mask)
        predicted = Fraction(len(_bits(mask)) - 1, ell - 1)
        entries.append(
            ConjectureEntry(
                edge=source.users.labels_of(mask),
                rate=rate,
                predicted=predicted,
                holds=rate == predicted,
            )
        )
    return ConjectureReport(entries=tuple(entries))


def _bits(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)
