"""Executable activation semantics: the brute-force oracle.

Activations are monotone event sequences; schedules are finite sets of them.
Satisfaction of an interface by an activation follows the inductive clause
table exactly, so enumeration over a finite universe decides (relative to
that universe) refinement, equivalence, tightening, persistence and
causality.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .kernel import (
    NEG_INF,
    POS_INF,
    And,
    Atom,
    Bound,
    Delay,
    DelayB,
    EmbedInterface,
    ExtNat,
    FalseT,
    Implies,
    InL,
    InR,
    Interface,
    Not,
    OPlus,
    OTimes,
    Or,
    PairB,
    SchedAlgebraError,
    Table,
    TrueT,
    TypeExpr,
    UNIT,
    UnsupportedTypeError,
    check_extnat,
    classify,
    enumerate_bounds,
    is_pure,
    iter_bounds_grid,
    pure_interface,
)


class BudgetError(SchedAlgebraError):
    """Universe enumeration would exceed the configured budget."""


DEFAULT_BUDGET = 200_000
BUDGET_ENV_VAR = "SCHED_ALGEBRA_BUDGET"


# --------------------------------------------------------------------------
# activations and schedules


@dataclass(frozen=True)
class Activation:
    """A monotone sequence of events (sets of active control variables)."""

    events: tuple[frozenset[str], ...]

    def __post_init__(self):
        for earlier, later in zip(self.events, self.events[1:]):
            if not earlier <= later:
                raise ValueError("activation events must grow monotonically")

    def __len__(self) -> int:
        return len(self.events)

    def __str__(self) -> str:
        return format_activation(self)


#: A schedule: a finite set of activations.
Schedule = frozenset


EMPTY = Activation(())


def activation(*events) -> Activation:
    """Build an activation from iterables of variable names."""
    return Activation(tuple(frozenset(e) for e in events))


def format_activation(act: Activation) -> str:
    if not act.events:
        return "-"
    return " ".join("{" + ",".join(sorted(e)) + "}" for e in act.events)


def _activation_key(act: Activation):
    return (len(act.events), tuple(tuple(sorted(e)) for e in act.events))


def sort_activations(acts) -> list[Activation]:
    """Length-lexicographic order; used everywhere determinism matters."""
    return sorted(acts, key=_activation_key)


def shift(act: Activation, i: int) -> Activation:
    """Drop the first ``i`` events; empty when ``i`` reaches the length."""
    if i < 0:
        raise ValueError("shift index must be nonnegative")
    return Activation(act.events[i:])


def _select(act: Activation, indices) -> Activation:
    return Activation(tuple(act.events[i] for i in indices))


def subactivations(act: Activation) -> frozenset[Activation]:
    """All order-preserving index selections of ``act``."""
    n = len(act.events)
    out = set()
    for mask in product((False, True), repeat=n):
        out.add(_select(act, [i for i in range(n) if mask[i]]))
    return frozenset(out)


def covers2(act: Activation) -> frozenset[tuple[Activation, Activation]]:
    """All two-way interleaving decompositions of ``act``.

    Every index lands in the first component, the second, or both.
    """
    n = len(act.events)
    out = set()
    for assignment in product((0, 1, 2), repeat=n):
        first = [i for i in range(n) if assignment[i] != 1]
        second = [i for i in range(n) if assignment[i] != 0]
        out.add((_select(act, first), _select(act, second)))
    return frozenset(out)


# --------------------------------------------------------------------------
# satisfaction


def _iter_index_subsets(n: int):
    for mask in product((False, True), repeat=n):
        yield [i for i in range(n) if mask[i]]


@lru_cache(maxsize=None)
def _sat(act: Activation, bound: Bound, ty: TypeExpr) -> bool:
    if isinstance(ty, FalseT):
        return len(act.events) == 0
    if isinstance(ty, TrueT):
        return True
    if isinstance(ty, Atom):
        return all(ty.name in event for event in act.events)
    if isinstance(ty, And):
        return _sat(act, bound.left, ty.left) and _sat(act, bound.right, ty.right)
    if isinstance(ty, Or):
        if isinstance(bound, InL):
            return _sat(act, bound.value, ty.left)
        return _sat(act, bound.value, ty.right)
    if isinstance(ty, OPlus):
        return _sat(act, bound.left, ty.left) or _sat(act, bound.right, ty.right)
    if isinstance(ty, Implies):
        for indices in _iter_index_subsets(len(act.events)):
            sub = _select(act, indices)
            for key, value in bound.entries:
                if _sat(sub, key, ty.antecedent) and not _sat(sub, value, ty.consequent):
                    return False
        return True
    if isinstance(ty, Not):
        # !phi abbreviates phi -> false
        keys = enumerate_bounds(ty.operand)
        for indices in _iter_index_subsets(len(act.events)):
            if not indices:
                continue
            sub = _select(act, indices)
            if any(_sat(sub, key, ty.operand) for key in keys):
                return False
        return True
    if isinstance(ty, Delay):
        n = len(act.events)
        if n == 0:
            return True
        d = bound.delay
        if d == NEG_INF:
            return False
        hi = n if d == POS_INF else min(int(d), n)
        return any(_sat(shift(act, i), bound.inner, ty.operand) for i in range(hi + 1))
    if isinstance(ty, OTimes):
        n = len(act.events)
        seen = set()
        for assignment in product((0, 1, 2), repeat=n):
            first = tuple(i for i in range(n) if assignment[i] != 1)
            second = tuple(i for i in range(n) if assignment[i] != 0)
            if (first, second) in seen:
                continue
            seen.add((first, second))
            if _sat(_select(act, first), bound.left, ty.left) and _sat(
                _select(act, second), bound.right, ty.right
            ):
                return True
        return False
    if isinstance(ty, EmbedInterface):
        inner = ty.interface
        return _sat(act, inner.bound, inner.ty)
    raise TypeError(f"not a type expression: {ty!r}")


def satisfies(act: Activation, iface: Interface) -> bool:
    """Decide the satisfaction clause table on a single activation."""
    return _sat(act, iface.bound, iface.ty)


def satisfies_pure(act: Activation, ty: TypeExpr) -> bool:
    """Satisfaction of a pure type (bound omitted, it is canonical)."""
    return satisfies(act, pure_interface(ty))


def schedule_satisfies(sched: Schedule, iface: Interface) -> bool:
    """A schedule satisfies an interface when all members do.

    The bound is fixed once for the whole schedule; in particular the side
    of an external choice ``|`` is frozen by the bound while an internal
    choice ``(+)`` may still be resolved per activation.
    """
    return all(satisfies(act, iface) for act in sched)


# --------------------------------------------------------------------------
# universes


@dataclass(frozen=True)
class Universe:
    """Finitization parameters for the enumeration-based procedures."""

    vars: tuple[str, ...]
    max_len: int
    bound_grid: int = 2

    def __post_init__(self):
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")
        if self.bound_grid < 0:
            raise ValueError("bound_grid must be nonnegative")

    @property
    def grid(self) -> tuple[ExtNat, ...]:
        return (NEG_INF,) + tuple(range(self.bound_grid + 1)) + (POS_INF,)

    def describe(self) -> str:
        return f"vars={','.join(self.vars)} len={self.max_len} grid={self.bound_grid}"


def universe(names, max_len: int, bound_grid: int = 2) -> Universe:
    return Universe(tuple(names), max_len, bound_grid)


def _budget_limit(budget: int | None) -> int:
    if budget is not None:
        return budget
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise BudgetError(f"invalid {BUDGET_ENV_VAR} value: {raw!r}") from None


def universe_size(u: Universe) -> int:
    v = len(u.vars)
    return sum((n + 1) ** v for n in range(u.max_len + 1))


@lru_cache(maxsize=32)
def _enumerate_cached(u: Universe) -> tuple[Activation, ...]:
    names = tuple(sorted(u.vars))
    out = []
    for n in range(u.max_len + 1):
        # a monotone sequence assigns each variable the index where it
        # becomes active (n meaning: never within this activation)
        for thresholds in product(range(n + 1), repeat=len(names)):
            events = tuple(
                frozenset(v for v, t in zip(names, thresholds) if t <= i)
                for i in range(n)
            )
            out.append(Activation(events))
    return tuple(out)


def enumerate_activations(u: Universe, budget: int | None = None) -> tuple[Activation, ...]:
    """All monotone activations of the universe in length-lexicographic order."""
    size = universe_size(u)
    limit = _budget_limit(budget)
    if size > limit:
        raise BudgetError(
            f"universe has {size} activations, beyond the budget of {limit}"
        )
    return _enumerate_cached(u)


def enumerate_universe(u: Universe, budget: int | None = None) -> Schedule:
    return frozenset(enumerate_activations(u, budget))


def denotation(iface: Interface, u: Universe, budget: int | None = None) -> Schedule:
    """All activations of the universe satisfying the interface."""
    return frozenset(
        act for act in enumerate_activations(u, budget) if satisfies(act, iface)
    )


def refines_witness(i1: Interface, i2: Interface, u: Universe) -> Activation | None:
    """First activation (length-lex) satisfying ``i1`` but not ``i2``."""
    for act in enumerate_activations(u):
        if satisfies(act, i1) and not satisfies(act, i2):
            return act
    return None


def refines(i1: Interface, i2: Interface, u: Universe) -> bool:
    """Bounded-universe refinement: denotation inclusion within ``u``."""
    return refines_witness(i1, i2, u) is None


def equivalent(i1: Interface, i2: Interface, u: Universe) -> bool:
    return refines(i1, i2, u) and refines(i2, i1, u)


def types_equivalent(t1: TypeExpr, t2: TypeExpr, u: Universe) -> bool:
    """Type equivalence within ``u``: matching bounds exist in both directions.

    Requires both bound spaces to be finite.
    """
    bounds1 = enumerate_bounds(t1)
    bounds2 = enumerate_bounds(t2)
    dens1 = [denotation(Interface(b, t1), u) for b in bounds1]
    dens2 = [denotation(Interface(b, t2), u) for b in bounds2]
    return all(any(d1 == d2 for d2 in dens2) for d1 in dens1) and all(
        any(d2 == d1 for d1 in dens1) for d2 in dens2
    )


# --------------------------------------------------------------------------
# tightening


def _slots_of_bound(bound: Bound) -> tuple[ExtNat, ...]:
    if isinstance(bound, (InL, InR)):
        return _slots_of_bound(bound.value)
    if isinstance(bound, PairB):
        return _slots_of_bound(bound.left) + _slots_of_bound(bound.right)
    if isinstance(bound, DelayB):
        return (bound.delay,) + _slots_of_bound(bound.inner)
    if isinstance(bound, Table):
        out: tuple[ExtNat, ...] = ()
        for _, value in bound.entries:
            out += _slots_of_bound(value)
        return out
    return ()


def tighten(sched: Schedule, ty: TypeExpr, u: Universe) -> frozenset[Bound]:
    """Minimal satisfying bounds for ``ty`` over the universe grid.

    Returns the Pareto antichain of grid bounds (coordinatewise order on the
    delay entries) under which the schedule satisfies the type; a singleton
    marks a unique worst-case bound, the empty set means the schedule is not
    boundable within the grid.
    """
    if classify(ty) not in ("boolean", "pure", "elementary"):
        raise UnsupportedTypeError(
            f"tighten needs an elementary type, got {classify(ty)}"
        )
    satisfying = []
    for bound in iter_bounds_grid(ty, u.grid):
        iface = Interface(bound, ty)
        if schedule_satisfies(sched, iface):
            satisfying.append((bound, _slots_of_bound(bound)))
    minimal = []
    for bound, vec in satisfying:
        dominated = False
        for other, other_vec in satisfying:
            if other is bound:
                continue
            if all(a <= b for a, b in zip(other_vec, vec)) and other_vec != vec:
                dominated = True
                break
        if dominated:
            continue
        minimal.append((bound, vec))
    # several grid bounds can share a slot vector (e.g. distinct tables with
    # equal entries cannot, but keep deduplication for safety)
    seen = set()
    out = []
    for bound, vec in minimal:
        if bound not in seen:
            seen.add(bound)
            out.append(bound)
    return frozenset(out)


# --------------------------------------------------------------------------
# persistence and causality


def is_persistent(ty: TypeExpr, u: Universe) -> bool:
    """Whether satisfaction at an event survives to the remaining suffix.

    Event-level satisfaction is read as satisfaction by the one-event
    activation; precondition of the interleaving tensor laws.
    """
    if not is_pure(ty):
        raise UnsupportedTypeError(
            f"persistence is defined for pure types, got {classify(ty)}"
        )
    iface = pure_interface(ty)
    for act in enumerate_activations(u):
        for k in range(len(act.events)):
            if satisfies(Activation((act.events[k],)), iface) and not satisfies(
                shift(act, k), iface
            ):
                return False
    return True


def is_causal(sched: Schedule, var: str, d: ExtNat) -> bool:
    """Whether ``O var (+) !var`` holds with delay ``d`` over the schedule."""
    check_extnat(d)
    ty = OPlus(Delay(Atom(var)), Not(Atom(var)))
    iface = Interface(PairB(DelayB(d, UNIT), UNIT), ty)
    return schedule_satisfies(sched, iface)


# --------------------------------------------------------------------------
# the event-level Boolean reading


def event_satisfies(event: frozenset[str], ty: TypeExpr) -> bool:
    """Classical truth of a Boolean type on one event.

    Interleaving conjunction is classical disjunction here.  Implication
    antecedents must themselves be event-decidable.
    """
    if isinstance(ty, TrueT):
        return True
    if isinstance(ty, FalseT):
        return False
    if isinstance(ty, Atom):
        return ty.name in event
    if isinstance(ty, Not):
        return not event_satisfies(event, ty.operand)
    if isinstance(ty, And):
        return event_satisfies(event, ty.left) and event_satisfies(event, ty.right)
    if isinstance(ty, OTimes):
        return event_satisfies(event, ty.left) or event_satisfies(event, ty.right)
    if isinstance(ty, Implies):
        return (not event_satisfies(event, ty.antecedent)) or event_satisfies(
            event, ty.consequent
        )
    raise UnsupportedTypeError(
        f"{ty!r} has no classical event-level reading"
    )


def schedule_satisfies_eventwise(sched: Schedule, ty: TypeExpr) -> bool:
    """Independent evaluator for Boolean types: check every event of every
    member activation classically."""
    return all(
        event_satisfies(event, ty) for act in sched for event in act.events
    )


# --------------------------------------------------------------------------
# schedule files


def parse_activation_line(line: str) -> Activation:
    line = line.strip()
    if line == "-":
        return EMPTY
    events = []
    for token in line.split():
        if not (token.startswith("{") and token.endswith("}")):
            raise ValueError(f"bad event {token!r}: expected {{A,B}} syntax")
        inner = token[1:-1].strip()
        names = [part.strip() for part in inner.split(",") if part.strip()]
        events.append(frozenset(names))
    if not events:
        raise ValueError("empty line is not an activation; use '-'")
    return Activation(tuple(events))


def parse_schedule(text: str) -> Schedule:
    """One activation per line; '-' is the empty activation; '#' comments."""
    acts = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        acts.append(parse_activation_line(stripped))
    return frozenset(acts)


def load_schedule(path) -> Schedule:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_schedule(handle.read())
