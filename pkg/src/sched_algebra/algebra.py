"""The interface calculus.

Combinators for sequential composition, forking, joining and interleaving of
single-entry interfaces; normalization of pure types into Boolean sums;
classical simplification of Boolean types; IO normal-form interfaces with
max-plus timing matrices; and a law catalog whose entries are checked
against the activation semantics over a finite universe.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator

from .kernel import (
    NEG_INF,
    POS_INF,
    And,
    Atom,
    Delay,
    DelayB,
    EmbedInterface,
    ExtNat,
    FalseT,
    FALSE,
    Implies,
    InL as InLB,
    InR as InRB,
    Interface,
    Not,
    OPlus,
    OTimes,
    Or,
    PairB,
    SchedAlgebraError,
    Table,
    TrueT,
    TRUE,
    TypeExpr,
    UNIT,
    UnsupportedTypeError,
    arrow_interface,
    classify,
    delay_interface,
    disj,
    embed_interface,
    enumerate_bounds,
    ext_add,
    ext_max,
    ext_min,
    format_interface,
    format_type,
    is_boolean,
    is_pure,
    matrix_to_bound,
    osum,
    pure_bound,
    pure_interface,
)
from .semantics import (
    Activation,
    Universe,
    enumerate_activations,
    equivalent,
    event_satisfies,
    format_activation,
    is_persistent,
    refines_witness,
    satisfies,
    subactivations,
    types_equivalent,
)
from .tropical import MAX_PLUS, TropicalMatrix, kron, mat_mul, matrix


class AlgebraError(SchedAlgebraError):
    """Control mismatch or malformed operand in an algebra operation."""


# --------------------------------------------------------------------------
# single-entry combinators (worst-case arithmetic of the basic laws)


def _arrow_parts(iface: Interface) -> tuple[TypeExpr, ExtNat, TypeExpr]:
    ty = iface.ty
    if not (
        isinstance(ty, Implies)
        and isinstance(ty.consequent, Delay)
        and is_pure(ty.antecedent)
        and is_pure(ty.consequent.operand)
    ):
        raise AlgebraError(
            f"expected a single-entry interface [d] : zeta -> O xi, got {iface}"
        )
    entries = iface.bound.entries
    if len(entries) != 1:
        raise AlgebraError(
            f"expected a single-entry interface, antecedent of {iface} has "
            f"{len(entries)} bounds"
        )
    return ty.antecedent, entries[0][1].delay, ty.consequent.operand


def _delay_parts(iface: Interface) -> tuple[ExtNat, TypeExpr]:
    ty = iface.ty
    if not (isinstance(ty, Delay) and is_pure(ty.operand)):
        raise AlgebraError(f"expected an interface d : O zeta, got {iface}")
    return iface.bound.delay, ty.operand


def seq_compose(i1: Interface, i2: Interface) -> Interface:
    """Chain two offsets: costs add up along the composition."""
    ant1, d1, cons1 = _arrow_parts(i1)
    ant2, d2, cons2 = _arrow_parts(i2)
    if cons1 != ant2:
        raise AlgebraError(
            f"cannot compose: {format_type(cons1)} does not match {format_type(ant2)}"
        )
    return arrow_interface(ant1, ext_add(d1, d2), cons2)


def fork_and(i1: Interface, i2: Interface) -> Interface:
    """Conjunctive forking: both targets are active within the maximum."""
    ant1, d1, cons1 = _arrow_parts(i1)
    ant2, d2, cons2 = _arrow_parts(i2)
    if ant1 != ant2:
        raise AlgebraError("fork needs a shared source control")
    return arrow_interface(ant1, ext_max(d1, d2), And(cons1, cons2))


def fork_sum(i1: Interface, i2: Interface) -> Interface:
    """Disjunctive forking: reaching either target costs the minimum."""
    ant1, d1, cons1 = _arrow_parts(i1)
    ant2, d2, cons2 = _arrow_parts(i2)
    if ant1 != ant2:
        raise AlgebraError("fork needs a shared source control")
    return arrow_interface(ant1, ext_min(d1, d2), OPlus(cons1, cons2))


def join_sum(i1: Interface, i2: Interface) -> Interface:
    """Disjunctive join: an unknown entry point costs the maximum."""
    ant1, d1, cons1 = _arrow_parts(i1)
    ant2, d2, cons2 = _arrow_parts(i2)
    if cons1 != cons2:
        raise AlgebraError("join needs a shared target control")
    return arrow_interface(OPlus(ant1, ant2), ext_max(d1, d2), cons1)


def join_and(i1: Interface, i2: Interface) -> Interface:
    """Conjunctive join: both entries active, the cheaper one wins."""
    ant1, d1, cons1 = _arrow_parts(i1)
    ant2, d2, cons2 = _arrow_parts(i2)
    if cons1 != cons2:
        raise AlgebraError("join needs a shared target control")
    return arrow_interface(And(ant1, ant2), ext_min(d1, d2), cons1)


def tensor_interleave(i1: Interface, i2: Interface) -> Interface:
    """Interleave two delayed controls; sound for persistent controls."""
    d1, z1 = _delay_parts(i1)
    d2, z2 = _delay_parts(i2)
    return delay_interface(ext_add(d1, d2), OPlus(z1, z2))


def sync_operand(d: ExtNat, own: TypeExpr, other: TypeExpr) -> Interface:
    """Build ``d : O own  &  (own -> other)``, an operand of the sync tensor."""
    ty = And(Delay(own), Implies(own, other))
    bound = PairB(DelayB(d, pure_bound(own)), pure_bound(Implies(own, other)))
    return Interface(bound, ty)


def tensor_sync(i1: Interface, i2: Interface) -> Interface:
    """Interleave two synchronisation points into their conjunction."""
    d1, z1, w1 = _sync_parts(i1)
    d2, z2, w2 = _sync_parts(i2)
    if w1 != z2 or w2 != z1:
        raise AlgebraError("sync tensor needs mutually implied controls")
    return delay_interface(ext_add(d1, d2), And(z1, z2))


def _sync_parts(iface: Interface) -> tuple[ExtNat, TypeExpr, TypeExpr]:
    ty = iface.ty
    if not (
        isinstance(ty, And)
        and isinstance(ty.left, Delay)
        and isinstance(ty.right, Implies)
        and ty.left.operand == ty.right.antecedent
    ):
        raise AlgebraError(
            f"expected an operand d : O zeta & (zeta -> zeta'), got {iface}"
        )
    return iface.bound.left.delay, ty.left.operand, ty.right.consequent


# --------------------------------------------------------------------------
# normalization of pure types


def normalize_pure(ty: TypeExpr) -> list[TypeExpr]:
    """Represent a pure type as a sum of Boolean types.

    Conjunctions distribute over the internal choice; an implication is kept
    whole when its consequent normalizes to a single summand (then it is
    Boolean by the grammar).  Other implication shapes and embedded
    interfaces have no Boolean representation here and are rejected.
    """
    if not is_pure(ty):
        raise UnsupportedTypeError(f"normalize_pure needs a pure type, got {classify(ty)}")
    return list(_normalize(ty))


def _normalize(ty: TypeExpr) -> tuple[TypeExpr, ...]:
    if is_boolean(ty):
        return (ty,)
    if isinstance(ty, OPlus):
        return _normalize(ty.left) + _normalize(ty.right)
    if isinstance(ty, And):
        return tuple(
            And(a, b) for a in _normalize(ty.left) for b in _normalize(ty.right)
        )
    if isinstance(ty, OTimes):
        return tuple(
            OTimes(a, b) for a in _normalize(ty.left) for b in _normalize(ty.right)
        )
    if isinstance(ty, Implies):
        summands = _normalize(ty.consequent)
        if len(summands) == 1:
            return (Implies(ty.antecedent, summands[0]),)
        raise UnsupportedTypeError(
            "no normalization rule for an implication whose consequent is a "
            f"proper sum: {format_type(ty)}"
        )
    raise UnsupportedTypeError(f"no Boolean representation for {format_type(ty)}")


# --------------------------------------------------------------------------
# Boolean simplification


def _collect_atoms(ty: TypeExpr, out: set[str]) -> None:
    if isinstance(ty, Atom):
        out.add(ty.name)
    elif isinstance(ty, (TrueT, FalseT)):
        pass
    elif isinstance(ty, Not):
        _collect_atoms(ty.operand, out)
    elif isinstance(ty, (And, OTimes)):
        _collect_atoms(ty.left, out)
        _collect_atoms(ty.right, out)
    elif isinstance(ty, Implies):
        _collect_atoms(ty.antecedent, out)
        _collect_atoms(ty.consequent, out)
    else:
        raise UnsupportedTypeError(
            f"cannot truth-table {format_type(ty)}: not event-decidable"
        )


def _combine_patterns(a: tuple, b: tuple):
    diff = None
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            if x is None or y is None or diff is not None:
                return None
            diff = i
    if diff is None:
        return None
    return a[:diff] + (None,) + a[diff + 1:]


def _matches(pattern: tuple, minterm: tuple) -> bool:
    return all(p is None or p == m for p, m in zip(pattern, minterm))


def _prime_implicants(minterms: list[tuple]) -> list[tuple]:
    current = set(minterms)
    primes: set[tuple] = set()
    while current:
        combined = set()
        used = set()
        items = sorted(current, key=lambda p: tuple(-1 if x is None else x for x in p))
        for i, a in enumerate(items):
            for b in items[i + 1:]:
                merged = _combine_patterns(a, b)
                if merged is not None:
                    combined.add(merged)
                    used.add(a)
                    used.add(b)
        primes.update(p for p in items if p not in used)
        current = combined
    return sorted(primes, key=_pattern_key)


def _pattern_key(pattern: tuple):
    literals = sum(1 for x in pattern if x is not None)
    return (literals, tuple((i, x) for i, x in enumerate(pattern) if x is not None))


def simplify_boolean(ty: TypeExpr) -> TypeExpr:
    """Classical canonical form of a Boolean type over its atoms.

    Truth-tables the type eventwise, then renders a minimal prime-implicant
    cover with ``(x)`` as disjunction (or the constants).
    """
    if not is_boolean(ty):
        raise UnsupportedTypeError(
            f"simplify_boolean needs a Boolean type, got {classify(ty)}"
        )
    names: set[str] = set()
    _collect_atoms(ty, names)
    atoms = sorted(names)
    minterms = []
    total = 0
    for values in product((0, 1), repeat=len(atoms)):
        event = frozenset(a for a, v in zip(atoms, values) if v)
        total += 1
        if event_satisfies(event, ty):
            minterms.append(values)
    if len(minterms) == total:
        return TRUE
    if not minterms:
        return FALSE
    primes = _prime_implicants(minterms)
    cover = _select_cover(primes, minterms)
    summands = [_render_implicant(pattern, atoms) for pattern in cover]
    result = summands[-1]
    for part in reversed(summands[:-1]):
        result = OTimes(part, result)
    return result


def _select_cover(primes: list[tuple], minterms: list[tuple]) -> list[tuple]:
    remaining = set(minterms)
    chosen: list[tuple] = []
    # essential primes first
    for minterm in minterms:
        covering = [p for p in primes if _matches(p, minterm)]
        if len(covering) == 1 and covering[0] not in chosen:
            chosen.append(covering[0])
    for p in chosen:
        remaining -= {m for m in remaining if _matches(p, m)}
    # then a greedy cover; primes are already in deterministic order, the
    # first one with maximal coverage wins
    while remaining:
        best = None
        best_cover = 0
        for p in primes:
            cover = sum(1 for m in remaining if _matches(p, m))
            if cover > best_cover:
                best, best_cover = p, cover
        chosen.append(best)
        remaining -= {m for m in remaining if _matches(best, m)}
    return sorted(set(chosen), key=_pattern_key)


def _render_implicant(pattern: tuple, atoms: list[str]) -> TypeExpr:
    literals = []
    for name, value in zip(atoms, pattern):
        if value is None:
            continue
        literals.append(Atom(name) if value else Not(Atom(name)))
    if not literals:
        return TRUE
    result = literals[-1]
    for lit in reversed(literals[:-1]):
        result = And(lit, result)
    return result


# --------------------------------------------------------------------------
# IO normal-form interfaces


@dataclass(frozen=True)
class IOInterface:
    """Normal form ``T : (input_1 | ... | input_m) -> O out_1 (+) ... (+) O out_n``.

    The timing matrix is max-plus with one row per output control and one
    column per input control.
    """

    inputs: tuple[TypeExpr, ...]
    outputs: tuple[TypeExpr, ...]
    matrix: TropicalMatrix

    def __post_init__(self):
        if self.matrix.semiring != MAX_PLUS:
            raise AlgebraError("IO interfaces carry max-plus matrices")
        if self.matrix.rows != len(self.outputs) or self.matrix.cols != len(self.inputs):
            raise AlgebraError(
                f"matrix is {self.matrix.rows}x{self.matrix.cols} but there are "
                f"{len(self.outputs)} outputs and {len(self.inputs)} inputs"
            )
        for control in self.inputs + self.outputs:
            if not is_pure(control):
                raise AlgebraError(f"control {format_type(control)} is not pure")

    def to_interface(self) -> Interface:
        ty = Implies(disj(*self.inputs), osum(*(Delay(o) for o in self.outputs)))
        if not self.outputs:
            return pure_interface(ty)
        if not self.inputs:
            keys = enumerate_bounds(FALSE)
            column = _column_bound(self.outputs, (NEG_INF,) * len(self.outputs))
            return Interface(Table(tuple((k, column) for k in keys)), ty)
        return Interface(
            matrix_to_bound(ty, self.matrix.to_rows()), ty
        )

    def __str__(self) -> str:
        ins = " | ".join(format_type(c) for c in self.inputs) or "false"
        outs = " (+) ".join(f"O {format_type(c)}" for c in self.outputs) or "false"
        return f"{self.matrix} : {ins} -> {outs}"


def _column_bound(outputs: tuple[TypeExpr, ...], values: tuple[ExtNat, ...]):
    bounds = [DelayB(v, pure_bound(o)) for o, v in zip(outputs, values)]
    result = bounds[-1]
    for b in reversed(bounds[:-1]):
        result = PairB(b, result)
    return result


def io_interface(inputs, outputs, rows) -> IOInterface:
    return IOInterface(tuple(inputs), tuple(outputs), matrix(rows, MAX_PLUS))


@dataclass(frozen=True)
class Obligation:
    """A recorded, not enforced, equivalence side condition."""

    lhs: TypeExpr
    rhs: TypeExpr

    def discharge(self, u: Universe) -> bool:
        return types_equivalent(self.lhs, self.rhs, u)

    def __str__(self) -> str:
        return f"{format_type(self.lhs)} == {format_type(self.rhs)}"


def _controls_match(a: TypeExpr, b: TypeExpr) -> bool:
    if a == b:
        return True
    if is_boolean(a) and is_boolean(b):
        try:
            return simplify_boolean(a) == simplify_boolean(b)
        except UnsupportedTypeError:
            return False
    return False


def io_compose(a: IOInterface, b: IOInterface) -> IOInterface:
    """Feed ``a`` into ``b``; the matrices compose in max-plus."""
    if len(a.outputs) != len(b.inputs) or not all(
        _controls_match(x, y) for x, y in zip(a.outputs, b.inputs)
    ):
        raise AlgebraError(
            "cannot compose: outputs "
            f"[{', '.join(map(format_type, a.outputs))}] do not match inputs "
            f"[{', '.join(map(format_type, b.inputs))}]"
        )
    return IOInterface(a.inputs, b.outputs, mat_mul(b.matrix, a.matrix))


def io_kron(a: IOInterface, b: IOInterface) -> IOInterface:
    """All interleavings of two components: controls conjoin pairwise."""
    inputs = tuple(And(x, y) for x in a.inputs for y in b.inputs)
    outputs = tuple(And(x, y) for x in a.outputs for y in b.outputs)
    return IOInterface(inputs, outputs, kron(a.matrix, b.matrix))


def io_project(a: IOInterface, keep_inputs, keep_outputs) -> IOInterface:
    keep_inputs = tuple(keep_inputs)
    keep_outputs = tuple(keep_outputs)
    for j in keep_inputs:
        if not 0 <= j < len(a.inputs):
            raise AlgebraError(f"input index {j} out of range")
    for i in keep_outputs:
        if not 0 <= i < len(a.outputs):
            raise AlgebraError(f"output index {i} out of range")
    rows = [[a.matrix[i, j] for j in keep_inputs] for i in keep_outputs]
    return IOInterface(
        tuple(a.inputs[j] for j in keep_inputs),
        tuple(a.outputs[i] for i in keep_outputs),
        matrix(rows, MAX_PLUS) if keep_outputs else
        TropicalMatrix(0, len(keep_inputs), (), MAX_PLUS),
    )


def io_bundle(
    a: IOInterface, input_group, new_control: TypeExpr
) -> tuple[IOInterface, Obligation]:
    """Merge input columns into one control by entrywise maximum.

    Soundness requires the internal choice over the old controls to be
    equivalent to the new control; that condition is returned as an
    obligation, not checked.
    """
    group = tuple(input_group)
    if not group:
        raise AlgebraError("empty bundle group")
    for j in group:
        if not 0 <= j < len(a.inputs):
            raise AlgebraError(f"input index {j} out of range")
    if not is_pure(new_control):
        raise AlgebraError("bundled control must be pure")
    anchor = min(group)
    merged = [max(a.matrix[i, j] for j in group) for i in range(len(a.outputs))]
    inputs = []
    rows: list[list[ExtNat]] = [[] for _ in a.outputs]
    for j in range(len(a.inputs)):
        if j in group and j != anchor:
            continue
        if j == anchor:
            inputs.append(new_control)
            for i in range(len(a.outputs)):
                rows[i].append(merged[i])
        else:
            inputs.append(a.inputs[j])
            for i in range(len(a.outputs)):
                rows[i].append(a.matrix[i, j])
    obligation = Obligation(osum(*(a.inputs[j] for j in group)), new_control)
    return IOInterface(tuple(inputs), a.outputs, matrix(rows, MAX_PLUS)), obligation


def io_split(
    a: IOInterface, input_index: int, cases, new_columns: TropicalMatrix
) -> IOInterface:
    """Refine one input control into per-case controls with finer columns."""
    if not 0 <= input_index < len(a.inputs):
        raise AlgebraError(f"input index {input_index} out of range")
    cases = tuple(cases)
    if new_columns.semiring != MAX_PLUS:
        raise AlgebraError("split columns must be max-plus")
    if new_columns.rows != len(a.outputs) or new_columns.cols != len(cases):
        raise AlgebraError(
            f"split columns must be {len(a.outputs)}x{len(cases)}, got "
            f"{new_columns.rows}x{new_columns.cols}"
        )
    old = a.inputs[input_index]
    inputs = (
        a.inputs[:input_index]
        + tuple(And(old, case) for case in cases)
        + a.inputs[input_index + 1:]
    )
    rows = []
    for i in range(len(a.outputs)):
        row = list(a.matrix.row(i))
        rows.append(
            row[:input_index] + list(new_columns.row(i)) + row[input_index + 1:]
        )
    return IOInterface(inputs, a.outputs, matrix(rows, MAX_PLUS))


def io_adapt(
    a: IOInterface, new_inputs=None, new_outputs=None
) -> tuple[IOInterface, tuple[Obligation, ...]]:
    """Relabel controls one for one, recording equivalence obligations."""
    new_inputs = a.inputs if new_inputs is None else tuple(new_inputs)
    new_outputs = a.outputs if new_outputs is None else tuple(new_outputs)
    if len(new_inputs) != len(a.inputs) or len(new_outputs) != len(a.outputs):
        raise AlgebraError("adapt must keep the number of controls")
    obligations = tuple(
        Obligation(old, new)
        for old, new in list(zip(a.inputs, new_inputs)) + list(zip(a.outputs, new_outputs))
        if old != new
    )
    return IOInterface(new_inputs, new_outputs, a.matrix), obligations


# --------------------------------------------------------------------------
# law catalog


@dataclass(frozen=True)
class LawReport:
    law_id: str
    title: str
    expected_valid: bool
    instances: int
    failures: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.failures

    @property
    def ok(self) -> bool:
        """Whether the outcome matches the catalog expectation."""
        return self.valid == self.expected_valid

    @property
    def counterexamples(self) -> tuple[str, ...]:
        return self.failures


@dataclass(frozen=True)
class _Law:
    law_id: str
    title: str
    expected_valid: bool
    runner: Callable[[Universe], tuple[int, list[str]]]


_A = Atom("A")
_B = Atom("B")
_C = Atom("C")

#: operand pools for instantiating law schemas (depth <= 3, three atoms)
PURE_POOL: tuple[TypeExpr, ...] = (
    TRUE,
    FALSE,
    _A,
    Not(_A),
    And(_A, _B),
    OTimes(_B, _C),
    OPlus(_A, Not(_A)),
    embed_interface(delay_interface(1, _B)),
)
PURE_SMALL: tuple[TypeExpr, ...] = (TRUE, _A, Not(_B), And(_A, _C))
BOOL_POOL: tuple[TypeExpr, ...] = (
    TRUE,
    FALSE,
    _A,
    Not(_B),
    And(_A, _B),
    OTimes(_A, _C),
    Implies(_B, _A),
)
CONTROL_POOL: tuple[TypeExpr, ...] = (_A, _B, And(_A, _C))
DELAY_PAIRS: tuple[tuple[ExtNat, ExtNat], ...] = (
    (0, 1),
    (2, 0),
    (NEG_INF, 2),
    (1, POS_INF),
    (POS_INF, POS_INF),
)


def _conj_interfaces(*ifaces: Interface) -> Interface:
    """Conjunction of interfaces via their pure embeddings."""
    ty = embed_interface(ifaces[-1])
    for iface in reversed(ifaces[:-1]):
        ty = And(embed_interface(iface), ty)
    return pure_interface(ty)


def _check_refines(
    lhs: Interface, rhs: Interface, u: Universe, description: str, failures: list[str]
) -> None:
    witness = refines_witness(lhs, rhs, u)
    if witness is not None:
        failures.append(f"{description}; activation {format_activation(witness)}")


def _check_equivalent(
    lhs: Interface, rhs: Interface, u: Universe, description: str, failures: list[str]
) -> None:
    witness = refines_witness(lhs, rhs, u)
    if witness is None:
        witness = refines_witness(rhs, lhs, u)
    if witness is not None:
        failures.append(f"{description}; activation {format_activation(witness)}")


def _pure_equiv_runner(
    template: Callable[..., tuple[TypeExpr, TypeExpr]], pools
) -> Callable[[Universe], tuple[int, list[str]]]:
    def run(u: Universe) -> tuple[int, list[str]]:
        count = 0
        failures: list[str] = []
        for operands in product(*pools):
            lhs, rhs = template(*operands)
            count += 1
            _check_equivalent(
                pure_interface(lhs),
                pure_interface(rhs),
                u,
                f"{format_type(lhs)} =/= {format_type(rhs)}",
                failures,
            )
        return count, failures

    return run


def _types_equiv_runner(
    template: Callable[..., tuple[TypeExpr, TypeExpr]], pools
) -> Callable[[Universe], tuple[int, list[str]]]:
    def run(u: Universe) -> tuple[int, list[str]]:
        count = 0
        failures: list[str] = []
        for operands in product(*pools):
            lhs, rhs = template(*operands)
            count += 1
            if not types_equivalent(lhs, rhs, u):
                failures.append(f"{format_type(lhs)} =/= {format_type(rhs)}")
        return count, failures

    return run


def _run_prop1(u: Universe) -> tuple[int, list[str]]:
    pool = (
        pure_interface(_A),
        delay_interface(1, _B),
        arrow_interface(_A, 1, _B),
        pure_interface(OPlus(_A, Not(_A))),
        pure_interface(Not(_C)),
    )
    count = 0
    failures: list[str] = []
    empty = Activation(())
    for iface in pool:
        count += 1
        if not satisfies(empty, iface):
            failures.append(f"empty activation fails {iface}")
        for act in enumerate_activations(u):
            if not satisfies(act, iface):
                continue
            for sub in subactivations(act):
                if not satisfies(sub, iface):
                    failures.append(
                        f"{iface} not inherited by {format_activation(sub)} "
                        f"of {format_activation(act)}"
                    )
    return count, failures


def _run_prop2(u: Universe) -> tuple[int, list[str]]:
    count = 0
    failures: list[str] = []
    for ty in PURE_POOL:
        count += 1
        _check_equivalent(
            delay_interface(NEG_INF, ty),
            pure_interface(FALSE),
            u,
            f"-inf : O {format_type(ty)} =/= false",
            failures,
        )
        _check_equivalent(
            delay_interface(POS_INF, ty),
            pure_interface(TRUE),
            u,
            f"+inf : O {format_type(ty)} =/= true",
            failures,
        )
    return count, failures


def _ineq_runner(build) -> Callable[[Universe], tuple[int, list[str]]]:
    def run(u: Universe) -> tuple[int, list[str]]:
        count = 0
        failures: list[str] = []
        for z1, z2, z3 in product(CONTROL_POOL, repeat=3):
            for d1, d2 in DELAY_PAIRS:
                lhs, rhs = build(z1, z2, z3, d1, d2)
                if lhs is None:
                    continue
                count += 1
                _check_refines(lhs, rhs, u, f"{lhs} =/=> {rhs}", failures)
        return count, failures

    return run


def _build_ineq1(z1, z2, z3, d1, d2):
    i1 = arrow_interface(z1, d1, z2)
    i2 = arrow_interface(z2, d2, z3)
    return _conj_interfaces(i1, i2), seq_compose(i1, i2)


def _build_ineq2(z1, z2, z3, d1, d2):
    i1 = arrow_interface(z1, d1, z2)
    i2 = arrow_interface(z1, d2, z3)
    return _conj_interfaces(i1, i2), fork_and(i1, i2)


def _build_ineq3(z1, z2, z3, d1, d2):
    i1 = arrow_interface(z1, d1, z2)
    i2 = arrow_interface(z1, d2, z3)
    return _conj_interfaces(i1, i2), fork_sum(i1, i2)


def _build_ineq4(z1, z2, z3, d1, d2):
    i1 = arrow_interface(z1, d1, z3)
    i2 = arrow_interface(z2, d2, z3)
    return _conj_interfaces(i1, i2), join_sum(i1, i2)


def _build_ineq5(z1, z2, z3, d1, d2):
    i1 = arrow_interface(z1, d1, z3)
    i2 = arrow_interface(z2, d2, z3)
    return _conj_interfaces(i1, i2), join_and(i1, i2)


def _tensor_pool(u: Universe) -> list[TypeExpr]:
    pool = (TRUE, _A, _B, And(_A, _B), OPlus(_A, _B), Not(_A))
    return [ty for ty in pool if is_persistent(ty, u)]


def _run_tensor6(u: Universe) -> tuple[int, list[str]]:
    count = 0
    failures: list[str] = []
    controls = _tensor_pool(u)
    for z1, z2 in product(controls, repeat=2):
        for d1, d2 in DELAY_PAIRS:
            i1 = delay_interface(d1, z1)
            i2 = delay_interface(d2, z2)
            lhs = Interface(
                PairB(i1.bound, i2.bound), OTimes(i1.ty, i2.ty)
            )
            rhs = tensor_interleave(i1, i2)
            count += 1
            _check_refines(lhs, rhs, u, f"{lhs} =/=> {rhs}", failures)
    return count, failures


def _run_tensor7(u: Universe) -> tuple[int, list[str]]:
    count = 0
    failures: list[str] = []
    controls = _tensor_pool(u)
    for z1, z2 in product(controls, repeat=2):
        for d1, d2 in DELAY_PAIRS:
            i1 = sync_operand(d1, z1, z2)
            i2 = sync_operand(d2, z2, z1)
            lhs = Interface(PairB(i1.bound, i2.bound), OTimes(i1.ty, i2.ty))
            rhs = tensor_sync(i1, i2)
            count += 1
            _check_refines(lhs, rhs, u, f"{lhs} =/=> {rhs}", failures)
    return count, failures


def _run_flow_meet(u: Universe) -> tuple[int, list[str]]:
    count = 0
    failures: list[str] = []
    for d, e in product(u.grid, repeat=2):
        lhs = _conj_interfaces(delay_interface(d, FALSE), delay_interface(e, FALSE))
        rhs = delay_interface(ext_min(d, e), FALSE)
        count += 1
        _check_equivalent(lhs, rhs, u, f"{lhs} =/= {rhs}", failures)
    return count, failures


def _run_flow_tensor(u: Universe) -> tuple[int, list[str]]:
    count = 0
    failures: list[str] = []
    for d, e in product(u.grid, repeat=2):
        i1 = delay_interface(d, FALSE)
        i2 = delay_interface(e, FALSE)
        lhs = Interface(PairB(i1.bound, i2.bound), OTimes(i1.ty, i2.ty))
        rhs = delay_interface(ext_add(d, e), FALSE)
        count += 1
        _check_equivalent(lhs, rhs, u, f"{lhs} =/= {rhs}", failures)
    return count, failures


def _run_dominant_true_or(u: Universe) -> tuple[int, list[str]]:
    # true | phi with the left injection is equivalent to true, and any other
    # bound still refines true; the injection is the bound witnessing the
    # dominance law.
    count = 0
    failures: list[str] = []
    for p in PURE_POOL:
        ty = Or(TRUE, p)
        count += 1
        _check_equivalent(
            Interface(InLB(UNIT), ty),
            pure_interface(TRUE),
            u,
            f"inl 0 : true | {format_type(p)} =/= true",
            failures,
        )
        _check_refines(
            Interface(InRB(pure_bound(p)), ty),
            pure_interface(TRUE),
            u,
            f"inr bound of true | {format_type(p)} above true",
            failures,
        )
    return count, failures


def _run_neg_stability(u: Universe) -> tuple[int, list[str]]:
    iface = pure_interface(OPlus(_A, Not(_A)))
    for act in enumerate_activations(u):
        if not satisfies(act, iface):
            return 1, [f"A (+) !A fails on {format_activation(act)}"]
    return 1, []


def _run_neg_static(u: Universe) -> tuple[int, list[str]]:
    ty = Or(_A, Not(_A))
    witnesses = []
    for bound, side in ((InLB(UNIT), "A"), (InRB(UNIT), "!A")):
        iface = Interface(bound, ty)
        for act in enumerate_activations(u):
            if not satisfies(act, iface):
                witnesses.append(f"side {side} fails on {format_activation(act)}")
                break
        else:
            return 1, []
    return 1, witnesses


def _run_neg_and_over_otimes(u: Universe) -> tuple[int, list[str]]:
    x = embed_interface(delay_interface(1, _B))
    lhs = pure_interface(OTimes(And(x, TRUE), And(x, TRUE)))
    rhs = pure_interface(And(x, OTimes(TRUE, TRUE)))
    witness = refines_witness(lhs, rhs, u)
    if witness is None:
        return 1, []
    return 1, [
        "(X & phi1) (x) (X & phi2) =/=> X & (phi1 (x) phi2) for X = <1 : O B>; "
        f"activation {format_activation(witness)}"
    ]


def _run_neg_min_plus_strict(u: Universe) -> tuple[int, list[str]]:
    e, d1, d2 = 3, 2, 2
    lhs = ext_min(e, ext_add(d1, d2))
    rhs = ext_add(ext_min(e, d1), ext_min(e, d2))
    if lhs < rhs:
        return 1, [f"min({e}, {d1}+{d2}) = {lhs} < {rhs} = min({e},{d1}) + min({e},{d2})"]
    return 1, []


def _make_laws() -> dict[str, _Law]:
    laws: list[_Law] = []

    def law(law_id, title, runner, expected_valid=True):
        laws.append(_Law(law_id, title, expected_valid, runner))

    law("prop1", "interfaces are inherited by sub-activations", _run_prop1)
    law("prop2", "-inf : O phi is false; +inf : O phi is true", _run_prop2)

    heyting = [
        ("identity", "psi -> psi == true",
         lambda p: (Implies(p, p), TRUE), 1),
        ("weakening", "phi1 -> (phi2 -> phi1) == true",
         lambda p, q: (Implies(p, Implies(q, p)), TRUE), 2),
        ("curry", "(phi1 & phi2) -> psi == phi1 -> (phi2 -> psi)",
         lambda p, q, r: (Implies(And(p, q), r), Implies(p, Implies(q, r))), 3),
        ("modus_ponens", "(phi1 -> phi2) & phi1 == phi1 & phi2",
         lambda p, q: (And(Implies(p, q), p), And(p, q)), 2),
        ("or_antecedent", "(phi1 | phi2) -> psi == (phi1 -> psi) & (phi2 -> psi)",
         lambda p, q, r: (Implies(Or(p, q), r), And(Implies(p, r), Implies(q, r))), 3),
        ("and_consequent", "psi -> (phi1 & phi2) == (psi -> phi1) & (psi -> phi2)",
         lambda p, q, r: (Implies(r, And(p, q)), And(Implies(r, p), Implies(r, q))), 3),
        ("ex_falso", "false -> psi == true",
         lambda p: (Implies(FALSE, p), TRUE), 1),
        ("to_true", "psi -> true == true",
         lambda p: (Implies(p, TRUE), TRUE), 1),
        ("neg_def", "psi -> false == !psi",
         lambda p: (Implies(p, FALSE), Not(p)), 1),
        ("from_true", "true -> psi == psi",
         lambda p: (Implies(TRUE, p), p), 1),
    ]
    for name, title, template, arity in heyting:
        pools = [PURE_POOL if arity == 1 else PURE_SMALL] * arity
        law(f"heyting.{name}", title, _pure_equiv_runner(template, pools))

    booleans = [
        ("double_negation", "!!beta == beta", lambda b: (Not(Not(b)), b), 1),
        ("excluded_middle", "!beta (x) beta == true",
         lambda b: (OTimes(Not(b), b), TRUE), 1),
        ("de_morgan_and", "!(b1 & b2) == !b1 (x) !b2",
         lambda b1, b2: (Not(And(b1, b2)), OTimes(Not(b1), Not(b2))), 2),
        ("de_morgan_otimes", "!(b1 (x) b2) == !b1 & !b2",
         lambda b1, b2: (Not(OTimes(b1, b2)), And(Not(b1), Not(b2))), 2),
    ]
    for name, title, template, arity in booleans:
        pools = [BOOL_POOL] * arity
        law(f"boolean.{name}", title, _pure_equiv_runner(template, pools))

    law("const.not_true", "!true == false",
        _pure_equiv_runner(lambda: (Not(TRUE), FALSE), []))
    law("const.not_false", "!false == true",
        _pure_equiv_runner(lambda: (Not(FALSE), TRUE), []))

    neutral = [
        ("neutral.false_otimes", "false (x) phi == phi",
         lambda p: (OTimes(FALSE, p), p)),
        ("neutral.false_oplus", "false (+) phi == phi",
         lambda p: (OPlus(FALSE, p), p)),
        ("neutral.true_and", "true & phi == phi",
         lambda p: (And(TRUE, p), p)),
        ("dominant.false_and", "false & phi == false",
         lambda p: (And(FALSE, p), FALSE)),
        ("dominant.true_oplus", "true (+) phi == true",
         lambda p: (OPlus(TRUE, p), TRUE)),
        ("dominant.true_otimes", "true (x) phi == true",
         lambda p: (OTimes(TRUE, p), TRUE)),
    ]
    for law_id, title, template in neutral:
        law(law_id, title, _pure_equiv_runner(template, [PURE_POOL]))
    law(
        "dominant.true_or",
        "true | phi == true (on the witnessing side)",
        _run_dominant_true_or,
    )

    distrib = [
        ("distrib.otimes_oplus", "phi (x) (p1 (+) p2) == (phi (x) p1) (+) (phi (x) p2)",
         lambda p, q, r: (OTimes(p, OPlus(q, r)), OPlus(OTimes(p, q), OTimes(p, r)))),
        ("distrib.and_oplus", "phi & (p1 (+) p2) == (phi & p1) (+) (phi & p2)",
         lambda p, q, r: (And(p, OPlus(q, r)), OPlus(And(p, q), And(p, r)))),
        ("distrib.oplus_and", "phi (+) (p1 & p2) == (phi (+) p1) & (phi (+) p2)",
         lambda p, q, r: (OPlus(p, And(q, r)), And(OPlus(p, q), OPlus(p, r)))),
    ]
    for law_id, title, template in distrib:
        law(law_id, title, _pure_equiv_runner(template, [PURE_SMALL] * 3))
    distrib_or = [
        ("distrib.otimes_or", "phi (x) (p1 | p2) == (phi (x) p1) | (phi (x) p2)",
         lambda p, q, r: (OTimes(p, Or(q, r)), Or(OTimes(p, q), OTimes(p, r)))),
        ("distrib.and_or", "phi & (p1 | p2) == (phi & p1) | (phi & p2)",
         lambda p, q, r: (And(p, Or(q, r)), Or(And(p, q), And(p, r)))),
        ("distrib.or_and", "phi | (p1 & p2) == (phi | p1) & (phi | p2)",
         lambda p, q, r: (Or(p, And(q, r)), And(Or(p, q), Or(p, r)))),
    ]
    for law_id, title, template in distrib_or:
        law(law_id, title, _types_equiv_runner(template, [PURE_SMALL] * 3))
    law(
        "distrib.atom_and_otimes",
        "X & (p1 (x) p2) == (X & p1) (x) (X & p2) for atoms X",
        _pure_equiv_runner(
            lambda x, p, q: (And(x, OTimes(p, q)), OTimes(And(x, p), And(x, q))),
            [(_A, _B, _C), PURE_SMALL, PURE_SMALL],
        ),
    )

    law("ineq.1", "sequential composition adds costs", _ineq_runner(_build_ineq1))
    law("ineq.2", "conjunctive fork takes the maximum", _ineq_runner(_build_ineq2))
    law("ineq.3", "disjunctive fork takes the minimum", _ineq_runner(_build_ineq3))
    law("ineq.4", "disjunctive join takes the maximum", _ineq_runner(_build_ineq4))
    law("ineq.5", "conjunctive join takes the minimum", _ineq_runner(_build_ineq5))
    law("tensor.6", "interleaving adds costs into an internal choice", _run_tensor6)
    law("tensor.7", "synchronised interleaving adds costs into a conjunction",
        _run_tensor7)

    law("flowlaws.meet", "d : O false & e : O false == min(d,e) : O false",
        _run_flow_meet)
    law("flowlaws.tensor", "d : O false (x) e : O false == d+e : O false",
        _run_flow_tensor)

    law("neg.stability", "A (+) !A is not valid", _run_neg_stability,
        expected_valid=False)
    law("neg.static", "A | !A is not valid", _run_neg_static, expected_valid=False)
    law("neg.and_over_otimes",
        "& does not distribute over (x) for non-atomic controls",
        _run_neg_and_over_otimes, expected_valid=False)
    law("neg.min_plus_strict",
        "min(e, d1+d2) < min(e,d1) + min(e,d2) at e=3, d1=d2=2",
        _run_neg_min_plus_strict, expected_valid=False)

    return {entry.law_id: entry for entry in laws}


_LAWS = _make_laws()


def law_ids() -> tuple[str, ...]:
    return tuple(_LAWS)


def law_check(law_id: str, u: Universe) -> LawReport:
    """Check one catalog law over the universe; reports counterexamples."""
    if law_id not in _LAWS:
        raise AlgebraError(f"unknown law {law_id!r}; known: {', '.join(_LAWS)}")
    entry = _LAWS[law_id]
    instances, failures = entry.runner(u)
    return LawReport(
        law_id=entry.law_id,
        title=entry.title,
        expected_valid=entry.expected_valid,
        instances=instances,
        failures=tuple(failures[:5]),
    )


def expand_law_ids(patterns) -> list[str]:
    """Resolve ids and ``prefix.*`` patterns against the catalog."""
    if not patterns:
        return list(_LAWS)
    out: list[str] = []
    for pattern in patterns:
        if pattern == "all":
            out.extend(law for law in _LAWS if law not in out)
        elif pattern.endswith(".*"):
            prefix = pattern[:-1]
            matches = [law for law in _LAWS if law.startswith(prefix)]
            if not matches:
                raise AlgebraError(f"no laws match {pattern!r}")
            out.extend(law for law in matches if law not in out)
        else:
            if pattern not in _LAWS:
                raise AlgebraError(f"unknown law {pattern!r}")
            if pattern not in out:
                out.append(pattern)
    return out
