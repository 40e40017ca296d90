"""Scheduling types, bound spaces and the textual syntax.

A scheduling type is a formula over control variables built from two
conjunctions (``&`` concurrent, ``(x)`` interleaving), two disjunctions
(``|`` external choice, ``(+)`` internal choice), implication (``->``),
pseudo-complement (``!``) and the resource shift (``O``).  Every type has a
space of scheduling bounds; an :class:`Interface` pairs a type with one bound
from that space.  Interfaces may be embedded back into types as generalised
control variables (``<bound : type>``).

Bound spaces are represented structurally (:class:`Bound`), with a matrix
encoding for the elementary types whose bound space is isomorphic to a
Cartesian power of extended naturals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, Union


# --------------------------------------------------------------------------
# errors


class SchedAlgebraError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SchedAlgebraError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text[pos:pos + 16]!r}")
        self.text = text
        self.pos = pos


class ShapeError(SchedAlgebraError):
    """A bound does not match the structure of its type."""


class UnsupportedTypeError(SchedAlgebraError):
    """The operation is undefined for this type.

    Raised in particular for implications whose antecedent has an infinite
    bound space: those bounds have no finite table representation.
    """


# --------------------------------------------------------------------------
# extended naturals

NEG_INF: float = float("-inf")
POS_INF: float = float("inf")

#: A natural number, or one of the two infinities (represented as floats).
ExtNat = Union[int, float]


def check_extnat(value: ExtNat) -> ExtNat:
    if value == NEG_INF or value == POS_INF:
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"not an extended natural: {value!r}")
    if value < 0:
        raise ValueError(f"negative finite value is not an extended natural: {value!r}")
    return value


def ext_add(a: ExtNat, b: ExtNat) -> ExtNat:
    """Add two extended naturals; -inf absorbs everything, including +inf."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    if a == POS_INF or b == POS_INF:
        return POS_INF
    return a + b


def ext_min(a: ExtNat, b: ExtNat) -> ExtNat:
    return a if a <= b else b


def ext_max(a: ExtNat, b: ExtNat) -> ExtNat:
    return a if a >= b else b


def format_extnat(value: ExtNat) -> str:
    if value == NEG_INF:
        return "-inf"
    if value == POS_INF:
        return "+inf"
    return str(int(value))


# --------------------------------------------------------------------------
# type expressions
#
# VarId is a plain string: nonempty, letters/digits/underscore/dot, where the
# dot is used by convention for state modifiers such as in.v9 / out.v9.

VARID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


class TypeExpr:
    """Base class of the type AST.  All nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_type(self)


@dataclass(frozen=True)
class Atom(TypeExpr):
    name: str

    def __post_init__(self):
        if not VARID_RE.match(self.name):
            raise ValueError(f"invalid control variable name: {self.name!r}")


@dataclass(frozen=True)
class TrueT(TypeExpr):
    pass


@dataclass(frozen=True)
class FalseT(TypeExpr):
    pass


@dataclass(frozen=True)
class Not(TypeExpr):
    operand: TypeExpr


@dataclass(frozen=True)
class Delay(TypeExpr):
    operand: TypeExpr


@dataclass(frozen=True)
class And(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Or(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class OPlus(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class OTimes(TypeExpr):
    left: TypeExpr
    right: TypeExpr


@dataclass(frozen=True)
class Implies(TypeExpr):
    antecedent: TypeExpr
    consequent: TypeExpr


@dataclass(frozen=True)
class EmbedInterface(TypeExpr):
    interface: "Interface"


TRUE = TrueT()
FALSE = FalseT()


def atom(name: str) -> Atom:
    return Atom(name)


def conj(*parts: TypeExpr) -> TypeExpr:
    """Right-nested ``&`` of one or more types."""
    if not parts:
        return TRUE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = And(part, result)
    return result


def disj(*parts: TypeExpr) -> TypeExpr:
    """Right-nested ``|`` of one or more types; empty disjunction is false."""
    if not parts:
        return FALSE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = Or(part, result)
    return result


def osum(*parts: TypeExpr) -> TypeExpr:
    """Right-nested ``(+)`` of one or more types; empty sum is false."""
    if not parts:
        return FALSE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = OPlus(part, result)
    return result


def oprod(*parts: TypeExpr) -> TypeExpr:
    """Right-nested ``(x)`` of one or more types; empty product is false."""
    if not parts:
        return FALSE
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = OTimes(part, result)
    return result


# --------------------------------------------------------------------------
# bounds


class Bound:
    """Base class of structural bounds.  Immutable and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class Unit(Bound):
    pass


@dataclass(frozen=True)
class PairB(Bound):
    left: Bound
    right: Bound


@dataclass(frozen=True)
class InL(Bound):
    value: Bound


@dataclass(frozen=True)
class InR(Bound):
    value: Bound


@dataclass(frozen=True)
class DelayB(Bound):
    delay: ExtNat
    inner: Bound

    def __post_init__(self):
        check_extnat(self.delay)


@dataclass(frozen=True)
class Table(Bound):
    """A finite function: one entry per bound of the antecedent space.

    Entries are kept in the canonical enumeration order of the key space, so
    equal tables compare equal structurally.
    """

    entries: tuple[tuple[Bound, Bound], ...]


UNIT = Unit()


# --------------------------------------------------------------------------
# classification

_CLASS_ORDER = ("boolean", "pure", "elementary", "general")


def delay_free(ty: TypeExpr) -> bool:
    """True when ``ty`` contains no O outside of embedded interfaces."""
    if isinstance(ty, (Atom, TrueT, FalseT, EmbedInterface)):
        return True
    if isinstance(ty, Delay):
        return False
    if isinstance(ty, Not):
        return delay_free(ty.operand)
    if isinstance(ty, (And, Or, OPlus, OTimes)):
        return delay_free(ty.left) and delay_free(ty.right)
    if isinstance(ty, Implies):
        return delay_free(ty.antecedent) and delay_free(ty.consequent)
    raise TypeError(f"not a type expression: {ty!r}")


def is_boolean(ty: TypeExpr) -> bool:
    if isinstance(ty, (Atom, TrueT, FalseT)):
        return True
    # !phi abbreviates phi -> false, so every negation is Boolean.
    if isinstance(ty, Not):
        return True
    if isinstance(ty, (And, OTimes)):
        return is_boolean(ty.left) and is_boolean(ty.right)
    if isinstance(ty, Implies):
        return is_boolean(ty.consequent)
    return False


def is_pure(ty: TypeExpr) -> bool:
    if is_boolean(ty):
        return True
    if isinstance(ty, EmbedInterface):
        return True
    if isinstance(ty, (And, OPlus, OTimes)):
        return is_pure(ty.left) and is_pure(ty.right)
    if isinstance(ty, Implies):
        return is_pure(ty.consequent)
    return False


def is_elementary(ty: TypeExpr) -> bool:
    if is_pure(ty):
        return True
    if isinstance(ty, (And, OPlus, OTimes)):
        return is_elementary(ty.left) and is_elementary(ty.right)
    if isinstance(ty, Delay):
        return is_pure(ty.operand)
    if isinstance(ty, Implies):
        return delay_free(ty.antecedent) and is_elementary(ty.consequent)
    return False


def classify(ty: TypeExpr) -> str:
    """Most specific class of ``ty``: boolean, pure, elementary or general."""
    if is_boolean(ty):
        return "boolean"
    if is_pure(ty):
        return "pure"
    if is_elementary(ty):
        return "elementary"
    return "general"


# --------------------------------------------------------------------------
# bound space enumeration


def enumerate_bounds(ty: TypeExpr) -> tuple[Bound, ...]:
    """All bounds of ``ty`` in canonical order.

    Only defined when the space is finite, i.e. when ``ty`` is O-free up to
    embedded interfaces; raises :class:`UnsupportedTypeError` otherwise.
    """
    if isinstance(ty, (Atom, TrueT, FalseT, Not, EmbedInterface)):
        return (UNIT,)
    if isinstance(ty, (And, OPlus, OTimes)):
        lefts = enumerate_bounds(ty.left)
        rights = enumerate_bounds(ty.right)
        return tuple(PairB(l, r) for l in lefts for r in rights)
    if isinstance(ty, Or):
        lefts = enumerate_bounds(ty.left)
        rights = enumerate_bounds(ty.right)
        return tuple(InL(l) for l in lefts) + tuple(InR(r) for r in rights)
    if isinstance(ty, Implies):
        keys = enumerate_bounds(ty.antecedent)
        values = enumerate_bounds(ty.consequent)
        tables = []
        for choice in product(values, repeat=len(keys)):
            tables.append(Table(tuple(zip(keys, choice))))
        return tuple(tables)
    if isinstance(ty, Delay):
        raise UnsupportedTypeError(
            f"bound space of {format_type(ty)} is infinite (contains O)"
        )
    raise TypeError(f"not a type expression: {ty!r}")


def pure_bound(ty: TypeExpr) -> Bound:
    """The canonical (unique up to meaning) bound of a pure type."""
    if isinstance(ty, (Atom, TrueT, FalseT, Not, EmbedInterface)):
        return UNIT
    if isinstance(ty, (And, OPlus, OTimes)):
        return PairB(pure_bound(ty.left), pure_bound(ty.right))
    if isinstance(ty, Implies):
        keys = enumerate_bounds(ty.antecedent)
        value = pure_bound(ty.consequent)
        return Table(tuple((k, value) for k in keys))
    raise UnsupportedTypeError(f"no canonical bound: {format_type(ty)} is not pure")


def check_shape(bound: Bound, ty: TypeExpr) -> None:
    """Raise :class:`ShapeError` unless ``bound`` fits the structure of ``ty``."""
    if isinstance(ty, (Atom, TrueT, FalseT, Not, EmbedInterface)):
        if not isinstance(bound, Unit):
            raise ShapeError(f"expected unit bound for {format_type(ty)}")
        return
    if isinstance(ty, (And, OPlus, OTimes)):
        if not isinstance(bound, PairB):
            raise ShapeError(f"expected pair bound for {format_type(ty)}")
        check_shape(bound.left, ty.left)
        check_shape(bound.right, ty.right)
        return
    if isinstance(ty, Or):
        if isinstance(bound, InL):
            check_shape(bound.value, ty.left)
        elif isinstance(bound, InR):
            check_shape(bound.value, ty.right)
        else:
            raise ShapeError(f"expected injection bound for {format_type(ty)}")
        return
    if isinstance(ty, Delay):
        if not isinstance(bound, DelayB):
            raise ShapeError(f"expected delay bound for {format_type(ty)}")
        check_shape(bound.inner, ty.operand)
        return
    if isinstance(ty, Implies):
        if not isinstance(bound, Table):
            raise ShapeError(f"expected table bound for {format_type(ty)}")
        keys = enumerate_bounds(ty.antecedent)
        if tuple(k for k, _ in bound.entries) != keys:
            raise ShapeError(
                "table keys must enumerate the antecedent bound space "
                f"of {format_type(ty)} in canonical order"
            )
        for _, value in bound.entries:
            check_shape(value, ty.consequent)
        return
    raise TypeError(f"not a type expression: {ty!r}")


def iter_bounds_grid(ty: TypeExpr, grid: tuple[ExtNat, ...]) -> Iterator[Bound]:
    """Enumerate bounds of ``ty`` with every delay drawn from ``grid``.

    Finite whenever all implication antecedents are O-free; used for the
    tightening search over elementary types.
    """
    if isinstance(ty, (Atom, TrueT, FalseT, Not, EmbedInterface)):
        yield UNIT
        return
    if isinstance(ty, (And, OPlus, OTimes)):
        for l in iter_bounds_grid(ty.left, grid):
            for r in iter_bounds_grid(ty.right, grid):
                yield PairB(l, r)
        return
    if isinstance(ty, Or):
        for l in iter_bounds_grid(ty.left, grid):
            yield InL(l)
        for r in iter_bounds_grid(ty.right, grid):
            yield InR(r)
        return
    if isinstance(ty, Delay):
        for d in grid:
            for inner in iter_bounds_grid(ty.operand, grid):
                yield DelayB(d, inner)
        return
    if isinstance(ty, Implies):
        keys = enumerate_bounds(ty.antecedent)
        values = tuple(iter_bounds_grid(ty.consequent, grid))
        for choice in product(values, repeat=len(keys)):
            yield Table(tuple(zip(keys, choice)))
        return
    raise TypeError(f"not a type expression: {ty!r}")


# --------------------------------------------------------------------------
# interfaces


@dataclass(frozen=True)
class Interface:
    """A scheduling interface: a bound paired with its type."""

    bound: Bound
    ty: TypeExpr

    def __post_init__(self):
        check_shape(self.bound, self.ty)

    def __str__(self) -> str:
        return format_interface(self)


def embed_interface(iface: Interface) -> EmbedInterface:
    """Wrap an interface as a pure type usable as a control variable."""
    return EmbedInterface(iface)


def pure_interface(ty: TypeExpr) -> Interface:
    """The interface of a pure type with its canonical bound."""
    return Interface(pure_bound(ty), ty)


def delay_interface(d: ExtNat, ty: TypeExpr) -> Interface:
    """The interface ``d : O ty`` for a pure ``ty``."""
    return Interface(DelayB(d, pure_bound(ty)), Delay(ty))


def arrow_interface(ant: TypeExpr, d: ExtNat, cons: TypeExpr) -> Interface:
    """The single-entry interface ``[d] : ant -> O cons`` for pure controls."""
    keys = enumerate_bounds(ant)
    value = DelayB(d, pure_bound(cons))
    return Interface(Table(tuple((k, value) for k in keys)), Implies(ant, Delay(cons)))


# --------------------------------------------------------------------------
# bound space shape and the matrix encoding


@dataclass(frozen=True)
class BoundShape:
    """Shape of a bound space.

    kind is one of:

    * ``singleton``: a pure type, no resource dimensions;
    * ``matrix``: an elementary type in implication normal form whose bounds
      are rows x cols matrices over the extended naturals (rows follow the
      (+)/&/(x) structure of the consequent, columns the canonical order of
      the antecedent bound space);
    * ``product``: elementary with ``dims`` delay dimensions but no single
      rectangular layout (for example a conjunction of implications);
    * ``finite``: finite but not a Cartesian power (external choice at the
      top level);
    * ``infinite``: a delay operator occurs under an implication antecedent.
    """

    kind: str
    dims: int | None = None
    rows: int | None = None
    cols: int | None = None


def _slot_count(ty: TypeExpr) -> int | None:
    """Number of extended-natural dimensions, or None when not a power."""
    if is_pure(ty):
        return 0
    if isinstance(ty, Delay):
        inner = _slot_count(ty.operand)
        return None if inner is None else 1 + inner
    if isinstance(ty, (And, OPlus, OTimes)):
        left = _slot_count(ty.left)
        right = _slot_count(ty.right)
        if left is None or right is None:
            return None
        return left + right
    if isinstance(ty, Implies):
        if not delay_free(ty.antecedent):
            return None
        inner = _slot_count(ty.consequent)
        if inner is None:
            return None
        return len(enumerate_bounds(ty.antecedent)) * inner
    return None


def _matrix_dims(ty: TypeExpr) -> tuple[int, int] | None:
    """(rows, cols) of the canonical matrix layout, or None."""
    if is_pure(ty):
        return (0, 1)
    if isinstance(ty, Delay) and is_pure(ty.operand):
        return (1, 1)
    if isinstance(ty, (And, OPlus, OTimes)):
        left = _matrix_dims(ty.left)
        right = _matrix_dims(ty.right)
        if left is None or right is None or left[1] != 1 or right[1] != 1:
            return None
        return (left[0] + right[0], 1)
    if isinstance(ty, Implies):
        if not delay_free(ty.antecedent):
            return None
        inner = _matrix_dims(ty.consequent)
        if inner is None or inner[0] == 0:
            return None
        rows, cols = inner
        return (rows, len(enumerate_bounds(ty.antecedent)) * cols)
    return None


def bound_space_shape(ty: TypeExpr) -> BoundShape:
    if is_pure(ty):
        return BoundShape("singleton", dims=0)
    if is_elementary(ty):
        dims = _slot_count(ty)
        mat = _matrix_dims(ty)
        if mat is not None and mat[0] >= 1:
            return BoundShape("matrix", dims=dims, rows=mat[0], cols=mat[1])
        return BoundShape("product", dims=dims)
    dims = _slot_count(ty)
    if dims is not None:
        return BoundShape("product", dims=dims)
    try:
        # no delays anywhere: the space is finite but not a power
        if delay_free(ty):
            return BoundShape("finite")
    except TypeError:
        pass
    # delay under an Or still has finitely many skeletons per injection
    if _finite_skeletons(ty):
        return BoundShape("finite")
    return BoundShape("infinite")


def _finite_skeletons(ty: TypeExpr) -> bool:
    if isinstance(ty, (Atom, TrueT, FalseT, Not, EmbedInterface)):
        return True
    if isinstance(ty, Delay):
        return _finite_skeletons(ty.operand)
    if isinstance(ty, (And, Or, OPlus, OTimes)):
        return _finite_skeletons(ty.left) and _finite_skeletons(ty.right)
    if isinstance(ty, Implies):
        return delay_free(ty.antecedent) and _finite_skeletons(ty.consequent)
    return False


def matrix_to_bound(ty: TypeExpr, rows: list[list[ExtNat]]) -> Bound:
    """Build the structural bound of a matrix-shaped elementary type."""
    dims = _matrix_dims(ty)
    if dims is None or dims[0] == 0:
        raise UnsupportedTypeError(
            f"{format_type(ty)} has no canonical matrix layout"
        )
    n_rows, n_cols = dims
    if len(rows) != n_rows or any(len(r) != n_cols for r in rows):
        raise ShapeError(
            f"expected a {n_rows}x{n_cols} matrix for {format_type(ty)}"
        )
    return _mtob(ty, rows)


def _mtob(ty: TypeExpr, rows: list[list[ExtNat]]) -> Bound:
    if is_pure(ty):
        return pure_bound(ty)
    if isinstance(ty, Delay):
        return DelayB(check_extnat(rows[0][0]), pure_bound(ty.operand))
    if isinstance(ty, (And, OPlus, OTimes)):
        left_rows = _matrix_dims(ty.left)[0]
        return PairB(_mtob(ty.left, rows[:left_rows]), _mtob(ty.right, rows[left_rows:]))
    if isinstance(ty, Implies):
        keys = enumerate_bounds(ty.antecedent)
        sub_cols = _matrix_dims(ty.consequent)[1]
        entries = []
        for j, key in enumerate(keys):
            block = [row[j * sub_cols:(j + 1) * sub_cols] for row in rows]
            entries.append((key, _mtob(ty.consequent, block)))
        return Table(tuple(entries))
    raise UnsupportedTypeError(f"{format_type(ty)} has no canonical matrix layout")


def bound_to_matrix(ty: TypeExpr, bound: Bound) -> list[list[ExtNat]]:
    """Inverse of :func:`matrix_to_bound`."""
    dims = _matrix_dims(ty)
    if dims is None or dims[0] == 0:
        raise UnsupportedTypeError(
            f"{format_type(ty)} has no canonical matrix layout"
        )
    check_shape(bound, ty)
    return _btom(ty, bound)


def _btom(ty: TypeExpr, bound: Bound) -> list[list[ExtNat]]:
    if is_pure(ty):
        return []
    if isinstance(ty, Delay):
        return [[bound.delay]]
    if isinstance(ty, (And, OPlus, OTimes)):
        return _btom(ty.left, bound.left) + _btom(ty.right, bound.right)
    if isinstance(ty, Implies):
        blocks = [_btom(ty.consequent, value) for _, value in bound.entries]
        n_rows = len(blocks[0])
        return [sum((b[i] for b in blocks), []) for i in range(n_rows)]
    raise UnsupportedTypeError(f"{format_type(ty)} has no canonical matrix layout")


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<oplus>\(\+\))
      | (?P<otimes>\(x\))
      | (?P<arrow>->)
      | (?P<mapsto>=>)
      | (?P<neginf>-inf\b)
      | (?P<posinf>\+inf\b)
      | (?P<nat>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
      | (?P<punct>[()\[\]{};,:<>!&|])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false", "inl", "inr", "O"}


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            if kind == "ident" and value in _KEYWORDS:
                kind = value
            tokens.append(_Token(kind, value, pos))
        pos = m.end()
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _BLit:
    """Parsed bound literal, elaborated against a type afterwards."""

    __slots__ = ()


@dataclass(frozen=True)
class _BNum(_BLit):
    value: ExtNat


@dataclass(frozen=True)
class _BPair(_BLit):
    left: _BLit
    right: _BLit


@dataclass(frozen=True)
class _BInL(_BLit):
    value: _BLit


@dataclass(frozen=True)
class _BInR(_BLit):
    value: _BLit


@dataclass(frozen=True)
class _BMatrix(_BLit):
    rows: tuple[tuple[ExtNat, ...], ...]


@dataclass(frozen=True)
class _BTable(_BLit):
    entries: tuple[tuple[_BLit, _BLit], ...]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> _Token:
        return self.tokens[self.index]

    def next(self) -> _Token:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.value!r}", self.text, tok.pos)
        return tok

    def fail(self, message: str):
        tok = self.peek()
        raise ParseError(message, self.text, tok.pos)

    # type grammar: phi := term ("->" phi)?      (weakest, right assoc)
    #               term := summ (("|" | "(+)") term)?
    #               summ := fact (("&" | "(x)") summ)?
    #               fact := "!" fact | "O" fact | atom

    def parse_phi(self) -> TypeExpr:
        left = self.parse_term()
        if self.peek().kind == "arrow":
            self.next()
            return Implies(left, self.parse_phi())
        return left

    def parse_term(self) -> TypeExpr:
        left = self.parse_summ()
        kind = self.peek().kind
        if kind == "punct" and self.peek().value == "|":
            self.next()
            return Or(left, self.parse_term())
        if kind == "oplus":
            self.next()
            return OPlus(left, self.parse_term())
        return left

    def parse_summ(self) -> TypeExpr:
        left = self.parse_fact()
        kind = self.peek().kind
        if kind == "punct" and self.peek().value == "&":
            self.next()
            return And(left, self.parse_summ())
        if kind == "otimes":
            self.next()
            return OTimes(left, self.parse_summ())
        return left

    def parse_fact(self) -> TypeExpr:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == "!":
            self.next()
            return Not(self.parse_fact())
        if tok.kind == "O":
            self.next()
            return Delay(self.parse_fact())
        return self.parse_atom()

    def parse_atom(self) -> TypeExpr:
        tok = self.next()
        if tok.kind == "true":
            return TRUE
        if tok.kind == "false":
            return FALSE
        if tok.kind == "ident":
            return Atom(tok.value)
        if tok.kind == "punct" and tok.value == "(":
            inner = self.parse_phi()
            close = self.next()
            if close.kind != "punct" or close.value != ")":
                raise ParseError("expected ')'", self.text, close.pos)
            return inner
        if tok.kind == "punct" and tok.value == "<":
            blit = self.parse_blit()
            colon = self.next()
            if colon.kind != "punct" or colon.value != ":":
                raise ParseError("expected ':' in embedded interface", self.text, colon.pos)
            ty = self.parse_phi()
            close = self.next()
            if close.kind != "punct" or close.value != ">":
                raise ParseError("expected '>'", self.text, close.pos)
            return EmbedInterface(Interface(elaborate_bound(blit, ty), ty))
        raise ParseError(f"unexpected token {tok.value!r}", self.text, tok.pos)

    # bound literals

    def parse_extnat(self) -> ExtNat:
        tok = self.next()
        if tok.kind == "nat":
            return int(tok.value)
        if tok.kind == "neginf":
            return NEG_INF
        if tok.kind == "posinf":
            return POS_INF
        raise ParseError(f"expected a number, found {tok.value!r}", self.text, tok.pos)

    def parse_blit(self) -> _BLit:
        tok = self.peek()
        if tok.kind in ("nat", "neginf", "posinf"):
            return _BNum(self.parse_extnat())
        if tok.kind == "inl":
            self.next()
            return _BInL(self.parse_blit())
        if tok.kind == "inr":
            self.next()
            return _BInR(self.parse_blit())
        if tok.kind == "punct" and tok.value == "(":
            self.next()
            left = self.parse_blit()
            comma = self.next()
            if comma.kind != "punct" or comma.value != ",":
                raise ParseError("expected ',' in bound pair", self.text, comma.pos)
            right = self.parse_blit()
            close = self.next()
            if close.kind != "punct" or close.value != ")":
                raise ParseError("expected ')'", self.text, close.pos)
            return _BPair(left, right)
        if tok.kind == "punct" and tok.value == "[":
            self.next()
            rows = [self.parse_row()]
            while self.peek().kind == "punct" and self.peek().value == ";":
                self.next()
                rows.append(self.parse_row())
            close = self.next()
            if close.kind != "punct" or close.value != "]":
                raise ParseError("expected ']'", self.text, close.pos)
            if len({len(r) for r in rows}) != 1:
                raise ParseError("ragged matrix literal", self.text, tok.pos)
            return _BMatrix(tuple(rows))
        if tok.kind == "punct" and tok.value == "{":
            self.next()
            entries = [self.parse_table_entry()]
            while self.peek().kind == "punct" and self.peek().value == ",":
                self.next()
                entries.append(self.parse_table_entry())
            close = self.next()
            if close.kind != "punct" or close.value != "}":
                raise ParseError("expected '}'", self.text, close.pos)
            return _BTable(tuple(entries))
        raise ParseError(f"expected a bound, found {tok.value!r}", self.text, tok.pos)

    def parse_row(self) -> tuple[ExtNat, ...]:
        row = [self.parse_extnat()]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.next()
            row.append(self.parse_extnat())
        return tuple(row)

    def parse_table_entry(self) -> tuple[_BLit, _BLit]:
        key = self.parse_blit()
        self.expect("mapsto")
        value = self.parse_blit()
        return (key, value)


def elaborate_bound(blit: _BLit, ty: TypeExpr) -> Bound:
    """Turn a parsed bound literal into a structural bound for ``ty``."""
    if isinstance(blit, _BNum):
        if is_pure(ty):
            if blit.value != 0:
                raise ShapeError(
                    f"the bound of pure type {format_type(ty)} must be 0"
                )
            return pure_bound(ty)
        if isinstance(ty, Delay) and is_pure(ty.operand):
            return DelayB(blit.value, pure_bound(ty.operand))
        return matrix_to_bound(ty, [[blit.value]])
    if isinstance(blit, _BMatrix):
        return matrix_to_bound(ty, [list(r) for r in blit.rows])
    if isinstance(blit, _BPair):
        if isinstance(ty, (And, OPlus, OTimes)):
            return PairB(
                elaborate_bound(blit.left, ty.left),
                elaborate_bound(blit.right, ty.right),
            )
        if isinstance(ty, Delay):
            if not isinstance(blit.left, _BNum):
                raise ShapeError("delay bound must start with a number")
            return DelayB(blit.left.value, elaborate_bound(blit.right, ty.operand))
        raise ShapeError(f"pair bound does not fit {format_type(ty)}")
    if isinstance(blit, _BInL):
        if not isinstance(ty, Or):
            raise ShapeError(f"inl bound does not fit {format_type(ty)}")
        return InL(elaborate_bound(blit.value, ty.left))
    if isinstance(blit, _BInR):
        if not isinstance(ty, Or):
            raise ShapeError(f"inr bound does not fit {format_type(ty)}")
        return InR(elaborate_bound(blit.value, ty.right))
    if isinstance(blit, _BTable):
        if not isinstance(ty, Implies):
            raise ShapeError(f"table bound does not fit {format_type(ty)}")
        keys = enumerate_bounds(ty.antecedent)
        mapping = {}
        for key_lit, value_lit in blit.entries:
            key = elaborate_bound(key_lit, ty.antecedent)
            if key in mapping:
                raise ShapeError("duplicate table key")
            mapping[key] = elaborate_bound(value_lit, ty.consequent)
        if set(mapping) != set(keys):
            raise ShapeError(
                "table keys must cover the antecedent bound space exactly once"
            )
        return Table(tuple((k, mapping[k]) for k in keys))
    raise TypeError(f"not a bound literal: {blit!r}")


def parse_type(text: str) -> TypeExpr:
    parser = _Parser(text)
    ty = parser.parse_phi()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.value!r}", text, tok.pos)
    return ty


def parse_interface(text: str) -> Interface:
    """Parse ``<bound> : <phi>`` into an interface."""
    parser = _Parser(text)
    blit = parser.parse_blit()
    colon = parser.next()
    if colon.kind != "punct" or colon.value != ":":
        raise ParseError("expected ':' between bound and type", text, colon.pos)
    ty = parser.parse_phi()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.value!r}", text, tok.pos)
    return Interface(elaborate_bound(blit, ty), ty)


# --------------------------------------------------------------------------
# printing

_LEVEL_IMPLIES = 0
_LEVEL_SUM = 1
_LEVEL_PROD = 2
_LEVEL_UNARY = 3


def _format(ty: TypeExpr, level: int) -> str:
    if isinstance(ty, Atom):
        return ty.name
    if isinstance(ty, TrueT):
        return "true"
    if isinstance(ty, FalseT):
        return "false"
    if isinstance(ty, EmbedInterface):
        return f"<{format_interface(ty.interface)}>"
    if isinstance(ty, Not):
        text = "!" + _format(ty.operand, _LEVEL_UNARY)
        return text if level <= _LEVEL_UNARY else f"({text})"
    if isinstance(ty, Delay):
        text = "O " + _format(ty.operand, _LEVEL_UNARY)
        return text if level <= _LEVEL_UNARY else f"({text})"
    if isinstance(ty, (And, OTimes)):
        op = "&" if isinstance(ty, And) else "(x)"
        text = f"{_format(ty.left, _LEVEL_PROD + 1)} {op} {_format(ty.right, _LEVEL_PROD)}"
        return text if level <= _LEVEL_PROD else f"({text})"
    if isinstance(ty, (Or, OPlus)):
        op = "|" if isinstance(ty, Or) else "(+)"
        text = f"{_format(ty.left, _LEVEL_SUM + 1)} {op} {_format(ty.right, _LEVEL_SUM)}"
        return text if level <= _LEVEL_SUM else f"({text})"
    if isinstance(ty, Implies):
        text = (
            f"{_format(ty.antecedent, _LEVEL_IMPLIES + 1)} -> "
            f"{_format(ty.consequent, _LEVEL_IMPLIES)}"
        )
        return text if level <= _LEVEL_IMPLIES else f"({text})"
    raise TypeError(f"not a type expression: {ty!r}")


def format_type(ty: TypeExpr) -> str:
    return _format(ty, _LEVEL_IMPLIES)


def format_matrix(rows: list[list[ExtNat]]) -> str:
    body = "; ".join(", ".join(format_extnat(v) for v in row) for row in rows)
    return f"[{body}]"


def format_bound(bound: Bound, ty: TypeExpr) -> str:
    if is_pure(ty):
        return "0"
    if isinstance(ty, Delay) and is_pure(ty.operand):
        return format_extnat(bound.delay)
    dims = _matrix_dims(ty)
    if dims is not None and dims[0] >= 1:
        return format_matrix(bound_to_matrix(ty, bound))
    return _format_bound_structural(bound, ty)


def _format_bound_structural(bound: Bound, ty: TypeExpr) -> str:
    if isinstance(bound, Unit):
        return "0"
    if isinstance(bound, PairB):
        return (
            f"({_format_bound_structural(bound.left, ty.left)}, "
            f"{_format_bound_structural(bound.right, ty.right)})"
        )
    if isinstance(bound, InL):
        return f"inl {_format_bound_structural(bound.value, ty.left)}"
    if isinstance(bound, InR):
        return f"inr {_format_bound_structural(bound.value, ty.right)}"
    if isinstance(bound, DelayB):
        return (
            f"({format_extnat(bound.delay)}, "
            f"{_format_bound_structural(bound.inner, ty.operand)})"
        )
    if isinstance(bound, Table):
        parts = [
            f"{_format_bound_structural(k, ty.antecedent)} => "
            f"{_format_bound_structural(v, ty.consequent)}"
            for k, v in bound.entries
        ]
        return "{" + ", ".join(parts) + "}"
    raise TypeError(f"not a bound: {bound!r}")


def format_interface(iface: Interface) -> str:
    return f"{format_bound(iface.bound, iface.ty)} : {format_type(iface.ty)}"
