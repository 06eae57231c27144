"""Propositional logic over a finite, explicitly declared signature.

Everything downstream (inconsistency analysis, default theories, the
relevance hierarchy, the preferential model order) computes on the model
sets produced here, so this module favours exactness over cleverness:
valuations are enumerated exhaustively and model sets are exact bitsets.

A model set over n atoms is a Python int with one bit per valuation
index; index bits follow declaration order, first atom = high bit.  All
set algebra is therefore single big-int operations, which keeps even the
20-atom ceiling cheap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

ATOM_NAME = re.compile(r"[a-zA-Z_][a-zA-Z0-9_']*")
RESERVED = ("top", "bottom")

DEFAULT_ATOM_CAP = 20


class LogicError(ValueError):
    pass


class FormulaSyntaxError(LogicError):
    """Malformed formula text; `position` is 1-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UndeclaredAtomError(LogicError):
    def __init__(self, atom: str):
        super().__init__(f"atom '{atom}' is not declared in the signature")
        self.atom = atom


class SignatureTooLargeError(LogicError):
    def __init__(self, size: int, cap: int):
        super().__init__(
            f"signature has {size} atoms; model enumeration is capped at {cap}"
        )
        self.size = size
        self.cap = cap


# ---------------------------------------------------------------------------
# signature and valuations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Ordered list of distinct atom names.

    The order is fixed at creation and determines valuation bit
    positions: the first atom is the high (leftmost) bit.
    """

    atoms: tuple[str, ...]
    atom_cap: int = DEFAULT_ATOM_CAP

    def __init__(self, atoms: Iterable[str], atom_cap: int = DEFAULT_ATOM_CAP):
        atoms = tuple(atoms)
        seen = set()
        for name in atoms:
            if not name or not ATOM_NAME.fullmatch(name):
                raise LogicError(f"invalid atom name {name!r}")
            if name in RESERVED:
                raise LogicError(f"atom name {name!r} is a reserved constant")
            if name in seen:
                raise LogicError(f"duplicate atom name {name!r}")
            seen.add(name)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "atom_cap", atom_cap)

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, atom: str) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise UndeclaredAtomError(atom) from None

    @property
    def size(self) -> int:
        if len(self.atoms) > self.atom_cap:
            raise SignatureTooLargeError(len(self.atoms), self.atom_cap)
        return 1 << len(self.atoms)

    def universe(self) -> "ModelSet":
        return ModelSet(self, _universe_mask(len(self.atoms), self.atom_cap))

    def empty(self) -> "ModelSet":
        return ModelSet(self, 0)

    def atom_models(self, atom: str) -> "ModelSet":
        i = self.index(atom)
        if len(self.atoms) > self.atom_cap:
            raise SignatureTooLargeError(len(self.atoms), self.atom_cap)
        return ModelSet(self, _atom_mask(len(self.atoms), i))

    def valuation(self, bits: str) -> "Valuation":
        if len(bits) != len(self.atoms) or any(c not in "01" for c in bits):
            raise LogicError(f"bad valuation bitstring {bits!r} for {self.atoms}")
        return Valuation(self, int(bits, 2))


@lru_cache(maxsize=None)
def _universe_mask(n: int, cap: int) -> int:
    if n > cap:
        raise SignatureTooLargeError(n, cap)
    return (1 << (1 << n)) - 1


@lru_cache(maxsize=None)
def _atom_mask(n: int, atom_index: int) -> int:
    # Valuation index bit k = n-1-atom_index; the mask over all 2^n
    # indices has period 2^(k+1) with the upper half set.  Built by
    # doubling so it costs O(n) big-int ops.
    k = n - 1 - atom_index
    block = ((1 << (1 << k)) - 1) << (1 << k)
    span = 1 << (k + 1)
    width = 1 << n
    mask = block
    while span < width:
        mask |= mask << span
        span <<= 1
    return mask


@dataclass(frozen=True)
class Valuation:
    """One truth bit per signature atom, in signature order."""

    signature: Signature
    index: int

    def value(self, atom: str) -> bool:
        i = self.signature.index(atom)
        return bool((self.index >> (len(self.signature) - 1 - i)) & 1)

    def bits(self) -> str:
        return format(self.index, f"0{len(self.signature)}b")

    def __repr__(self) -> str:
        return f"Valuation({self.bits()})"


# ---------------------------------------------------------------------------
# formulas
# ---------------------------------------------------------------------------


class Formula:
    """Abstract syntax tree node; subclasses are frozen dataclasses."""

    __slots__ = ()

    def atoms(self) -> frozenset[str]:
        return frozenset(_collect_atoms(self))


@dataclass(frozen=True)
class Top(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class Bottom(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class Atom(Formula):
    __slots__ = ("name",)
    name: str


@dataclass(frozen=True)
class Not(Formula):
    __slots__ = ("operand",)
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    __slots__ = ("left", "right")
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    __slots__ = ("left", "right")
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    __slots__ = ("left", "right")
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    __slots__ = ("left", "right")
    left: Formula
    right: Formula


def _collect_atoms(f: Formula) -> Iterator[str]:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            yield node.name
        elif isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or, Implies, Iff)):
            stack.append(node.left)
            stack.append(node.right)


def conjoin(formulas: Sequence[Formula]) -> Formula:
    """Conjunction of a formula list; empty list is top."""
    if not formulas:
        return Top()
    out = formulas[0]
    for f in formulas[1:]:
        out = And(out, f)
    return out


# ---------------------------------------------------------------------------
# concrete syntax
# ---------------------------------------------------------------------------
#
# Precedence, tightest first:  ~   &   |   ->   <->
# `->` and `<->` associate to the right, `&` and `|` to the left.

_TOKEN = re.compile(
    r"\s*(?:(?P<lpar>\()|(?P<rpar>\))|(?P<iff><->)|(?P<imp>->)"
    r"|(?P<and>&)|(?P<or>\|)|(?P<not>~)|(?P<name>[a-zA-Z_][a-zA-Z0-9_']*))"
)


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if not text[pos:].strip():
                break
            m = _TOKEN.match(text, pos)
            if m is None or m.lastgroup is None:
                bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise FormulaSyntaxError(
                    f"unexpected character {text[bad]!r}", bad + 1
                )
            self.tokens.append((m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)))
            pos = m.end()
        self.i = 0

    def _fail_eof(self, message: str):
        pos = self.tokens[-1][2] + 1 if self.tokens else 1
        raise FormulaSyntaxError(message, pos)

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok is not None:
            raise FormulaSyntaxError(f"unexpected {tok[1]!r}", tok[2] + 1)
        return f

    def iff(self) -> Formula:
        left = self.implies()
        tok = self.peek()
        if tok and tok[0] == "iff":
            self.take()
            return Iff(left, self.iff())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        tok = self.peek()
        if tok and tok[0] == "imp":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while True:
            tok = self.peek()
            if tok and tok[0] == "or":
                self.take()
                f = Or(f, self.conjunction())
            else:
                return f

    def conjunction(self) -> Formula:
        f = self.negation()
        while True:
            tok = self.peek()
            if tok and tok[0] == "and":
                self.take()
                f = And(f, self.negation())
            else:
                return f

    def negation(self) -> Formula:
        tok = self.peek()
        if tok and tok[0] == "not":
            self.take()
            return Not(self.negation())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self._fail_eof("expected a formula")
        kind, text, start = self.take()
        if kind == "lpar":
            f = self.iff()
            closing = self.peek()
            if closing is None:
                self._fail_eof("missing ')'")
            if closing[0] != "rpar":
                raise FormulaSyntaxError(
                    f"expected ')' before {closing[1]!r}", closing[2] + 1
                )
            self.take()
            return f
        if kind == "name":
            if text == "top":
                return Top()
            if text == "bottom":
                return Bottom()
            if text not in self.sig.atoms:
                raise UndeclaredAtomError(text)
            return Atom(text)
        raise FormulaSyntaxError(f"unexpected {text!r}", start + 1)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse ASCII formula text against a signature.

    Raises FormulaSyntaxError (with 1-based position) on malformed
    input and UndeclaredAtomError for unknown atoms.
    """
    if not text or not text.strip():
        raise FormulaSyntaxError("empty formula", 1)
    return _Parser(text, sig).parse()


_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def format_formula(f: Formula) -> str:
    """Render a formula as parseable text (minimal parentheses)."""
    return _format(f, 0)


def _format(f: Formula, parent_prec: int) -> str:
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bottom):
        return "bottom"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _format(f.operand, _PRECEDENCE[Not])
    op, symbol = type(f), {And: " & ", Or: " | ", Implies: " -> ", Iff: " <-> "}[type(f)]
    prec = _PRECEDENCE[op]
    if op in (Implies, Iff):
        # right associative: the left child needs strictly higher precedence
        text = _format(f.left, prec + 1) + symbol + _format(f.right, prec)
    else:
        text = _format(f.left, prec) + symbol + _format(f.right, prec + 1)
    return f"({text})" if prec < parent_prec else text


# ---------------------------------------------------------------------------
# model sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSet:
    """Finite set of valuations over one signature, stored as a bitset."""

    signature: Signature
    mask: int

    def _check(self, other: "ModelSet") -> None:
        if self.signature.atoms != other.signature.atoms:
            raise LogicError("model sets over different signatures")

    def __contains__(self, v: Valuation) -> bool:
        return bool((self.mask >> v.index) & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __iter__(self) -> Iterator[Valuation]:
        mask = self.mask
        index = 0
        while mask:
            if mask & 1:
                yield Valuation(self.signature, index)
            mask >>= 1
            index += 1

    def union(self, other: "ModelSet") -> "ModelSet":
        self._check(other)
        return ModelSet(self.signature, self.mask | other.mask)

    def intersection(self, other: "ModelSet") -> "ModelSet":
        self._check(other)
        return ModelSet(self.signature, self.mask & other.mask)

    def difference(self, other: "ModelSet") -> "ModelSet":
        self._check(other)
        return ModelSet(self.signature, self.mask & ~other.mask)

    def complement(self) -> "ModelSet":
        return self.signature.universe().difference(self)

    def issubset(self, other: "ModelSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def is_strict_subset(self, other: "ModelSet") -> bool:
        return self.issubset(other) and self.mask != other.mask

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def bitstrings(self) -> list[str]:
        """Members as sorted bitstrings, signature order, first atom leftmost."""
        return [v.bits() for v in self]

    def __repr__(self) -> str:
        return "ModelSet{" + ", ".join(self.bitstrings()) + "}"


def models(f: Formula, sig: Signature) -> ModelSet:
    """The set of valuations satisfying `f`, by exhaustive enumeration.

    Raises SignatureTooLargeError above the signature's atom cap.
    """
    universe = _universe_mask(len(sig), sig.atom_cap)
    return ModelSet(sig, _eval(f, sig, universe))


def _eval(f: Formula, sig: Signature, universe: int) -> int:
    if isinstance(f, Top):
        return universe
    if isinstance(f, Bottom):
        return 0
    if isinstance(f, Atom):
        return _atom_mask(len(sig), sig.index(f.name))
    if isinstance(f, Not):
        return universe & ~_eval(f.operand, sig, universe)
    left = _eval(f.left, sig, universe)
    right = _eval(f.right, sig, universe)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    if isinstance(f, Implies):
        return (universe & ~left) | right
    if isinstance(f, Iff):
        return (left & right) | (universe & ~left & ~right)
    raise LogicError(f"unknown formula node {f!r}")


def models_of_all(gamma: Sequence[Formula], sig: Signature) -> ModelSet:
    out = sig.universe()
    for f in gamma:
        out = out & models(f, sig)
    return out


def entails(gamma: Sequence[Formula], phi: Formula, sig: Signature) -> bool:
    """True iff every joint model of `gamma` satisfies `phi`."""
    return models_of_all(gamma, sig).issubset(models(phi, sig))


def is_consistent(gamma: Sequence[Formula], sig: Signature) -> bool:
    """True iff the joint model set of `gamma` is non-empty."""
    return bool(models_of_all(gamma, sig))


def strictly_more_specific(alpha: Formula, beta: Formula, sig: Signature) -> bool:
    """True iff models(alpha) is a strict subset of models(beta)."""
    return models(alpha, sig).is_strict_subset(models(beta, sig))
