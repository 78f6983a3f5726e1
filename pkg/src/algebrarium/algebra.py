"""Abstract group interface shared by the four domains.

An :class:`Element` is a domain tag plus a payload that is canonicalized on
construction, so two elements are equal exactly when they denote the same
group element. ``combine``, ``inverse``, ``identity`` and friends dispatch on
the tag.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, NamedTuple, Sequence

from . import domains as dm
from .domains import CubeToken, DomainId
from .errors import DomainMismatch, EmptyChain, ParseError


class _Group(NamedTuple):
    canonical: Callable[[Any], Any]
    op: Callable[[Any, Any], Any]
    inv: Callable[[Any], Any]
    unit: Any
    parse: Callable[[str], Any]
    render: Callable[[Any], str]


def _enigma_canonical(p):
    if len(p) != 3:
        raise ValueError("Enigma payload needs three rotors")
    return tuple(int(r) % 26 for r in p)


def _cube_canonical(p):
    return dm.cube_reduce(CubeToken(f, int(t)) for f, t in p)


_GROUPS = {
    DomainId.ENCRYPTED_HISTORY: _Group(
        canonical=int,
        op=lambda a, b: a + b,
        inv=lambda a: -a,
        unit=0,
        parse=dm.eh_parse_payload,
        render=dm.eh_render_payload,
    ),
    DomainId.ENIGMA: _Group(
        canonical=_enigma_canonical,
        op=lambda a, b: tuple((x + y) % 26 for x, y in zip(a, b)),
        inv=lambda a: tuple((26 - x) % 26 for x in a),
        unit=(0, 0, 0),
        parse=dm.enigma_parse_payload,
        render=dm.enigma_render_payload,
    ),
    DomainId.KNITTING: _Group(
        canonical=dm.knit_reduce_word,
        op=lambda a, b: dm.knit_reduce_word(a + b),
        inv=dm.knit_invert_word,
        unit="",
        parse=dm.knit_parse_payload,
        render=dm.knit_render_payload,
    ),
    DomainId.RUBIKS_CUBE: _Group(
        canonical=_cube_canonical,
        op=lambda a, b: dm.cube_reduce(a + b),
        inv=dm.cube_invert,
        unit=(),
        parse=dm.cube_parse_tokens,
        render=dm.cube_render_payload,
    ),
}


@dataclass(frozen=True)
class Element:
    domain: DomainId
    payload: Any

    def __post_init__(self):
        domain = DomainId.lookup(self.domain)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "payload", _GROUPS[domain].canonical(self.payload))

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class AlgebraSpec:
    domain: DomainId
    cardinality: str  # "finite" | "infinite"
    commutative: bool
    signature: str


# Flags follow the published domain table; note the cube rewrite quotient is
# in fact infinite even though the table lists the domain as finite.
ALGEBRA_SPECS = {
    DomainId.ENCRYPTED_HISTORY: AlgebraSpec(
        DomainId.ENCRYPTED_HISTORY, "infinite", True,
        "integer addition on base-7 cipher offsets; inverse flips FWD/BACK; identity FWD(a)",
    ),
    DomainId.ENIGMA: AlgebraSpec(
        DomainId.ENIGMA, "finite", True,
        "component-wise addition modulo 26 on three rotors; inverse is negation mod 26; identity A,A,A",
    ),
    DomainId.KNITTING: AlgebraSpec(
        DomainId.KNITTING, "infinite", False,
        "concatenation then free reduction over k,p with inverses K,P; identity is the empty word",
    ),
    DomainId.RUBIKS_CUBE: AlgebraSpec(
        DomainId.RUBIKS_CUBE, "finite", False,
        "concatenation then canonical rewriting of face turns; inverse reverses and primes; identity is the empty sequence",
    ),
}


def _check_same(a: Element, b: Element) -> DomainId:
    if a.domain != b.domain:
        raise DomainMismatch(f"cannot combine {a.domain.value} with {b.domain.value}")
    return a.domain


def identity(domain: DomainId | str) -> Element:
    domain = DomainId.lookup(domain)
    return Element(domain, _GROUPS[domain].unit)


def combine(a: Element, b: Element) -> Element:
    d = _check_same(a, b)
    return Element(d, _GROUPS[d].op(a.payload, b.payload))


def inverse(a: Element) -> Element:
    return Element(a.domain, _GROUPS[a.domain].inv(a.payload))


def solve_for_x(a: Element, b: Element, side: str = "left") -> Element:
    """Solve ``a . x = b`` (``side="left"``) or ``x . a = b`` (``side="right"``)."""
    _check_same(a, b)
    if side == "left":
        return combine(inverse(a), b)
    if side == "right":
        return combine(b, inverse(a))
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def fold_chain(operands: Sequence[Element]) -> Element:
    if not operands:
        raise EmptyChain("cannot fold an empty chain")
    return reduce(combine, operands)


def parse(domain: DomainId | str, text: str) -> Element:
    domain = DomainId.lookup(domain)
    if not isinstance(text, str):
        raise ParseError(f"expected text, got {type(text).__name__}")
    return Element(domain, _GROUPS[domain].parse(text))


def render(e: Element) -> str:
    return _GROUPS[e.domain].render(e.payload)


# Named per-domain entry points.

def eh_parse(text: str) -> Element:
    return parse(DomainId.ENCRYPTED_HISTORY, text)


def eh_render(e: Element) -> str:
    return dm.eh_render_payload(e.payload)


def enigma_parse(text: str) -> Element:
    return parse(DomainId.ENIGMA, text)


def enigma_render(e: Element) -> str:
    return dm.enigma_render_payload(e.payload)


def knit_reduce(word: str) -> Element:
    return parse(DomainId.KNITTING, word)


def cube_canonicalize(tokens) -> Element:
    return Element(DomainId.RUBIKS_CUBE, tokens)


def cube_permutation(e: Element) -> tuple[int, ...]:
    if e.domain != DomainId.RUBIKS_CUBE:
        raise DomainMismatch("sticker permutations exist only for cube elements")
    return dm.sticker_permutation(e.payload)
