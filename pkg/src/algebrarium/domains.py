"""Operational semantics of the four concrete groups.

Everything here works on raw payloads (ints, tuples, strings); the
``Element`` wrapper in :mod:`algebrarium.algebra` adds the domain tag and
guarantees canonical form.

Payload types:

* EncryptedHistory -- ``int`` (signed offset on the integer line)
* Enigma           -- ``(r1, r2, r3)`` residues mod 26
* Knitting         -- ``str`` reduced word over ``k p K P`` (``""`` is identity)
* RubiksCube       -- tuple of ``(face, turns)`` with turns in 1..3

Cube canonical form
-------------------
The cube system is the rewrite quotient generated by three rules: inverse
cancellation, same-face consolidation mod 4, and reordering of adjacent
opposite faces so that R precedes L, U precedes D and F precedes B. Its
normal forms are sequences of *axis blocks*: maximal runs of moves on one
axis hold at most one move per face, in priority order, and neighbouring
blocks lie on different axes. ``cube_reduce`` computes that form in one
left-to-right pass with a stack of blocks.

The rules terminate: consolidation strictly shortens the sequence and a
reorder strictly lowers the number of priority inversions among adjacent
opposite-face pairs without changing the length. Each rule preserves the
group element and the block normal form of an element is unique, so the
fixpoint reached is the same whatever order the rules fire in.
"""

from __future__ import annotations

import enum
import re
from functools import lru_cache
from typing import NamedTuple

from .errors import ParseError


class DomainId(str, enum.Enum):
    ENCRYPTED_HISTORY = "EncryptedHistory"
    ENIGMA = "Enigma"
    KNITTING = "Knitting"
    RUBIKS_CUBE = "RubiksCube"

    @classmethod
    def lookup(cls, name: str) -> "DomainId":
        """Resolve a domain from its value or a loose alias (``enigma``, ``cube``, ...)."""
        if isinstance(name, DomainId):
            return name
        key = re.sub(r"[^a-z]", "", str(name).lower())
        try:
            return _ALIASES[key]
        except KeyError:
            raise ParseError(f"unknown domain {name!r}") from None


_ALIASES = {
    "encryptedhistory": DomainId.ENCRYPTED_HISTORY,
    "eh": DomainId.ENCRYPTED_HISTORY,
    "history": DomainId.ENCRYPTED_HISTORY,
    "enigma": DomainId.ENIGMA,
    "knitting": DomainId.KNITTING,
    "knit": DomainId.KNITTING,
    "rubikscube": DomainId.RUBIKS_CUBE,
    "rubiks": DomainId.RUBIKS_CUBE,
    "cube": DomainId.RUBIKS_CUBE,
}

# Printable identity for the word-like domains.
EPSILON = "ε"


# ---------------------------------------------------------------- cipher ---

CIPHER_DIGITS = "abcdefg"
_CIPHER_VALUE = {ch: i for i, ch in enumerate(CIPHER_DIGITS)}
_EH_RE = re.compile(r"^(FWD|BACK)\(([^()]*)\)$")


def cipher_decode(val: str) -> int:
    """Base-7 magnitude of a cipher string; leading ``a`` digits are allowed."""
    if not val:
        raise ParseError("empty cipher value")
    n = 0
    for ch in val:
        if ch not in _CIPHER_VALUE:
            raise ParseError(f"invalid cipher character {ch!r}")
        n = n * 7 + _CIPHER_VALUE[ch]
    return n


def cipher_encode(n: int) -> str:
    if n < 0:
        raise ValueError("cipher magnitude must be non-negative")
    if n == 0:
        return CIPHER_DIGITS[0]
    digits = []
    while n:
        n, r = divmod(n, 7)
        digits.append(CIPHER_DIGITS[r])
    return "".join(reversed(digits))


def eh_parse_payload(text: str) -> int:
    m = _EH_RE.match(text.strip())
    if not m:
        raise ParseError(f"not a DIR(val) step: {text!r}")
    n = cipher_decode(m.group(2))
    return n if m.group(1) == "FWD" else -n


def eh_render_payload(offset: int) -> str:
    # zero has no direction of its own; it is rendered as FWD(a)
    direction = "BACK" if offset < 0 else "FWD"
    return f"{direction}({cipher_encode(abs(offset))})"


# ---------------------------------------------------------------- enigma ---

ROTOR_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def enigma_parse_payload(text: str) -> tuple[int, int, int]:
    parts = [p.strip() for p in text.strip().split(",")]
    if len(parts) != 3:
        raise ParseError(f"expected three rotor letters, got {text!r}")
    out = []
    for p in parts:
        if len(p) != 1 or p.upper() not in ROTOR_LETTERS:
            raise ParseError(f"invalid rotor letter {p!r}")
        out.append(ROTOR_LETTERS.index(p.upper()))
    return tuple(out)


def enigma_render_payload(rotors: tuple[int, int, int]) -> str:
    return ",".join(ROTOR_LETTERS[r % 26] for r in rotors)


# -------------------------------------------------------------- knitting ---

KNIT_LETTERS = "kpKP"
_KNIT_INVERSE = {"k": "K", "K": "k", "p": "P", "P": "p"}


def knit_reduce_word(word: str) -> str:
    """Freely reduce a word over ``k p K P`` with a single stack pass."""
    stack: list[str] = []
    for ch in word:
        if ch not in _KNIT_INVERSE:
            raise ParseError(f"invalid knitting symbol {ch!r}")
        if stack and stack[-1] == _KNIT_INVERSE[ch]:
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def knit_invert_word(word: str) -> str:
    return "".join(_KNIT_INVERSE[ch] for ch in reversed(word))


def knit_parse_payload(text: str) -> str:
    text = text.strip()
    if text == EPSILON:
        return ""
    return knit_reduce_word(text)


def knit_render_payload(word: str) -> str:
    return word or EPSILON


# ------------------------------------------------------------------ cube ---

CUBE_FACES = "RLUDFB"
_FACE_AXIS = {"R": 0, "L": 0, "U": 1, "D": 1, "F": 2, "B": 2}
_FACE_SLOT = {"R": 0, "L": 1, "U": 0, "D": 1, "F": 0, "B": 1}
_AXIS_FACES = ("RL", "UD", "FB")
_MODIFIERS = {"": 1, "2": 2, "#": 3, "'": 3, "3": 3}
_TURN_SUFFIX = {1: "", 2: "2", 3: "#"}


class CubeToken(NamedTuple):
    face: str
    turns: int


def opposite_face(face: str) -> str:
    pair = _AXIS_FACES[_FACE_AXIS[face]]
    return pair[1 - _FACE_SLOT[face]]


def cube_reduce(tokens) -> tuple[CubeToken, ...]:
    """Canonical form of a move sequence (see module docstring)."""
    blocks: list[tuple[int, list[int]]] = []
    for face, turns in tokens:
        axis, slot = _FACE_AXIS[face], _FACE_SLOT[face]
        if blocks and blocks[-1][0] == axis:
            b = blocks[-1][1]
            b[slot] = (b[slot] + turns) % 4
            if b[0] == 0 and b[1] == 0:
                blocks.pop()
        elif turns % 4:
            b = [0, 0]
            b[slot] = turns % 4
            blocks.append((axis, b))
    out = []
    for axis, b in blocks:
        for slot in (0, 1):
            if b[slot]:
                out.append(CubeToken(_AXIS_FACES[axis][slot], b[slot]))
    return tuple(out)


def cube_invert(tokens) -> tuple[CubeToken, ...]:
    return tuple(CubeToken(f, 4 - t) for f, t in reversed(tokens))


def cube_parse_tokens(text: str) -> list[CubeToken]:
    text = text.strip()
    if text in ("", EPSILON):
        return []
    out = []
    for tok in text.split():
        face, mod = tok[0], tok[1:]
        if face not in _FACE_AXIS or mod not in _MODIFIERS:
            raise ParseError(f"invalid cube move {tok!r}")
        out.append(CubeToken(face, _MODIFIERS[mod]))
    return out


def cube_render_payload(tokens) -> str:
    if not tokens:
        return EPSILON
    return " ".join(f + _TURN_SUFFIX[t] for f, t in tokens)


# Sticker model used only to check that the rewrite rules are sound.
# Facelets are (cubie position, outward normal) with coordinates in {-1,0,1};
# centre facelets are left out, leaving the 48 that can move.
_FACE_NORMAL = {
    "R": (1, 0, 0), "L": (-1, 0, 0),
    "U": (0, 1, 0), "D": (0, -1, 0),
    "F": (0, 0, 1), "B": (0, 0, -1),
}


def _facelets():
    cells = []
    rng = (-1, 0, 1)
    for x in rng:
        for y in rng:
            for z in rng:
                pos = (x, y, z)
                if sum(c != 0 for c in pos) < 2:
                    continue
                for axis in range(3):
                    if pos[axis]:
                        normal = [0, 0, 0]
                        normal[axis] = pos[axis]
                        cells.append((pos, tuple(normal)))
    return cells


FACELETS = _facelets()
_FACELET_INDEX = {cell: i for i, cell in enumerate(FACELETS)}


def _clockwise(n, v):
    # -90 degrees about unit axis n (clockwise seen from outside): R = I - K + K^2,
    # with K v = n x v and K^2 v = n (n . v) - v
    cx = (n[1] * v[2] - n[2] * v[1], n[2] * v[0] - n[0] * v[2], n[0] * v[1] - n[1] * v[0])
    dot = n[0] * v[0] + n[1] * v[1] + n[2] * v[2]
    return tuple(n[i] * dot - cx[i] for i in range(3))


@lru_cache(maxsize=None)
def face_quarter_turn(face: str) -> tuple[int, ...]:
    """``perm[i]`` is the facelet that facelet ``i`` moves to under one clockwise turn."""
    n = _FACE_NORMAL[face]
    perm = []
    for pos, normal in FACELETS:
        if sum(a * b for a, b in zip(pos, n)) == 1:
            perm.append(_FACELET_INDEX[(_clockwise(n, pos), _clockwise(n, normal))])
        else:
            perm.append(_FACELET_INDEX[(pos, normal)])
    return tuple(perm)


def sticker_permutation(tokens) -> tuple[int, ...]:
    perm = tuple(range(len(FACELETS)))
    for face, turns in tokens:
        q = face_quarter_turn(face)
        for _ in range(turns % 4):
            perm = tuple(q[p] for p in perm)
    return perm
