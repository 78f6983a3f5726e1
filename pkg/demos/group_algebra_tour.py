"""
A tour of the four group domains
================================

Every domain exposes the same four verbs: parse, combine, inverse and
render.  Elements are stored in canonical form, so equality of group
elements is plain ``==``.
"""

from algebrarium import DomainId, combine, fold_chain, identity, inverse, parse, render, solve_for_x
from algebrarium.domains import sticker_permutation

# Cipher-encoded integers.  Digits a..g are base 7, the sign is spelled out.
eh = DomainId.ENCRYPTED_HISTORY
a, b = parse(eh, "FWD(ad)"), parse(eh, "BACK(ef)")
print(a.payload, "+", b.payload, "=", render(combine(a, b)))

# Three rotor positions added modulo 26.
enigma = DomainId.ENIGMA
print(render(combine(parse(enigma, "A,C,Z"), parse(enigma, "B,B,C"))))

# Free group on two stitches: only adjacent inverse pairs cancel.
knit = DomainId.KNITTING
w = fold_chain([parse(knit, "kp"), parse(knit, "pK"), parse(knit, "kP")])
print("kp . pK . kP =", render(w))
print("inverse of kpK is", render(inverse(parse(knit, "kpK"))))

# Cube move sequences.  '#' marks a counter-clockwise quarter turn and
# opposite faces are written in a fixed order, so R L and L R agree.
cube = DomainId.RUBIKS_CUBE
print(render(parse(cube, "L R")), "|", render(parse(cube, "R L R")))
x = solve_for_x(parse(cube, "R U"), parse(cube, "R U R#"))
print("R U . x = R U R#  =>  x =", render(x))

# The rewrite rules are checked against an actual 3x3x3 sticker model:
# four quarter turns of any face restore every facelet.
print(sticker_permutation([("F", 1)] * 4) == tuple(range(48)))

# Identity elements.
for d in DomainId:
    print(f"{d.value:>17}: identity renders as {render(identity(d))!r}")
