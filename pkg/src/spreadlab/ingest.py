"""Reading and writing group-definition files.

Three line-oriented formats are understood; blank lines and ``#`` comments
are ignored everywhere.

perm-group::

    perm-group degree 5
    (0 1 2 3 4)
    images: 1 0 2 3 4

matrix-group (field elements in the integer encoding of :mod:`ffield`)::

    matrix-group
    field 2 2            # optional defining polynomial coefficients follow
    dim 4
    domain points        # optional: points | vectors
    1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1 semilinear 1

subgroup lists (generators in either perm-group notation)::

    subgroup label=P1
    (0 1)(2 3)

Group URIs ``zoo:<name>`` and ``atlas:<name>`` build constructible groups
instead of reading a file.
"""

from __future__ import annotations

import os

import numpy as np

from .ffield import FieldError, make_field
from .grpzoo import ATLAS_NAMES, MatrixAction, SemilinearMap, atlas_group, zoo_group
from .linalg import MatF
from .permcore import ParseError, Perm, PermGroup


class ValidationFailed(ValueError):
    pass


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _perm_line(line, degree, no):
    try:
        if line.startswith("images:"):
            vals = line[len("images:"):].split()
            if len(vals) != degree:
                raise ParseError(f"expected {degree} images, got {len(vals)}")
            return Perm.from_images(vals)
        return Perm.from_cycles(line, degree)
    except (ParseError, ValueError) as exc:
        raise ParseError(f"line {no}: {exc}") from None


def parse_perm_group(text, name=None):
    lines = list(_lines(text))
    if not lines:
        raise ParseError("line 1: empty group file")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or parts[:2] != ["perm-group", "degree"] or not parts[2].isdigit():
        raise ParseError(f"line {no}: expected 'perm-group degree N'")
    degree = int(parts[2])
    if not 1 <= degree <= 65535:
        raise ParseError(f"line {no}: degree out of range")
    gens = [_perm_line(line, degree, n) for n, line in lines[1:]]
    return PermGroup(gens or [Perm.identity(degree)], degree, name=name)


def format_perm_group(G):
    out = [f"perm-group degree {G.degree}"]
    for g in G.gens:
        out.append("images: " + " ".join(map(str, g.img)))
    return "\n".join(out) + "\n"


def parse_matrix_group(text, name=None):
    """Matrix generators converted to a permutation group on points or
    nonzero vectors; without a ``domain`` line, points are used when the
    group contains nontrivial scalars."""
    F = None
    n = None
    domain = None
    gens = []
    lines = list(_lines(text))
    if not lines or lines[0][1] != "matrix-group":
        raise ParseError(f"line {lines[0][0] if lines else 1}: expected 'matrix-group'")
    for no, line in lines[1:]:
        parts = line.split()
        try:
            if parts[0] == "field":
                p, f = int(parts[1]), int(parts[2])
                irred = [int(c) for c in parts[3:]] or None
                F = make_field(p, f, irred)
            elif parts[0] == "dim":
                n = int(parts[1])
            elif parts[0] == "domain":
                if parts[1] not in ("points", "vectors"):
                    raise ValueError("domain must be points or vectors")
                domain = parts[1]
            else:
                if F is None or n is None:
                    raise ValueError("field and dim must precede the matrices")
                k = 0
                if "semilinear" in parts:
                    at = parts.index("semilinear")
                    k = int(parts[at + 1])
                    parts = parts[:at]
                vals = [int(v) for v in parts]
                if len(vals) != n * n:
                    raise ValueError(f"expected {n * n} entries, got {len(vals)}")
                if any(not 0 <= v < F.q for v in vals):
                    raise ValueError("entry outside the field")
                A = MatF(F, np.array(vals, dtype=np.int64).reshape(n, n))
                gens.append(SemilinearMap(A, k))
        except (ValueError, IndexError, FieldError) as exc:
            raise ParseError(f"line {no}: {exc}") from None
    if F is None or n is None or not gens:
        raise ParseError("matrix-group file needs field, dim and generators")
    if domain is None:
        vec = _perm_image(F, n, False, gens, name)
        scalars = [MatF(F, np.diag([c] * n)) for c in range(2, F.q)]
        action = MatrixAction(F, n, False)
        central = any(vec.contains(action.perm_of(S)) for S in scalars)
        domain = "points" if central else "vectors"
        if not central:
            return vec
    return _perm_image(F, n, domain == "points", gens, name)


def _perm_image(F, n, projective, gens, name):
    action = MatrixAction(F, n, projective)
    try:
        perms = [action.perm_of(g) for g in gens]
    except ValueError as exc:
        raise ValidationFailed(str(exc)) from None
    G = PermGroup(perms, action.degree, name=name)
    G.action = action
    return G


def parse_subgroups(text, parent):
    """Subgroup blocks as :class:`~spreadlab.subfpr.SubgroupHandle` objects
    (orders recomputed; generators checked against ``parent``)."""
    from .subfpr import SubgroupHandle

    blocks = []
    for no, line in _lines(text):
        if line.startswith("subgroup"):
            rest = line[len("subgroup"):].strip()
            if not rest.startswith("label="):
                raise ParseError(f"line {no}: expected 'subgroup label=<name>'")
            blocks.append((rest[len("label="):], []))
        else:
            if not blocks:
                raise ParseError(f"line {no}: generator outside a subgroup block")
            blocks[-1][1].append(_perm_line(line, parent.degree, no))
    out = []
    for label, gens in blocks:
        gens = gens or [Perm.identity(parent.degree)]
        H = PermGroup(gens, parent.degree, name=label)
        try:
            h = SubgroupHandle(gens, parent, H.order(), label)
        except ValueError as exc:
            raise ValidationFailed(str(exc)) from None
        h._group = H
        out.append(h)
    return out


def format_subgroups(handles):
    out = []
    for h in handles:
        out.append(f"subgroup label={h.label}")
        for g in h.gens:
            out.append("images: " + " ".join(map(str, g.img)))
    return "\n".join(out) + "\n"


def load_group(ref):
    """Group from a ``zoo:``/``atlas:`` URI or a group-definition file."""
    if ref.startswith("zoo:"):
        try:
            return zoo_group(ref[4:])
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if ref.startswith("atlas:"):
        name = ref[6:]
        try:
            return atlas_group(name)
        except (KeyError, ValueError):
            raise ParseError(f"unknown atlas group {name!r}; known: {', '.join(ATLAS_NAMES)}") \
                from None
    if not os.path.exists(ref):
        raise ParseError(f"no such group file or URI: {ref}")
    with open(ref) as fh:
        text = fh.read()
    first = next((line for _, line in _lines(text)), "")
    name = os.path.basename(ref)
    if first.startswith("perm-group"):
        return parse_perm_group(text, name)
    if first.startswith("matrix-group"):
        return parse_matrix_group(text, name)
    raise ParseError(f"line 1: unknown group file type in {ref}")
