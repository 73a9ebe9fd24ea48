import pytest

from spreadlab.ffield import make_field
from spreadlab.grpzoo import symplectic_generators
from spreadlab.ingest import (ValidationFailed, format_perm_group, format_subgroups, load_group,
                              parse_matrix_group, parse_perm_group, parse_subgroups)
from spreadlab.permcore import ParseError, Perm

A5_TEXT = """\
# alternating group on five points
perm-group degree 5
(0 1 2)
images: 1 2 3 4 0
"""


def _matrix_text(m, p, domain=None):
    F = make_field(p)
    lines = ["matrix-group", f"field {p} 1", f"dim {2 * m}"]
    if domain:
        lines.append(f"domain {domain}")
    for A in symplectic_generators(m, F):
        lines.append(" ".join(str(int(v)) for v in A.a.ravel()))
    return "\n".join(lines) + "\n"


def test_perm_group_file(tmp_path):
    G = parse_perm_group(A5_TEXT)
    assert G.order() == 60 and G.degree == 5
    path = tmp_path / "a5.grp"
    path.write_text(format_perm_group(G))
    H = load_group(str(path))
    assert H.order() == 60
    assert [g.img for g in H.gens] == [g.img for g in G.gens]


def test_matrix_group_file(tmp_path):
    path = tmp_path / "sp42.grp"
    path.write_text(_matrix_text(2, 2))
    G = load_group(str(path))
    assert G.order() == 720 and G.degree == 15


def test_matrix_group_domain_choice():
    # Sp4(3) contains -1, so the default domain is projective points
    assert parse_matrix_group(_matrix_text(2, 3)).degree == 40
    assert parse_matrix_group(_matrix_text(2, 3, "vectors")).degree == 80


@pytest.mark.parametrize("text,line", [
    ("perm-group degree 5\n(0 1 2)\n(0 1 9)\n", 3),
    ("perm-group degree 5\n\n# note\nimages: 0 1 2\n", 4),
    ("perm-group degree 5\n(0 1 1)\n", 2),
    ("perm-group 5\n", 1),
])
def test_perm_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError, match=f"line {line}:"):
        parse_perm_group(text)


def test_matrix_parse_errors():
    with pytest.raises(ParseError, match="line 3:"):
        parse_matrix_group("matrix-group\nfield 2 1\ndim x\n")
    with pytest.raises(ParseError, match="line 4:"):
        parse_matrix_group("matrix-group\nfield 2 1\ndim 2\n1 0 0 2\n")
    with pytest.raises(ParseError, match="line 4:"):
        parse_matrix_group("matrix-group\nfield 2 1\ndim 2\n1 0 0\n")
    # singular generator
    with pytest.raises(ValidationFailed):
        parse_matrix_group("matrix-group\nfield 2 1\ndim 2\n1 1 1 1\n")


def test_unknown_refs():
    with pytest.raises(ParseError):
        load_group("zoo:nonsense")
    with pytest.raises(ParseError):
        load_group("atlas:nonsense")
    with pytest.raises(ParseError):
        load_group("/nonexistent/file.grp")


def test_subgroup_round_trip():
    G = load_group("atlas:A5")
    text = "subgroup label=A4\n(0 1 2)\n(1 2 3)\nsubgroup label=D10\n(0 1 2 3 4)\n(1 4)(2 3)\n"
    hs = parse_subgroups(text, G)
    assert [(h.label, h.order) for h in hs] == [("A4", 12), ("D10", 10)]
    again = parse_subgroups(format_subgroups(hs), G)
    assert [(h.label, h.order) for h in again] == [("A4", 12), ("D10", 10)]


def test_subgroup_not_contained():
    G = load_group("atlas:A5")
    with pytest.raises(ValidationFailed):
        parse_subgroups("subgroup label=bad\n(0 1)\n", G)
    with pytest.raises(ParseError, match="line 1:"):
        parse_subgroups("(0 1 2)\n", G)
