import pytest

from melonforge.chains import (
    BROKEN,
    UNBROKEN_DISTINCT,
    ChainKind,
    SchemeBuilder,
)
from melonforge.graphs import validate


def square_graph(dim=3, q=1, root=(0, 0)):
    """Two vertex pairs: colors 0..D-q-1 matched straight, the rest swapped."""
    straight = [[0, 1]] * (dim - q)
    swapped = [[1, 0]] * (q + 1)
    return validate(dim, 2, straight + swapped, root=root)


def lollipop_scheme(dim=3, loop_kind=None, arm_kind=None):
    """Root melon, chain arm, junction dipole, loop chain."""
    b = SchemeBuilder(dim)
    rm = b.add_pair([c for c in range(dim + 1) if c != 1])
    arm = b.add_chain_vertex(arm_kind or ChainKind(BROKEN, 1, 0))
    dp = b.add_pair([c for c in range(dim + 1) if c not in (0, 2, 3)])
    loop = b.add_chain_vertex(loop_kind or ChainKind(UNBROKEN_DISTINCT, 2, 3))
    b.connect(("b", rm, 1), ("cv", arm, "lw"))
    b.connect(("w", rm, 1), ("cv", arm, "lb"))
    b.connect(("b", dp, 0), ("cv", arm, "rw"))
    b.connect(("w", dp, 0), ("cv", arm, "rb"))
    b.connect(("b", dp, 2), ("cv", loop, "lw"))
    b.connect(("w", dp, 2), ("cv", loop, "lb"))
    b.connect(("b", dp, 3), ("cv", loop, "rw"))
    b.connect(("w", dp, 3), ("cv", loop, "rb"))
    b.set_root(rm, 0)
    return b.build()


@pytest.fixture
def square3():
    return square_graph(3)


@pytest.fixture
def square4():
    return square_graph(4)
