import pytest
from hypothesis import given

from finpack.errors import ParseError
from finpack.fp_core import loads_point_set, dumps_point_set, read_point_set, write_point_set
from finpack.groups import H1_MATRIX, dumps_matrix_set, enumerate_h1, loads_matrix_set, read_matrix_set, write_matrix_set
from finpack.incidence_sl2 import loads_weighted

from conftest import point_sets, sl2_sets


@given(point_sets(max_size=15))
def test_point_roundtrip(E):
    assert loads_point_set(dumps_point_set(E)) == E


@given(sl2_sets(7, max_size=15))
def test_matrix_roundtrip(S):
    assert loads_matrix_set(dumps_matrix_set(S)) == S


def test_files(tmp_path):
    X = enumerate_h1(3)
    write_matrix_set(X, tmp_path / "x.txt")
    assert read_matrix_set(tmp_path / "x.txt") == X
    assert read_matrix_set(tmp_path / "x.txt").kind == H1_MATRIX
    E = loads_point_set("p=5 dim=3\n# comment\n1,2,3\n\n4,4,4\n")
    write_point_set(E, tmp_path / "e.txt")
    assert read_point_set(tmp_path / "e.txt") == E


@pytest.mark.parametrize("text", [
    "",
    "dim=2\n1,2\n",
    "p=5 dim=4\n1,2\n",
    "p=5 dim=2\n1,2,3\n",
    "p=5 dim=2\n1,9\n",
    "p=5 dim=2\n1,x\n",
    "p=4 dim=2\n1,1\n",
    "p=5 dim\n",
])
def test_bad_point_files(text):
    with pytest.raises((ParseError, ValueError)):
        loads_point_set(text)


@pytest.mark.parametrize("text", [
    "p=5 group=gl2\n1,0,0,1\n",
    "p=5 group=sl2\n1,1,1,1\n",
    "p=5 group=sl2\n1,0,0\n",
])
def test_bad_matrix_files(text):
    with pytest.raises(ParseError):
        loads_matrix_set(text)


def test_weighted_files():
    kind, ctx, P = loads_weighted("p=5 kind=points\n1,2,3\n1,2\n0,0\n")
    assert kind == "points" and P[(1, 2)] == 4 and P.total == 5
    kind, ctx, L = loads_weighted("p=5 kind=lines\n1,1,3\n2,2,1,2\n")
    assert len(L) == 1 and L.total == 3
    for bad in ("p=5 kind=planes\n", "p=5 kind=points\n1,2,0\n", "p=5 kind=lines\n0,0,1\n"):
        with pytest.raises(ParseError):
            loads_weighted(bad)
