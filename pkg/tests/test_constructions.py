import pytest

from finpack.constructions import (
    CONSTRUCTIONS,
    energy_extremal_family,
    line_transporter,
    mult_subgroup,
    obs1_config,
    obs2_config,
    obs3_config,
    obs4_config,
    obs5_config,
    primitive_root,
    prop11_sharpness,
    prop13_extremal,
)
from finpack.errors import NotADivisor, NotOriginLine
from finpack.fp_core import Line, field_new
from finpack.groups import SL2


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_primitive_root(p):
    g = primitive_root(p)
    assert len({pow(g, k, p) for k in range(p - 1)}) == p - 1


def test_mult_subgroup():
    assert mult_subgroup(13, 3) == sorted({1, 3, 9})
    with pytest.raises(NotADivisor):
        mult_subgroup(13, 5)


def test_obs1():
    cfg = obs1_config(13, 3, 12)
    assert cfg.actual["|S(E)|"] == 12 and cfg.actual["|S|"] == 48 and cfg.actual["|E|"] == 3
    assert cfg.actual["|S(E)|"] ** 2 == cfg.actual["|S|"] * cfg.actual["|E|"]
    with pytest.raises(NotADivisor):
        obs1_config(13, 4, 6)


def test_obs2():
    cfg = obs2_config(7, 3)
    assert cfg.actual["|S(E)|"] == 3 * 6 + 1
    with pytest.raises(ValueError):
        obs2_config(7, 9)


def test_line_transporter():
    ctx = field_new(5)
    S = line_transporter(ctx, (1, 0), (0, 1))
    assert len(S) == 20 and S.kind == SL2
    assert len(line_transporter(ctx, Line.make(ctx, 0, 1, 0), (1, 1))) == 20
    with pytest.raises(NotOriginLine):
        line_transporter(ctx, Line.make(ctx, 0, 1, 1), (1, 1))
    with pytest.raises(NotOriginLine):
        line_transporter(ctx, (0, 0), (1, 1))


def test_energy_family_size():
    assert len(energy_extremal_family(7)) == 36


def test_prop11_and_prop13():
    assert prop11_sharpness(7, 3).actual["|S(E)|"] <= 21
    assert prop13_extremal(5).actual["|S(E)|"] == 24
    assert prop13_extremal(5, 2).actual["k2"] == 2


def test_heisenberg_configs():
    assert obs3_config(5, [1, 2]).actual["|X(E)|"] == 50
    assert obs4_config(5, [0, 1]).actual["|X(E)|"] <= 50
    cfg = obs5_config(5, [0, 1])
    assert cfg.actual["|X(E)|"] <= 2 * 10


def test_manifest():
    m = CONSTRUCTIONS["obs3"](3, [1]).manifest()
    assert m["id"] == "obs3" and m["sets"]["X"]["size"] == 27
    assert m["expected"]["|X(E)|"]["value"] == 9
