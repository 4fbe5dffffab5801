import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rejsamp.distance import dist_to_kjunta_exact, relevant_variables
from rejsamp.errors import CapacityError
from rejsamp.functions import (CallableFunction, TableFunction, as_table, bits_of, check_table_size, hex_to_table,
                               index_of, pad_dummy, pad_parity, read_table_hex, table_to_hex, write_table_hex)


def test_index_convention():
    assert bits_of(6, 3) == (0, 1, 1)
    assert index_of((0, 1, 1)) == 6
    f = CallableFunction(3, lambda x: x[0])
    assert list(as_table(f)) == [0, 1, 0, 1, 0, 1, 0, 1]


def test_hex_examples():
    assert table_to_hex(TableFunction(2, [0, 1, 1, 0])) == "6"
    assert table_to_hex(TableFunction(3, [1] * 8)) == "ff"
    assert table_to_hex(TableFunction(1, [0, 1])) == "2"
    assert list(hex_to_table("6")) == [0, 1, 1, 0]
    assert list(hex_to_table("2", n=1)) == [0, 1]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10).flatmap(lambda n: st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n)))
def test_hex_roundtrip(bits):
    n = len(bits).bit_length() - 1
    t = np.array(bits, dtype=np.uint8)
    assert (hex_to_table(table_to_hex(t), n) == t).all()


def test_hex_file_roundtrip(tmp_path):
    f = TableFunction(4, np.arange(16) % 3 == 0)
    write_table_hex(f, tmp_path / "f.hex")
    assert (read_table_hex(tmp_path / "f.hex").truth_table() == f.truth_table()).all()


def test_hex_rejects_garbage():
    with pytest.raises(ValueError):
        hex_to_table("abc")
    with pytest.raises(ValueError):
        hex_to_table("1f", n=2)


def test_table_cap():
    with pytest.raises(CapacityError):
        check_table_size(25)


def test_pad_examples():
    zero = TableFunction(1, [0, 0])
    g = pad_parity(zero, 1)
    assert [g((a, b)) for a in (0, 1) for b in (0, 1)] == [0, 1, 0, 1]
    assert pad_parity(zero, 0) is zero and pad_dummy(zero, 0) is zero
    x1 = TableFunction(2, [0, 1, 0, 1])
    assert relevant_variables(pad_dummy(x1, 2)) == [1]


@pytest.mark.parametrize("extra", [1, 2])
def test_pad_tables_match_calls(extra):
    f = TableFunction(3, [0, 1, 1, 0, 1, 0, 0, 1])
    for g in (pad_parity(f, extra), pad_dummy(f, extra)):
        t = g.truth_table()
        assert all(t[i] == g(bits_of(i, g.n)) for i in range(1 << g.n))


def test_pad_distance_spot():
    f = TableFunction(3, [0, 1, 1, 1, 0, 0, 0, 1])
    for k in range(3):
        d = dist_to_kjunta_exact(f, k)
        assert dist_to_kjunta_exact(pad_dummy(f, 1), k) == d
        if d < 0.5:
            assert dist_to_kjunta_exact(pad_parity(f, 1), k + 1) == d
