import os

import mpmath as mp
from hypothesis import given, settings
from hypothesis import strategies as st

from planarop.io import atomic_write, fmt_real, read_csv, write_csv


@settings(max_examples=60, deadline=None)
@given(st.integers(-(2**300), 2**300).filter(bool), st.integers(-400, 400), st.sampled_from([64, 256, 512]))
def test_fmt_real_roundtrips_exactly(man, exp, bits):
    with mp.workprec(bits):
        x = mp.ldexp(mp.mpf(man), exp)
    text = fmt_real(x)
    # the string pins x down at its own mantissa width
    with mp.workprec(max(x._mpf_[3], 53)):
        assert mp.mpf(text) == x


@settings(max_examples=40, deadline=None)
@given(st.integers(-(2**20), 2**20).filter(bool), st.integers(-30, 30), st.sampled_from([53, 256, 2048]))
def test_short_dyadics_are_written_in_full(man, exp, bits):
    x = mp.ldexp(mp.mpf(man), exp)
    with mp.workprec(bits):
        assert mp.mpf(fmt_real(x)) == x


def test_fmt_real_digits_truncates():
    assert fmt_real(mp.mpf(1) / 3, 5) == "0.33333"
    assert fmt_real(0.25) == "0.25"


def test_atomic_write_replaces(tmp_path):
    p = tmp_path / "sub" / "f.txt"
    atomic_write(p, "one")
    atomic_write(p, "two")
    assert p.read_text() == "two"
    assert [f for f in os.listdir(p.parent) if f.startswith(".tmp")] == []


def test_csv_roundtrip(tmp_path):
    text = write_csv(tmp_path / "x.csv", ["hello a=1"], ["k", "v"], [[0, "1.5"], [1, "2"]])
    header, cols, rows = read_csv(tmp_path / "x.csv")
    assert header == ["# hello a=1"] and cols == ["k", "v"] and rows == [["0", "1.5"], ["1", "2"]]
    assert read_csv(text)[2] == rows
