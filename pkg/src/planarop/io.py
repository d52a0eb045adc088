"""File helpers: atomic writes and lossless decimal formatting."""

from __future__ import annotations

import csv
import io
import os
import tempfile

import mpmath as mp

__all__ = ["fmt_real", "atomic_write", "write_csv", "read_csv"]


def _exact_digits(x):
    """Significant decimal digits of the exact expansion of a binary float."""
    sign, man, exp, _ = x._mpf_
    if exp >= 0:
        return len(str(man << exp).rstrip("0")) or 1
    return len(str(man * 5 ** (-exp)).rstrip("0"))


def fmt_real(x, digits=None):
    """Decimal string for a real number.

    Without ``digits`` the output reads back exactly at the number's
    mantissa width (at least 53 bits); short dyadic values are written in
    full so they read back exactly at any precision.
    """
    if isinstance(x, float):
        return repr(x) if digits is None else mp.nstr(mp.mpf(x), digits)
    x = mp.mpmathify(x)
    if x == 0:
        return "0.0"
    bits = max(int(x._mpf_[3]), 53)
    if digits is None:
        digits = int(bits * 0.30103) + 3
        exact = _exact_digits(x) if -x._mpf_[2] < 8 * bits else None
        if exact is not None and exact <= 2 * digits + 20:
            digits = exact
    # nstr rounds to the working precision first
    with mp.workprec(max(bits, int(digits * 3.33)) + 16):
        return mp.nstr(x, digits, strip_zeros=True)


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, header_lines, columns, rows):
    """Comment header lines (prefixed '# '), a column row, then data."""
    buf = io.StringIO()
    for h in header_lines:
        buf.write(h if h.startswith("#") else "# " + h)
        buf.write("\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(r)
    if path is None:
        return buf.getvalue()
    atomic_write(path, buf.getvalue())
    return buf.getvalue()


def read_csv(path_or_text):
    """Return (header lines, column names, rows as lists of strings)."""
    if os.path.exists(str(path_or_text)):
        with open(path_or_text) as fh:
            text = fh.read()
    else:
        text = path_or_text
    lines = text.splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if ln and not ln.startswith("#")]
    rows = list(csv.reader(body))
    return header, rows[0], rows[1:]
