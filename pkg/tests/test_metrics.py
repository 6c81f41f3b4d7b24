import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svdmark.image_io import GrayImage
from svdmark.metrics import (
    DegenerateCorrelation,
    Mark,
    bit_error_rate,
    correlation,
    eqm,
    load_mark,
    psnr,
    save_mark,
)

marks = st.lists(st.integers(0, 1), min_size=64, max_size=64).filter(lambda b: 0 < sum(b) < 64)


def pearson_by_hand(w, wp):
    # term-by-term evaluation of the normalized correlation formula
    n = len(w)
    mw = sum(w) / n
    mp = sum(wp) / n
    num = sum((w[i] - mw) * (wp[i] - mp) for i in range(n))
    dw = math.sqrt(sum((w[i] - mw) ** 2 for i in range(n)))
    dp = math.sqrt(sum((wp[i] - mp) ** 2 for i in range(n)))
    return num / (dw * dp)


def test_eqm_identical(rng):
    a = GrayImage(rng.integers(0, 256, (16, 16)).astype(np.uint8))
    assert eqm(a, a) == 0.0


def test_eqm_unit_shift(rng):
    px = rng.integers(0, 255, (16, 16)).astype(np.uint8)
    assert eqm(GrayImage(px), GrayImage(px + 1)) == 1.0


def test_eqm_single_pixel():
    a = np.zeros((4, 4), np.uint8)
    b = a.copy()
    b[2, 1] = 2
    assert eqm(GrayImage(a), GrayImage(b)) == 0.25


def test_eqm_dimension_mismatch():
    with pytest.raises(ValueError):
        eqm(GrayImage(np.zeros((4, 4), np.uint8)), GrayImage(np.zeros((4, 8), np.uint8)))


def test_psnr_infinite_for_identical():
    a = GrayImage(np.full((8, 8), 9, np.uint8))
    rep = psnr(a, a)
    assert rep.psnr == math.inf and rep.eqm == 0.0


def test_psnr_closed_form():
    a = np.full((16, 16), 100, np.uint8)
    a[0, 0] = 255
    b = a.astype(int) + np.where(np.arange(256).reshape(16, 16) % 2 == 0, -1, 1)
    rep = psnr(GrayImage(a), GrayImage(b.astype(np.uint8)))
    assert rep.eqm == 1.0 and rep.peak == 255.0
    assert rep.psnr == pytest.approx(48.1308, abs=1e-3)


def test_psnr_peak_is_max_of_original():
    a = np.full((4, 4), 100, np.uint8)
    b = a.copy()
    b[0, 0] = 101
    rep = psnr(GrayImage(a), GrayImage(b))
    assert rep.peak == 100.0
    assert rep.psnr == pytest.approx(10 * math.log10(100**2 / (1 / 16)))


def test_psnr_decreases_with_error():
    a = np.full((8, 8), 255, np.uint8)
    values = []
    for k in range(1, 6):
        b = a.copy()
        b[0, :k] = 250
        values.append(psnr(GrayImage(a), GrayImage(b)).psnr)
    assert all(x > y for x, y in zip(values, values[1:]))


def test_correlation_extremes(mark):
    assert correlation(mark, mark) == 1.0
    flipped = Mark(tuple(1 - b for b in mark.bits))
    assert correlation(mark, flipped) == -1.0


def test_correlation_half_agreement_matches_hand_evaluation():
    w = [1] * 32 + [0] * 32
    # agree on 16 ones and 16 zeros, disagree elsewhere; both stay balanced
    wp = [1] * 16 + [0] * 16 + [0] * 16 + [1] * 16
    expected = pearson_by_hand(w, wp)
    assert correlation(w, wp) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.0, abs=1e-12)


def test_correlation_random_marks_match_hand_evaluation(rng):
    for _ in range(20):
        w = rng.integers(0, 2, 64).tolist()
        wp = rng.integers(0, 2, 64).tolist()
        if 0 < sum(w) < 64 and 0 < sum(wp) < 64:
            assert correlation(w, wp) == pytest.approx(pearson_by_hand(w, wp), abs=1e-12)


def test_correlation_constant_is_degenerate(mark):
    with pytest.raises(DegenerateCorrelation):
        correlation(mark, [0] * 64)


def test_correlation_length_mismatch():
    with pytest.raises(ValueError):
        correlation([0, 1, 1], [0, 1])


@settings(max_examples=100)
@given(marks, marks)
def test_correlation_symmetric_and_bounded(a, b):
    r = correlation(a, b)
    assert r == pytest.approx(correlation(b, a), abs=1e-15)
    assert -1.0 <= r <= 1.0
    if a == b:
        assert r == pytest.approx(1.0, abs=1e-12)
    else:
        assert r < 1.0 - 1e-9


def test_bit_error_rate(mark):
    bits = list(mark.bits)
    bits[0] ^= 1
    assert bit_error_rate(mark, bits) == 1 / 64


def test_mark_validation():
    with pytest.raises(ValueError):
        Mark((0, 1) * 31)
    with pytest.raises(ValueError):
        Mark((2,) + (0,) * 63)
    with pytest.raises(ValueError):
        Mark.from_string("01" * 31 + "0")
    with pytest.raises(ValueError):
        Mark.from_string("0x" * 32)


def test_mark_file_round_trip(tmp_path, mark):
    path = tmp_path / "m.txt"
    save_mark(mark, path)
    assert path.read_text() == mark.to_string() + "\n"
    assert load_mark(path) == mark
    path.write_text(mark.to_string())
    assert load_mark(path) == mark
