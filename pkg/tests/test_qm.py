import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from aqm.adapt import adapt_fwm, display_parameter, exponent_field
from aqm.csf import FrequencyWeightingMatrix, build_fwm
from aqm.qm import (
    InterModelParams,
    QuantizationMatrix,
    adaptive_matrices,
    default_matrices,
    derive_inter,
    derive_qm,
    diagonal_scan,
    fit_inter_model,
    hevc_default_matrix,
    hevc_fitted_model,
    replicate,
    round_half_away,
)

# Least-squares fit of the HEVC default inter matrix on the intra one.
FITTED_SLOPE = 0.7334314094703459
FITTED_INTERCEPT = 5.154320266203126


def _aqm(width, height):
    return adaptive_matrices(display_parameter(width, height))[(8, "intra")]


def test_round_half_away():
    assert round_half_away(2.5) == 3
    assert round_half_away(-2.5) == -3
    assert round_half_away(3.5) == 4
    assert round_half_away(0.49999) == 0
    np.testing.assert_array_equal(round_half_away([0.5, 1.5, -0.5]), [1, 2, -1])


def test_derive_qm_default():
    qm = derive_qm(build_fwm())
    assert qm.kind == "intra" and qm.provenance == "default"
    np.testing.assert_array_equal(qm.values, oracles.GOLDEN_QM)
    assert qm[7, 7] == 115


def test_derive_qm_adaptive_4k():
    qm = _aqm(3840, 2160)
    np.testing.assert_array_equal(qm.values, oracles.GOLDEN_AQM_4K)
    assert qm[7, 7] == 23 and qm[0, 7] == 18
    assert qm.provenance == "adaptive"
    assert qm.geometry.width == 3840


def test_derive_qm_flat():
    qm = derive_qm(FrequencyWeightingMatrix(np.ones((8, 8))))
    assert np.all(qm.values == 16)


def test_derive_qm_scale():
    qm = derive_qm(build_fwm(), scale=32)
    assert qm[0, 0] == 32
    with pytest.raises(ValueError):
        derive_qm(build_fwm(), scale=0)


def test_hevc_default_intra_equals_golden():
    # the standard's table, unscanned from diagonal order, is the same matrix
    np.testing.assert_array_equal(hevc_default_matrix("intra"), oracles.GOLDEN_QM)


def test_hevc_default_inter_is_antidiagonal_constant():
    inter = hevc_default_matrix("inter")
    for diag in range(15):
        vals = {inter[i, diag - i] for i in range(8) if 0 <= diag - i < 8}
        assert len(vals) == 1
    assert inter[7, 7] == 91 and inter[0, 0] == 16


def test_diagonal_scan_order():
    scan = diagonal_scan(4)
    assert scan[:6] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert sorted(scan) == [(i, j) for i in range(4) for j in range(4)]


def test_fitted_inter_model_against_normal_equations():
    x = [float(v) for row in oracles.GOLDEN_QM for v in row]
    y = [float(v) for v in hevc_default_matrix("inter").ravel()]
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    slope = sum((a - mx) * (b - my) for a, b in zip(x, y)) / sum((a - mx) ** 2 for a in x)
    intercept = my - slope * mx
    model = hevc_fitted_model()
    assert model.slope == pytest.approx(slope, rel=1e-12)
    assert model.intercept == pytest.approx(intercept, rel=1e-12)
    assert model.slope == pytest.approx(FITTED_SLOPE, rel=1e-12)
    assert model.intercept == pytest.approx(FITTED_INTERCEPT, rel=1e-12)


def test_fit_recovers_exact_affine_map():
    intra = np.array(oracles.GOLDEN_QM)
    model = fit_inter_model(intra, 2 * intra + 3)
    assert model.slope == pytest.approx(2.0) and model.intercept == pytest.approx(3.0)


def test_derive_inter():
    intra = derive_qm(build_fwm())
    same = derive_inter(intra, InterModelParams(1, 0))
    assert same.kind == "inter"
    np.testing.assert_array_equal(same.values, intra.values)
    shifted = derive_inter(intra, InterModelParams(1, 4))
    assert shifted[0, 0] == 20
    fitted = derive_inter(intra, hevc_fitted_model())
    assert fitted[7, 7] == round_half_away(FITTED_SLOPE * 115 + FITTED_INTERCEPT)


def test_derive_inter_errors():
    intra = derive_qm(build_fwm())
    with pytest.raises(ValueError):
        derive_inter(intra, InterModelParams(-1, 0))
    inter = derive_inter(intra)
    with pytest.raises(ValueError):
        derive_inter(inter)


def test_replicate():
    qm8 = derive_qm(build_fwm())
    qm16 = replicate(qm8, 16)
    assert qm16.size == 16 and qm16.dc == 16
    assert np.all(qm16.values[:2, :2] == qm8[0, 0])
    assert qm16[15, 15] == 115
    for i in range(16):
        for j in range(16):
            assert qm16[i, j] == qm8[i // 2, j // 2]
    qm32 = replicate(_aqm(3840, 2160), 32)
    assert qm32[0, 31] == 18
    for i in range(32):
        for j in range(32):
            assert qm32[i, j] == oracles.GOLDEN_AQM_4K[i // 4][j // 4]
    with pytest.raises(ValueError):
        replicate(qm8, 64)
    with pytest.raises(ValueError):
        replicate(qm16, 32)


def test_matrix_sets():
    d = default_matrices()
    assert set(d) == {(s, k) for s in (8, 16, 32) for k in ("intra", "inter")}
    a = adaptive_matrices(display_parameter(1920, 1080), sizes=(8,))
    assert set(a) == {(8, "intra"), (8, "inter")}
    with pytest.raises(ValueError):
        default_matrices(sizes=(4,))


def test_quantization_matrix_validation():
    with pytest.raises(ValueError):
        QuantizationMatrix(np.full((8, 8), 0))
    with pytest.raises(ValueError):
        QuantizationMatrix(np.full((6, 6), 16))
    with pytest.raises(ValueError):
        QuantizationMatrix(np.full((8, 8), 16.5))
    with pytest.raises(ValueError):
        QuantizationMatrix(np.full((8, 8), 16), kind="chroma")
    qm = QuantizationMatrix(np.full((4, 4), 16), provenance="user")
    assert qm.size == 4 and qm.dc == 16


@pytest.mark.parametrize("width, height", oracles.GEOMETRY_GRID)
def test_grid_matches_oracle_and_dominates(width, height):
    qm = _aqm(width, height)
    np.testing.assert_array_equal(qm.values, oracles.aqm(width, height))
    default = derive_qm(build_fwm()).values
    assert np.all(qm.values <= default)
    assert qm[0, 0] == 16 and np.all(qm.values >= 16)
    assert np.array_equal(qm.values, qm.values.T)


def test_resolution_monotonicity():
    mats = [_aqm(w, h).values for w, h in oracles.GEOMETRY_GRID]
    for lo, hi in zip(mats, mats[1:]):
        assert np.all(hi <= lo)


@pytest.mark.parametrize("width, height", oracles.GEOMETRY_GRID[:-1])
def test_row_column_monotone_through_4k(width, height):
    qm = _aqm(width, height).values
    assert np.all(np.diff(qm, axis=0) >= 0)
    assert np.all(np.diff(qm, axis=1) >= 0)


def test_8k_matrix_is_not_row_monotone():
    # the unrounded 16/H' surface peaks inside the block once w is small
    qm = _aqm(7680, 4320).values
    np.testing.assert_array_equal(qm[3], [16, 16, 17, 17, 18, 18, 17, 17])
    assert qm[3, 5] > qm[3, 6]


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 65535), st.integers(1, 65535))
def test_dominance_any_geometry(width, height):
    adapted = derive_qm(adapt_fwm(build_fwm(), exponent_field(display_parameter(width, height))))
    assert np.all(adapted.values <= derive_qm(build_fwm()).values)
    assert np.all(adapted.values >= 16)
