import numpy as np
import pytest

from holoforge.errors import GeometryError
from holoforge.tiling import (
    build_layout,
    check_hyperbolic,
    closed_form_eigenvalues,
    count_physical,
    count_physical_closed_form,
    growth_matrix,
    layer_counts,
    layer_frequencies,
    physical_sequence,
    ttn_saving,
)


def test_qrm_steane_boundary_sequence():
    assert physical_sequence(16, 8, 5) == [15, 105, 1335, 8625, 109455, 707145]


def test_layout_count_matches_sequence():
    for q1, q2 in ((16, 8), (8, 16), (6, 8)):
        for depth in range(4):
            assert count_physical(build_layout(q1, q2, depth)) == physical_sequence(q1, q2, depth)[-1]


def test_closed_forms_are_exact_integers():
    seq = physical_sequence(16, 8, 18)
    centre = [count_physical_closed_form(16, 8, i, "center") for i in range(1, 9)]
    mid = [count_physical_closed_form(16, 8, i, "intermediate") for i in range(1, 9)]
    assert centre == seq[2::2][:8]
    assert mid == seq[3::2][:8]
    assert all(isinstance(v, int) for v in centre + mid)


def test_eigenvalues_match_closed_form():
    lam = growth_matrix(16, 8).eigenvalues()
    assert lam[0] == pytest.approx(41 + 4 * np.sqrt(105), abs=1e-9)
    assert lam[1] == pytest.approx(41 - 4 * np.sqrt(105), abs=1e-9)
    assert closed_form_eigenvalues(16, 8) == pytest.approx(lam, abs=1e-9)


def test_ratio_converges_to_leading_eigenvalue():
    seq = physical_sequence(16, 8, 10)
    lam = growth_matrix(16, 8).eigenvalues()[0]
    assert abs(seq[10] / seq[8] / lam - 1) < 0.01


def test_tree_saving_after_two_double_layers():
    assert physical_sequence(16, 8, 3, mode="ttn")[-1] == 11025
    assert ttn_saving(16, 8, 3) == pytest.approx(1 - 8625 / 11025)


def test_second_layer_frequencies():
    freqs = layer_frequencies(build_layout(16, 8, 2))
    assert freqs[1] == pytest.approx((1.0, 0.0))
    assert freqs[2] == pytest.approx((75 / 90, 15 / 90))


def test_deep_frequencies_approach_perron_vector():
    counts = layer_counts(16, 8, 12)
    na, nb = counts[-1]
    assert na / (na + nb) == pytest.approx(growth_matrix(8, 16).perron_fractions()[0], rel=1e-6) or \
        na / (na + nb) == pytest.approx(growth_matrix(16, 8).perron_fractions()[0], rel=1e-6)


def test_non_hyperbolic_rejected():
    with pytest.raises(GeometryError):
        check_hyperbolic(4, 4)
    with pytest.raises(GeometryError):
        check_hyperbolic(16, 8, p=6)
