import math

import numpy as np
import pytest

from magsteklov.boundary import make_flat_cylinder
from magsteklov.errors import InvalidGeometryError, PreconditionError
from magsteklov.oracles import (
    CylinderModel,
    DiskFluxModel,
    ab_disk_spectrum,
    circle_laplacian_eigs,
    constant_A_exact_spectrum,
    cylinder_spectrum,
)
from magsteklov.recovery import match_close
from magsteklov.spectrum import SpectrumSeq, merge_spectra

TANH_1 = 0.7615941559557649
COTH_1 = 1.3130352854993312


def test_cylinder_first_mode():
    seq = cylinder_spectrum(CylinderModel(1.0, 0.0), 1)
    vals = seq.values[seq.index == 1]
    assert vals.tolist() == [pytest.approx(TANH_1, abs=1e-15), pytest.approx(COTH_1, abs=1e-15)]


def test_cylinder_mode_is_exponentially_close_to_its_frequency():
    seq = cylinder_spectrum(CylinderModel(1.0, 0.3), 20)
    x = 15.3
    remainder = 2 * x * math.exp(-2 * x) * 1.001
    for v in seq.values[seq.index == 15]:
        assert abs(v - x) <= remainder


def test_cylinder_count_and_zero_mode():
    assert len(cylinder_spectrum(CylinderModel(1.0, 0.3), 50)) == 202
    seq = cylinder_spectrum(CylinderModel(2.0, 1.0), 3)
    assert 0.0 in seq.values.tolist() and 0.5 in seq.values.tolist()


def test_cylinder_is_large_argument_safe():
    seq = cylinder_spectrum(CylinderModel(50.0, 0.3), 400)
    assert np.all(np.isfinite(seq.values))


def test_ab_disk():
    assert ab_disk_spectrum(DiskFluxModel(0.3), 2).values.tolist() == pytest.approx([0.3, 0.7, 1.3, 1.7, 2.3])
    assert ab_disk_spectrum(DiskFluxModel(0.5), 1).values.tolist() == pytest.approx([0.5, 0.5, 1.5])
    with pytest.raises(PreconditionError):
        DiskFluxModel(0.7)


def test_circle_laplacian():
    eigs = circle_laplacian_eigs(0.3, 3)
    assert eigs[3 + 3] == pytest.approx(10.89)
    assert circle_laplacian_eigs(0.0, 3)[6] == 9.0
    assert circle_laplacian_eigs(0.5, 0)[0] == 0.25
    assert circle_laplacian_eigs(0.3, 1)[0] == pytest.approx(0.49)


def test_constant_potential_spectrum_matches_cylinder():
    exact = constant_A_exact_spectrum(make_flat_cylinder(1.0, 0.3), 60).below(55)
    oracle = cylinder_spectrum(CylinderModel(1.0, 0.3), 60).below(55)
    rep = match_close(exact, oracle, schedule=lambda x: 4 * x * math.exp(-2 * x) + 1e-13)
    assert rep.consistent
    assert (rep.head_x, rep.head_y) == (0, 2)


def test_constant_potential_spectrum_rejects_variable_data(rng):
    from magsteklov.boundary import SurfaceBoundary, random_component

    with pytest.raises(PreconditionError):
        constant_A_exact_spectrum(SurfaceBoundary((random_component(rng),)), 5)


def test_spectrum_sorting_carries_labels():
    s = SpectrumSeq.from_values([3.0, 1.0, 2.0], [30, 10, 20], ["c", "a", "b"])
    assert s.values.tolist() == [1, 2, 3]
    assert s.index.tolist() == [10, 20, 30] and s.labels == ("a", "b", "c")


def test_spectrum_must_be_sorted():
    with pytest.raises(ValueError):
        SpectrumSeq(np.array([2.0, 1.0]), np.array([1, 2]), ("", ""))


def test_merge_examples():
    a = SpectrumSeq.from_values([1, 2, 3])
    b = SpectrumSeq.from_values([1.5, 2.5])
    assert merge_spectra([a, b]).values.tolist() == [1, 1.5, 2, 2.5, 3]
    assert merge_spectra([a, a]).values.tolist() == [1, 1, 2, 2, 3, 3]


def test_csv_round_trip_keeps_twelve_digits(tmp_path):
    s = SpectrumSeq.from_values([math.pi, math.e], [1, -1], "N1")
    s.to_csv(tmp_path / "s.csv")
    back = SpectrumSeq.from_csv(tmp_path / "s.csv")
    assert back.values.tolist() == pytest.approx([math.e, math.pi], rel=1e-12)
    assert back.labels == ("N1", "N1") and back.index.tolist() == [-1, 1]
    assert "3.14159265359," in (tmp_path / "s.csv").read_text()
