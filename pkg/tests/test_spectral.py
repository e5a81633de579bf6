from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from gjmslab.spectral import (SphereSpectrum, _hurwitz_em, compare_residue, multiplicity, sphere_volume, zeta,
                              zeta_residue_at_1)


@given(st.integers(2, 8), st.integers(0, 60))
def test_multiplicity_polynomial_is_exact(n, l):
    spec = SphereSpectrum(n, 1, l_max=200)
    nu = Fraction(2 * l + n - 1, 2)
    assert sum(b * nu ** r for r, b in spec.multiplicity_poly().items()) == multiplicity(n, l)


def test_multiplicities():
    assert [multiplicity(2, l) for l in range(4)] == [1, 3, 5, 7]
    assert [multiplicity(3, l) for l in range(4)] == [1, 4, 9, 16]
    assert sphere_volume(2) == pytest.approx(4 * np.pi)


@given(st.integers(2, 7), st.integers(1, 3), st.integers(0, 30))
def test_eigenvalue_factorization(n, k, l):
    spec = SphereSpectrum(n, k, l_max=200)
    nu = l + (n - 1) / 2
    want = np.prod([nu * nu - (j - 0.5) ** 2 for j in range(1, k + 1)])
    assert spec.eigenvalue(l) == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_excluded_modes():
    assert [m[0] for m in SphereSpectrum(2, 1).excluded_modes()] == [0]
    assert [m[0] for m in SphereSpectrum(4, 2).excluded_modes()] == [0]
    assert SphereSpectrum(6, 1).excluded_modes() == []


def test_hurwitz_em_against_mpmath():
    with mpmath.workdps(30):
        for s in (1.7, 2.5, 4.0):
            assert float(_hurwitz_em(mpmath.mpf(s), mpmath.mpf(200.5))) == pytest.approx(
                float(mpmath.zeta(s, 200.5)), rel=1e-14)


def test_zeta_continuation_matches_direct_sum():
    # for Re s large the series converges and the tail is small
    spec = SphereSpectrum(2, 1, l_max=300)
    direct = float(sum(multiplicity(2, l) * float(spec.eigenvalue(l)) ** -3.0 for l in range(1, 20000)))
    assert float(zeta(spec, 3.0)) == pytest.approx(direct, rel=1e-9)


def test_zeta_independent_of_cutoff():
    spec = SphereSpectrum(4, 1, l_max=300)
    assert float(zeta(spec, 1.3, 300)) == pytest.approx(float(zeta(spec, 1.3, 600)), rel=1e-10)


def test_residue_s2():
    r = zeta_residue_at_1(SphereSpectrum(2, 1, l_max=400))
    assert r.residue == pytest.approx(1.0, abs=1e-6)
    assert r.converged
    assert r.excluded[0][0] == 0


def test_compare_residue_zero_target():
    c = compare_residue(6, 3, l_max=400)
    assert c.geometric_side == pytest.approx(1 / 60, rel=1e-12)
    assert c.spectral_side == pytest.approx(1 / 60, rel=1e-6)


def test_input_validation():
    with pytest.raises(ValueError):
        SphereSpectrum(1, 1)
    with pytest.raises(ValueError):
        zeta_residue_at_1(SphereSpectrum(2, 1, l_max=100))
    with pytest.raises(ValueError):
        zeta(SphereSpectrum(2, 1, lam=2.0), 1.5)
