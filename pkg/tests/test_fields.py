import math

import numpy as np
import pytest

from quadhecke.fields import (ALL_FIELDS, CLASS_NUMBER_ONE_D, RATIONAL,
                              GammaPoleError, UnsupportedFieldError,
                              field_constants, gamma_K)


def test_field_constants_examples():
    f = field_constants(-1)
    assert f.D_K == -4
    assert f.norm_cK == 32          # N((1+i)^5)
    assert f.n_units == 4
    f = field_constants(-7)
    assert f.D_K == -7
    assert f.c_coords == (8, 0)
    assert f.norm_cK == 64
    assert f.B_K == pytest.approx(7 * 64 / (2 * math.pi) ** 2, rel=1e-15)
    f = field_constants(RATIONAL)
    assert f.D_K == 1 and f.norm_cK == 8
    assert f.B_K == pytest.approx(8 / math.pi, rel=1e-15)


def test_discriminant_congruences_and_units():
    for d in CLASS_NUMBER_ONE_D:
        f = field_constants(d)
        if d % 4 == 1:
            assert f.D_K == d
        else:
            assert f.D_K == 4 * d
        assert f.n_units == {-1: 4, -3: 6}.get(d, 2)
        recomputed = abs(f.D_K) * f.norm_cK / (2 * math.pi) ** 2
        assert abs(recomputed - f.B_K) <= 1e-15 * f.B_K


def test_rejects_unsupported():
    with pytest.raises(UnsupportedFieldError):
        field_constants(-5)
    with pytest.raises(UnsupportedFieldError):
        field_constants(3)


def test_gamma_K_special_values():
    f1 = field_constants(-1)
    fq = field_constants(RATIONAL)
    assert gamma_K(f1, 0.5) == pytest.approx(1.0)
    assert gamma_K(fq, 0.5) == pytest.approx(1.0)
    expected = math.gamma(0.75) / math.gamma(0.25)
    assert gamma_K(f1, 0.25) == pytest.approx(expected, rel=1e-14)
    assert abs(gamma_K(f1, 0.25) - 0.337989) < 1e-6


def test_gamma_K_reflection_identity():
    rng = np.random.default_rng(11)
    for d in (-1, -7, RATIONAL):
        f = field_constants(d)
        checked = 0
        while checked < 100:
            s = complex(rng.uniform(-4, 5), rng.uniform(-8, 8))
            try:
                prod = gamma_K(f, s) * gamma_K(f, 1 - s)
            except GammaPoleError:
                continue
            if prod == 0:
                continue
            assert abs(prod - 1.0) < 1e-12
            checked += 1


def test_gamma_K_pole_signalled():
    f1 = field_constants(-1)
    with pytest.raises(GammaPoleError):
        gamma_K(f1, 2.0)         # Gamma(1-s) pole
    fq = field_constants(RATIONAL)
    with pytest.raises(GammaPoleError):
        gamma_K(fq, 3.0)         # Gamma((1-s)/2) pole
    assert gamma_K(fq, -2.0) == 0.0   # denominator pole: ratio vanishes


def test_gamma_K_stirling_growth():
    # |gamma_K(s)| <= C (1+|s|)^(c0 (1-2 Re s)) with c0 = d_K/2 on the strip
    rng = np.random.default_rng(5)
    for d in (-1, RATIONAL):
        f = field_constants(d)
        c0 = f.d_K / 2.0
        ratios = []
        for _ in range(200):
            s = complex(rng.uniform(0.05, 0.95), rng.uniform(-40, 40))
            val = abs(gamma_K(f, s))
            ratios.append(val / (1 + abs(s)) ** (c0 * (1 - 2 * s.real)))
        assert max(ratios) < 10.0


def test_residue_rK_properties():
    from quadhecke.zetas import zeta_K_vec
    for d in ALL_FIELDS:
        f = field_constants(d)
        assert f.r_K > 0
        # |(s-1) zeta_K(s) - r_K| -> 0 along the reals
        devs = []
        for h in (1e-3, 1e-4, 1e-5):
            z = zeta_K_vec(np.array([1 + h]), f)[0][0]
            devs.append(abs(h * z - f.r_K))
        assert devs[2] < devs[0] and devs[2] < 1e-4


def test_sqrtD_branch():
    f = field_constants(-7)
    assert f.sqrtD_branch == pytest.approx(1j * math.sqrt(7))
    assert field_constants(RATIONAL).sqrtD_branch == 1.0
