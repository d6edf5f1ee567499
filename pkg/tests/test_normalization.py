import numpy as np
import pytest

from vpfair.kernels import binomial_raw_sum
from vpfair.normalization import BlockPermutation, OracleLimitError, brute_force_max, z_binomial, z_multinomial

import oracle


@pytest.mark.parametrize(
    "metric, expected",
    [
        ("nDD", 0.89879821011906205),
        ("nDR", 2.1309297535714574),
        ("nDKL", 1.6531765850286523),
    ],
)
def test_z_binomial_fixtures(metric, expected):
    assert z_binomial(metric, 4, 2) == pytest.approx(expected, abs=1e-12)


def test_z_ndr_protected_first_beats_protected_last():
    last = binomial_raw_sum("nDR", BlockPermutation(2, 2, protected_first=False).mask)
    assert last == pytest.approx(1.8809297535714574, abs=1e-12)
    assert z_binomial("nDR", 4, 2) > last


@pytest.mark.parametrize("metric", ["nDD", "nDR", "nDKL"])
def test_z_degenerate(metric):
    assert z_binomial(metric, 5, 0) == 0.0
    assert z_binomial(metric, 5, 5) == 0.0


def test_z_binomial_argument_checks():
    with pytest.raises(ValueError):
        z_binomial("nDJS", 4, 2)
    with pytest.raises(ValueError):
        z_binomial("nDD", 4, 5)


@pytest.mark.parametrize(
    "n, expected",
    [(1, 1.0), (2, 1.6309297535714574), (4, 2.5616063116448505)],
)
def test_z_multinomial(n, expected):
    assert z_multinomial(n) == pytest.approx(expected, abs=1e-12)
    assert z_multinomial(n) == pytest.approx(float(oracle.z_multi(n)), abs=1e-12)


def test_z_multinomial_strictly_increasing():
    values = [z_multinomial(n) for n in range(1, 200)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_block_permutation_mask():
    assert BlockPermutation(2, 3, True).mask.tolist() == [True, True, False, False, False]
    assert BlockPermutation(2, 3, False).mask.tolist() == [False, False, False, True, True]


def test_brute_force_fixture():
    best, witness = brute_force_max("nDD", {"P": 2, "U": 2})
    assert best == pytest.approx(0.89879821011906205, abs=1e-12)
    assert witness == ("P", "P", "U", "U")


def test_brute_force_single_group():
    assert brute_force_max("nDD", {"P": 1, "U": 0}) == (0.0, ("P",))


def test_brute_force_ndr_at_least_block():
    best, _ = brute_force_max("nDR", {"P": 2, "U": 2})
    assert best >= 2.1309297535714574 - 1e-12


def test_brute_force_refuses_large_n():
    with pytest.raises(OracleLimitError):
        brute_force_max("nDD", {"P": 6, "U": 5})


def _multisets(max_n):
    for n in range(1, max_n + 1):
        for s_p in range(0, n + 1):
            yield n, s_p


@pytest.mark.parametrize("metric", ["nDD", "nDKL"])
def test_block_rule_is_exact_up_to_eight(metric):
    for n, s_p in _multisets(8):
        best, _ = brute_force_max(metric, {"P": s_p, "U": n - s_p})
        assert best == pytest.approx(z_binomial(metric, n, s_p), abs=1e-9), (n, s_p)


def test_brute_force_agrees_with_mpmath_enumeration():
    for metric in ("nDD", "nDR", "nDKL"):
        for n, s_p in [(4, 2), (5, 1), (6, 4)]:
            best, _ = brute_force_max(metric, {"P": s_p, "U": n - s_p})
            assert best == pytest.approx(float(oracle.exhaustive_max(metric, n, s_p)), abs=1e-12)


def test_raw_sums_agree_with_mpmath_oracle():
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.integers(1, 12))
        mask = rng.random(n) < rng.random()
        for metric in ("nDD", "nDR", "nDKL"):
            expected = float(oracle.raw(metric, mask.astype(int).tolist())) if 0 < mask.sum() < n else 0.0
            assert binomial_raw_sum(metric, mask) == pytest.approx(expected, abs=1e-12)


def test_ndr_interleaving_exceeds_block():
    found = False
    for n, s_p in _multisets(8):
        if s_p in (0, n):
            continue
        best, witness = brute_force_max("nDR", {"P": s_p, "U": n - s_p})
        if best > z_binomial("nDR", n, s_p) + 1e-9:
            found = True
            assert witness not in (
                tuple("P" * s_p + "U" * (n - s_p)),
                tuple("U" * (n - s_p) + "P" * s_p),
            )
    assert found

