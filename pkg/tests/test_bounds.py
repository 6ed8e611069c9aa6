import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eurlab.bounds import (
    amplitudes_to_params,
    certify_tightness,
    maassen_uffink,
    multi_observable_bound,
    params_to_amplitudes,
    scenario_bounds,
)
from eurlab.entropy import joint_entropy
from eurlab.errors import DomainError
from eurlab.observables import bases_from_names, mub_set, standard_bases
from eurlab.states import random_pure

ZXY = bases_from_names(2, "Z,X,Y")


def test_maassen_uffink_examples():
    z, x = ZXY[:2]
    mu = maassen_uffink(z, x)
    assert mu.value == pytest.approx(1.0, abs=1e-12)
    assert (mu.tight, mu.provenance) == (True, "maassen_uffink")
    assert maassen_uffink(z, z).value == 0.0
    mu4 = maassen_uffink(standard_bases(4, "computational"), standard_bases(4, "fourier"))
    assert mu4.value == pytest.approx(2.0, abs=1e-12) and mu4.tight


def test_registry_values():
    b = multi_observable_bound(ZXY)
    assert (b.value, b.tight, b.provenance) == (2.0, True, "registry_qubit3")
    b = multi_observable_bound(mub_set(3, 4))
    assert (b.value, b.tight, b.provenance) == (4.0, True, "registry_qutrit4")
    assert multi_observable_bound(mub_set(3, 3)).value == 3.0
    assert multi_observable_bound(ZXY[:2]).value == pytest.approx(1.0, abs=1e-12)


def test_composition_fallback():
    # 6 MUBs in d = 5: each pair gives log2 5, composition is 15 log2 5 / 5
    b = multi_observable_bound(mub_set(5, 6))
    assert b.value == pytest.approx(3 * np.log2(5), abs=1e-12)
    assert b.provenance == "pairwise_composition" and not b.tight


def test_ballester_wehner_square_dimension():
    c, f = standard_bases(4, "computational"), standard_bases(4, "fourier")
    b = multi_observable_bound([c, f])
    assert b.value == pytest.approx(2.0, abs=1e-12) and b.tight


def test_bound_needs_two_bases():
    with pytest.raises(DomainError):
        multi_observable_bound(ZXY[:1])


def test_permutation_invariance():
    for bases in (ZXY, mub_set(3, 4), mub_set(5, 4)):
        ref = multi_observable_bound(bases)
        for perm in itertools.permutations(bases):
            assert multi_observable_bound(list(perm)) == ref


def test_bounds_hold_on_random_states():
    rng = np.random.default_rng(2024)
    cases = [(2, ZXY), (3, mub_set(3, 3)), (3, mub_set(3, 4)), (5, mub_set(5, 6))]
    for d, bases in cases:
        f = multi_observable_bound(bases).value
        worst = min(
            sum(joint_entropy(psi, [b]) for b in bases)
            for psi in (random_pure((d,), rng) for _ in range(250))
        )
        assert worst >= f - 1e-9


def test_scenario_bounds_examples():
    sb = scenario_bounds([ZXY, ZXY])
    assert (sb.F1, sb.F2, sb.F1_tight, sb.F2_tight) == (2.0, 3.0, True, True)
    sb = scenario_bounds([ZXY[:2]] * 3)
    assert sb.F1 == pytest.approx(1.0, abs=1e-12) and sb.F2 == pytest.approx(2.0, abs=1e-12)
    assert sb.F2_tight
    sb = scenario_bounds([mub_set(3, 3)] * 2)
    assert sb.F1 == 3.0 and not sb.F2_tight
    assert sb.F1 <= sb.F2 <= 2 * sb.F1


def test_scenario_bounds_mismatch():
    with pytest.raises(DomainError):
        scenario_bounds([ZXY, [ZXY[1], ZXY[0], ZXY[2]]])


def test_pair_bound_holds_on_random_two_site_states():
    rng = np.random.default_rng(7)
    for d, bases in ((2, ZXY), (3, mub_set(3, 3))):
        f2 = scenario_bounds([bases, bases]).F2
        for _ in range(300):
            psi = random_pure((d, d), rng)
            assert sum(joint_entropy(psi, [b, b]) for b in bases) >= f2 - 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.integers(0, 2**31))
def test_parameterization_round_trip(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    back = params_to_amplitudes(amplitudes_to_params(v), dim)
    assert abs(np.linalg.norm(back) - 1) <= 1e-12
    assert abs(abs(np.vdot(back, v)) - 1) <= 1e-12


def test_certify_qubit_paulis():
    cert = certify_tightness([ZXY], 2.0, restarts=16, seed=1)
    assert cert.min_found == pytest.approx(2.0, abs=1e-4)
    assert abs(cert.gap) <= 1e-4
    # minimizer is an eigenstate of one of the Paulis
    v = cert.argmin.amplitudes
    assert max(np.max(np.abs(b.vectors.conj().T @ v)) for b in ZXY) == pytest.approx(1.0, abs=1e-3)


def test_certify_is_deterministic():
    a = certify_tightness([ZXY[:2]], 1.0, restarts=4, seed=3)
    b = certify_tightness([ZXY[:2]], 1.0, restarts=4, seed=3)
    assert a.min_found == b.min_found
    np.testing.assert_array_equal(a.argmin.amplitudes, b.argmin.amplitudes)


def test_certify_rejects_bad_restarts():
    with pytest.raises(DomainError):
        certify_tightness([ZXY], 2.0, restarts=0)
