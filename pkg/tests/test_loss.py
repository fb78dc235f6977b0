import math

import pytest

from twinfock.combinat import binomial, compositions
from twinfock.fock import combine
from twinfock.loss import (
    absorption_weight,
    beamsplitter_oracle,
    loss_component,
    returned_mixture,
    split_by_environment,
)
from twinfock.states import pair_state_direct

ETAS = (0.1, 0.3, 0.5, 0.9)


def amp_diff(a, b):
    return combine([(1.0, a), (-1.0, b)]).max_abs()


def test_weight_single_photon_example():
    assert absorption_weight(1, 2, 0.5, (1, 0)) == pytest.approx(0.25, abs=1e-15)


def test_weight_lossless_channel():
    for absorbed in ((1, 0), (0, 2), (1, 1)):
        assert absorption_weight(2, 2, 1.0, absorbed) == 0.0
    assert absorption_weight(2, 2, 1.0, (0, 0)) == pytest.approx(1.0)


def test_weight_all_absorbed_sums_to_survival_complement():
    for photons in range(1, 5):
        for modes in range(1, 4):
            for eta in ETAS:
                total = sum(
                    absorption_weight(photons, modes, eta, absorbed)
                    for absorbed in compositions(photons, modes)
                )
                assert total == pytest.approx((1 - eta) ** photons, rel=1e-12)


def test_weight_validation():
    with pytest.raises(ValueError):
        absorption_weight(1, 2, 0.5, (1, 1))  # more absorbed than sent
    with pytest.raises(ValueError):
        absorption_weight(1, 2, 1.5, (0, 0))
    with pytest.raises(ValueError):
        absorption_weight(1, 2, 0.5, (1,))  # wrong arity


def test_component_nothing_absorbed():
    for eta in ETAS:
        component = loss_component(2, 2, eta, (0, 0))
        assert component.weight == pytest.approx(eta ** 2, rel=1e-12)
        assert amp_diff(component.state, pair_state_direct(2, 2)) < 1e-12


def test_component_single_photon_fully_absorbed():
    component = loss_component(1, 2, 0.7, (1, 0))
    assert len(component.state) == 1
    assert component.state.amplitude(((1, 0), (0, 0))) == pytest.approx(1.0)


def test_component_states_are_normalized():
    for photons in range(0, 5):
        for modes in range(1, 4):
            for lost in range(photons + 1):
                for absorbed in compositions(lost, modes):
                    component = loss_component(photons, modes, 0.5, absorbed)
                    assert component.state.norm() == pytest.approx(1.0, abs=1e-12)


def test_component_orthonormality():
    for photons in range(0, 5):
        for modes in range(1, 4):
            states = [c.state for c in returned_mixture(photons, modes, 0.5)]
            for i, a in enumerate(states):
                for j, b in enumerate(states):
                    target = 1.0 if i == j else 0.0
                    assert abs(a.inner(b) - target) < 1e-12


def test_mixture_completeness():
    for photons in range(0, 6):
        for modes in range(1, 5):
            for eta in ETAS:
                mixture = returned_mixture(photons, modes, eta)
                assert sum(c.weight for c in mixture) == pytest.approx(1.0, abs=1e-10)
                assert all(c.weight >= 0 for c in mixture)


def test_mixture_single_pair_example():
    mixture = returned_mixture(1, 2, 0.5)
    assert [(c.absorbed, pytest.approx(c.weight)) for c in mixture] == [
        ((0, 0), pytest.approx(0.5)),
        ((1, 0), pytest.approx(0.25)),
        ((0, 1), pytest.approx(0.25)),
    ]


def test_mixture_eta_endpoints():
    intact = returned_mixture(2, 2, 1.0)
    assert intact[0].absorbed == (0, 0)
    assert intact[0].weight == pytest.approx(1.0)
    assert all(c.weight == 0.0 for c in intact[1:])

    opaque = returned_mixture(2, 2, 0.0)
    fully_absorbed = [c for c in opaque if sum(c.absorbed) == 2]
    assert sum(c.weight for c in fully_absorbed) == pytest.approx(1.0)
    assert all(c.weight == 0.0 for c in opaque if sum(c.absorbed) < 2)


def test_total_absorbed_count_is_binomial():
    # grouping arrangements by their total reproduces per-photon coin flips
    for photons in range(0, 6):
        for modes in range(1, 5):
            for eta in (0.3, 0.7):
                mixture = returned_mixture(photons, modes, eta)
                by_total = {}
                for component in mixture:
                    total = sum(component.absorbed)
                    by_total[total] = by_total.get(total, 0.0) + component.weight
                for lost, weight in by_total.items():
                    expected = (
                        binomial(photons, lost)
                        * (eta ** (photons - lost))
                        * ((1 - eta) ** lost)
                    )
                    assert weight == pytest.approx(expected, abs=1e-12)


def test_oracle_transparent_splitter():
    oracle = beamsplitter_oracle(2, 2, 1.0)
    pair = pair_state_direct(2, 2)
    for (idler, signal, environment), amp in oracle.terms():
        assert environment == (0, 0)
        assert amp == pytest.approx(pair.amplitude((idler, signal)))
    assert len(oracle) == len(pair)


def test_oracle_single_photon_hand_expansion():
    oracle = beamsplitter_oracle(1, 2, 0.5)
    expected = math.sqrt(0.5 / 2)
    assert oracle.amplitude(((1, 0), (1, 0), (0, 0))) == pytest.approx(expected)
    assert oracle.amplitude(((1, 0), (0, 0), (1, 0))) == pytest.approx(expected)
    assert oracle.amplitude(((0, 1), (0, 1), (0, 0))) == pytest.approx(expected)
    assert oracle.amplitude(((0, 1), (0, 0), (0, 1))) == pytest.approx(expected)
    assert oracle.norm() == pytest.approx(1.0, abs=1e-12)


def test_oracle_matches_component_decomposition():
    for photons in range(0, 4):
        for modes in range(1, 4):
            for eta in (0.2, 0.5, 0.8):
                mixture = returned_mixture(photons, modes, eta)
                grouped = split_by_environment(beamsplitter_oracle(photons, modes, eta))
                by_label = {c.absorbed: c for c in grouped}
                for component in mixture:
                    other = by_label[component.absorbed]
                    assert other.weight == pytest.approx(component.weight, abs=1e-12)
                    assert amp_diff(other.state, component.state) < 1e-12


def test_split_requires_environment_register():
    with pytest.raises(ValueError):
        split_by_environment(pair_state_direct(1, 2))


def test_split_ordering_matches_mixture():
    oracle = beamsplitter_oracle(2, 3, 0.4)
    grouped = split_by_environment(oracle)
    labels = [c.absorbed for c in grouped]
    expected = [c.absorbed for c in returned_mixture(2, 3, 0.4)]
    assert labels == expected


def test_oracle_imaginary_parts_stay_tiny():
    oracle = beamsplitter_oracle(3, 2, 0.3)
    for _, amp in oracle.terms():
        assert abs(amp.imag) < 1e-14
