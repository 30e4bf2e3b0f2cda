import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from probtele import numerics as nx
from probtele.channel import QuantumChannel, faithful_probability
from probtele.errors import UnsupportedDimensionError, ValidationError
from probtele.eta_search import (
    IDENTITY_PARAMS,
    ROTATION_PARAMS,
    CaseLabel,
    ChannelShape2,
    SearchConfig,
    UnitaryParams,
    certify_eta,
    classify_pair,
    p_max,
    pair_function,
    search_orthogonal,
    search_third,
)
from probtele.measurement import synthesize_basis
from probtele.simulator import PureState, run_protocol

from .conftest import WORKED_Q, U_ROT, random_channel

SHAPE = ChannelShape2(0.6, 0.8)
angles = st.floats(0.0, 2 * math.pi, allow_nan=False)
gs = st.one_of(st.floats(0.05, 0.95), st.floats(1.05, 20.0))


class TestParams:
    def test_named_params(self):
        np.testing.assert_array_equal(IDENTITY_PARAMS.matrix(), np.eye(2))
        np.testing.assert_allclose(ROTATION_PARAMS.matrix(), U_ROT, atol=1e-15)

    @given(angles, angles, angles, st.floats(0.0, math.pi / 2))
    def test_from_matrix_round_trip(self, phi, alpha, beta, theta):
        u = UnitaryParams(phi, alpha, beta, theta).matrix()
        assert nx.is_unitary(u)
        back = UnitaryParams.from_matrix(u).matrix()
        assert nx.max_abs(back - u) <= 1e-12

    def test_from_matrix_rejects(self):
        with pytest.raises(UnsupportedDimensionError):
            UnitaryParams.from_matrix(np.eye(3))
        with pytest.raises(ValidationError):
            UnitaryParams.from_matrix(2 * np.eye(2))


class TestShape:
    def test_normalizes(self):
        s = ChannelShape2(3, 4)
        assert (s.q0, s.q1) == pytest.approx((0.6, 0.8))
        assert s.g == pytest.approx(16 / 9)

    def test_near_maximal_is_not_maximal(self):
        # (0.7070, 0.7072) is off by 2.8e-4 in g; not within the maximal tolerance
        assert not ChannelShape2(0.7070, 0.7072).is_maximal
        assert ChannelShape2(1, 1).is_maximal

    def test_rejects_zero(self):
        with pytest.raises(ValidationError):
            ChannelShape2(1.0, 0.0)

    def test_from_channel(self):
        s = ChannelShape2.from_channel(QuantumChannel(WORKED_Q))
        assert (s.q0, s.q1) == pytest.approx((0.8, 0.6), abs=1e-12)
        with pytest.raises(UnsupportedDimensionError):
            ChannelShape2.from_channel(QuantumChannel.maximally_entangled(3))


class TestPairFunction:
    def test_diagonal_is_inverse_probability(self):
        for a in (IDENTITY_PARAMS, UnitaryParams(0.3, 1.1, 2.0, 0.7)):
            v = pair_function(a, a, SHAPE)
            assert v == pytest.approx(1 / 0.36 + 1 / 0.64, abs=1e-12)
            assert v.real == pytest.approx(1 / faithful_probability(QuantumChannel.diagonal([0.6, 0.8])), abs=1e-12)

    def test_case_examples_vanish(self):
        assert abs(pair_function(UnitaryParams(theta=math.pi / 2), IDENTITY_PARAMS, SHAPE)) <= 1e-12
        a = UnitaryParams(alpha=0.4, beta=1.2, theta=0.3)
        b = UnitaryParams(alpha=0.4 + math.pi, beta=1.2, theta=math.pi / 2 - 0.3)
        assert abs(pair_function(a, b, SHAPE)) <= 1e-12

    def test_matches_measurement_overlap(self, rng):
        # |pair_function| is proportional to the overlap of the synthesized operators
        from probtele.measurement import overlap, synthesize_faithful

        ch = QuantumChannel.diagonal([0.6, 0.8])
        p = faithful_probability(ch)
        for _ in range(5):
            a = UnitaryParams(*rng.uniform(0, 2 * math.pi, 4))
            b = UnitaryParams(*rng.uniform(0, 2 * math.pi, 4))
            ov = overlap(synthesize_faithful(ch, a.matrix()), synthesize_faithful(ch, b.matrix()))
            assert abs(ov) == pytest.approx(p * abs(pair_function(a, b, SHAPE)), abs=1e-12)


class TestClassify:
    def test_examples(self):
        assert classify_pair(UnitaryParams(theta=math.pi / 2), IDENTITY_PARAMS) is CaseLabel.CASE1
        assert classify_pair(IDENTITY_PARAMS, ROTATION_PARAMS) is CaseLabel.CASE2
        a = UnitaryParams(theta=0.3)
        b = UnitaryParams(alpha=math.pi, theta=math.pi / 2 - 0.3)
        assert classify_pair(a, b) is CaseLabel.CASE3
        assert classify_pair(IDENTITY_PARAMS, IDENTITY_PARAMS, shape=SHAPE) is CaseLabel.NOT_ORTHOGONAL

    def test_case4(self):
        a = UnitaryParams(alpha=0.3, beta=0.5, theta=math.pi / 4)
        b = UnitaryParams(alpha=1.3, beta=-0.5, theta=-math.pi / 4)
        assert classify_pair(a, b, shape=SHAPE) is CaseLabel.CASE4
        # equal alpha and beta offsets are not a solution unless the offset is 0 or pi
        b = UnitaryParams(alpha=1.3, beta=1.5, theta=-math.pi / 4)
        assert abs(pair_function(a, b, SHAPE)) > 0.1
        assert classify_pair(a, b) is CaseLabel.NOT_ORTHOGONAL

    @settings(max_examples=60)
    @given(gs, angles, angles, st.floats(0.05, math.pi / 2 - 0.05), angles, st.booleans())
    def test_constructed_solutions_vanish(self, g, alpha, beta, theta, d_alpha, case3):
        a = UnitaryParams(alpha=alpha, beta=beta, theta=theta)
        if case3:
            b = UnitaryParams(alpha=alpha + d_alpha, beta=beta + math.pi - d_alpha, theta=math.pi / 2 - theta)
        else:
            b = UnitaryParams(alpha=alpha + d_alpha, beta=beta - d_alpha, theta=theta - math.pi / 2)
        shape = ChannelShape2.from_g(g)
        assert abs(pair_function(a, b, shape)) <= 1e-9
        assert classify_pair(a, b, shape=shape) is (CaseLabel.CASE3 if case3 else CaseLabel.CASE4)

    @settings(max_examples=100)
    @given(gs, st.tuples(angles, angles, angles, angles), st.tuples(angles, angles, angles, angles))
    def test_label_agrees_with_pair_function(self, g, pa, pb):
        shape = ChannelShape2.from_g(g)
        a, b = UnitaryParams(*pa), UnitaryParams(*pb)
        label = classify_pair(a, b, shape=shape)
        assert (label is CaseLabel.NOT_ORTHOGONAL) == (abs(pair_function(a, b, shape)) > 1e-9)


class TestSearch:
    def test_no_third_for_partial(self):
        res = search_third(IDENTITY_PARAMS, ROTATION_PARAMS, SHAPE)
        assert not res.found and not res.gray_zone
        # analytic minimum |1/q0^2 - 1/q1^2| / sqrt(2)
        assert res.min_violation == pytest.approx(abs(1 / 0.36 - 1 / 0.64) / math.sqrt(2), rel=1e-6)

    def test_third_exists_for_maximal(self):
        res = search_third(IDENTITY_PARAMS, ROTATION_PARAMS, ChannelShape2(1, 1))
        assert res.found and res.min_violation <= 1e-9

    def test_pairwise_is_possible(self):
        res = search_orthogonal([IDENTITY_PARAMS], SHAPE)
        assert res.found
        assert abs(pair_function(IDENTITY_PARAMS, res.best, SHAPE)) <= 1e-9

    def test_rejects_non_orthogonal_witness(self):
        with pytest.raises(ValidationError):
            search_third(IDENTITY_PARAMS, IDENTITY_PARAMS, SHAPE)

    def test_violation_grows_with_asymmetry(self):
        small = search_third(IDENTITY_PARAMS, ROTATION_PARAMS, ChannelShape2.from_g(1.05)).min_violation
        large = search_third(IDENTITY_PARAMS, ROTATION_PARAMS, ChannelShape2.from_g(4.0)).min_violation
        assert 1e-6 < small < large


class TestCertificate:
    def test_p_max_examples(self):
        assert p_max(SHAPE) == pytest.approx(0.4608, abs=1e-12)
        assert p_max(ChannelShape2(1, 1)) == pytest.approx(0.5, abs=1e-12)
        for t in (0.2, 0.7, 1.3):
            assert p_max(ChannelShape2(math.cos(t), math.sin(t))) == pytest.approx(0.5 * math.sin(2 * t) ** 2, abs=1e-12)

    def test_partial(self):
        cert = certify_eta(QuantumChannel(WORKED_Q))
        assert (cert.eta, cert.branch) == (2, "partial")
        assert cert.p_max == pytest.approx(0.4608, abs=1e-12)
        d = cert.to_dict()
        assert d["eta"] == 2 and d["found_third"] is False and d["min_violation"] > 1e-6

    def test_maximal(self):
        cert = certify_eta(QuantumChannel.maximally_entangled(2))
        assert (cert.eta, cert.branch, cert.p_max) == (4, "maximal", 1.0)
        ws = list(cert.witness_pair) + cert.extra_witnesses
        for i, a in enumerate(ws):
            for b in ws[:i]:
                assert abs(pair_function(a, b, cert.shape)) <= 1e-9

    def test_agrees_with_protocol_count(self, rng):
        probe = PureState(np.array([0.6, 0.8j]))
        channels = [QuantumChannel(WORKED_Q), QuantumChannel.from_theta(0.3), QuantumChannel.maximally_entangled(2)]
        channels += [random_channel(2, rng) for _ in range(2)]
        for ch in channels:
            report = run_protocol(ch, synthesize_basis(ch), probe, probes=5)
            assert certify_eta(ch, SearchConfig(grid=32)).eta == report.eta
