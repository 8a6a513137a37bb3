import math

import numpy as np
import pytest

from walkcount.errors import (
    ColoringError,
    DegenerateMarkingError,
    DimensionMismatchError,
    DomainError,
    ScopeError,
)
from walkcount.graph import ColoredGraph, complete_bipartite, edge_color_bipartite
from walkcount.qstate import Rng, basis_state
from walkcount.walk import (
    BASIS_LABELS,
    BipartiteMarking,
    WalkAngles,
    WalkSpace,
    bipartite_count,
    bipartite_error_bound,
    block_operator,
    count_distribution,
    count_from_outcome,
    d_coefficients,
    d_coefficients_from_angles,
    edge_superposition,
    eigen_table,
    flip_flop_shift,
    grover_coin,
    monte_carlo_count,
    predicted_count_distribution,
    projection_probabilities,
    reduced_action,
    reduced_basis,
    reduced_operator,
    rotation,
    search_operator,
    success_probability_bound,
    verify_reduction,
    walk_angles,
    walk_operator,
    walk_oracle,
)


def knn(n: int) -> WalkSpace:
    return WalkSpace(edge_color_bipartite(complete_bipartite(n, n)))


def match_multisets(expected, got, tol):
    """Greedy nearest matching of two complex multisets"""
    remaining = list(got)
    for value in expected:
        i = int(np.argmin([abs(value - r) for r in remaining]))
        assert abs(value - remaining[i]) < tol
        remaining.pop(i)


NONDEGENERATE = [(n, k) for n in (2, 4, 8) for k in range(1, n)]


class TestWalkSpace:

    def test_dims(self):
        ws = knn(4)
        assert ws.position_dim == 8
        assert ws.coin_dim == 4
        assert ws.dims.total == 32
        assert ws.index(2, 3) == 11

    def test_needs_proper_coloring(self):
        g = complete_bipartite(2, 2)
        improper = ColoredGraph(g, 2, {(0, 2): 0, (0, 3): 0, (1, 2): 1, (1, 3): 1})
        with pytest.raises(ColoringError):
            WalkSpace(improper)


class TestWalkOperators:

    def test_single_edge_shift(self):
        ws = knn(1)
        s = flip_flop_shift(ws)
        np.testing.assert_array_equal((s @ basis_state(ws.dims, (0, 0))).amps, basis_state(ws.dims, (1, 0)).amps)
        np.testing.assert_array_equal((walk_operator(ws) @ basis_state(ws.dims, (0, 0))).amps,
                                      basis_state(ws.dims, (1, 0)).amps)

    def test_shift_follows_colors(self):
        ws = knn(2)
        out = flip_flop_shift(ws) @ basis_state(ws.dims, (0, 1))
        np.testing.assert_array_equal(out.amps, basis_state(ws.dims, (3, 1)).amps)

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_involutions(self, n):
        ws = knn(n)
        total = ws.dims.total
        s = flip_flop_shift(ws).entries
        np.testing.assert_array_equal(s @ s, np.eye(total))
        o = walk_oracle(ws, BipartiteMarking.first(n, 1)).entries
        np.testing.assert_array_equal(o @ o, np.eye(total))
        c = grover_coin(n).entries
        np.testing.assert_allclose(c @ c, np.eye(n), atol=1e-14)

    def test_coin_matrices(self):
        np.testing.assert_array_equal(grover_coin(1).entries, [[1]])
        np.testing.assert_array_equal(grover_coin(2).entries, [[0, 1], [1, 0]])
        c4 = grover_coin(4).entries
        np.testing.assert_allclose(np.diag(c4), np.full(4, -0.5))
        np.testing.assert_allclose(c4[0, 1:], np.full(3, 0.5))
        with pytest.raises(DomainError):
            grover_coin(0)

    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_walk_operator_law(self, n):
        ws = knn(n)
        cg = ws.graph
        d = ws.coin_dim
        u_w = walk_operator(ws)
        assert u_w.is_unitary(1e-12)
        for v in range(ws.position_dim):
            for c in range(d):
                expected = np.zeros(ws.dims.total)
                u = cg.endpoint(v, c)
                for w in cg.graph.neighbors(v):
                    coefficient = 2 / d - 1 if w == u else 2 / d
                    expected[ws.index(w, cg.color_of(v, w))] = coefficient
                column = (u_w @ basis_state(ws.dims, (v, c))).amps
                assert np.max(np.abs(column - expected)) < 1e-12

    def test_empty_marking_gives_walk_operator(self):
        ws = knn(3)
        np.testing.assert_array_equal(search_operator(ws, BipartiteMarking(3, 3)).entries,
                                      walk_operator(ws).entries)

    def test_oracle_flips_marked_positions(self):
        ws = knn(4)
        bm = BipartiteMarking.first(4, 1)
        diag = np.diag(walk_oracle(ws, bm).entries).real
        for v in range(8):
            for c in range(4):
                assert diag[ws.index(v, c)] == (-1.0 if v in (0, 4) else 1.0)

    def test_search_operator_unitary(self):
        assert search_operator(knn(4), BipartiteMarking.first(4, 1)).is_unitary(1e-12)

    def test_marking_must_match_graph(self):
        with pytest.raises(DimensionMismatchError):
            walk_oracle(knn(4), BipartiteMarking.first(3, 1))


class TestMarking:

    def test_first(self):
        bm = BipartiteMarking.first(4, 1)
        assert bm.K1 == frozenset({0}) and bm.K2 == frozenset({4})
        assert bm.k == 2 and bm.restricted and bm.nondegenerate

    def test_unequal_marking_is_out_of_scope(self):
        bm = BipartiteMarking.first(4, 1, k2=2)
        assert not bm.restricted

    def test_marked_vertices_must_lie_in_their_side(self):
        with pytest.raises(DomainError):
            BipartiteMarking(4, 4, frozenset({4}))
        with pytest.raises(DomainError):
            BipartiteMarking(4, 4, K2=frozenset({1}))

    def test_classes(self):
        assert BipartiteMarking.first(3, 1).classes() == {
            "K1": [0], "K1^C": [1, 2], "K2": [3], "K2^C": [4, 5]}


class TestAngles:

    def test_trigonometric_consistency(self):
        for n in (4, 8, 40):
            for k in range(n + 1):
                a = walk_angles(n, k, n, k)
                assert math.cos(a.theta1) == pytest.approx(1 - 2 * k / n, abs=1e-12)
                assert math.sin(a.theta1) == pytest.approx(2 / n * math.sqrt(k * (n - k)), abs=1e-12)
                assert 0 <= a.Sigma <= math.pi
                assert -math.pi / 2 <= a.Delta <= math.pi / 2

    def test_quarter_marking(self):
        a = WalkAngles.of(BipartiteMarking.first(4, 1))
        assert a.Sigma == pytest.approx(math.pi / 3)
        assert a.Delta == 0.0

    def test_count_identity(self):
        a = walk_angles(4, 1, 4, 1)
        assert 8 * math.sin(a.theta1 / 2) ** 2 == pytest.approx(2.0, abs=1e-12)
        for n in (4, 8, 40):
            for k in range(n + 1):
                theta = walk_angles(n, k, n, k).theta1
                assert 2 * n * math.sin(theta / 2) ** 2 == pytest.approx(2 * k, abs=1e-10)

    def test_range(self):
        with pytest.raises(DomainError):
            WalkAngles(-0.1, 0.0)


class TestReducedSystem:

    def test_basis_is_orthonormal(self):
        basis = reduced_basis(knn(4), BipartiteMarking.first(4, 1))
        gram = np.array([[np.vdot(a.amps, b.amps) for b in basis] for a in basis])
        np.testing.assert_allclose(gram, np.eye(8), atol=1e-12)

    def test_complement_pair_vector(self):
        basis = reduced_basis(knn(4), BipartiteMarking.first(4, 1))
        amps = basis[BASIS_LABELS.index("K1^C,K2^C")].amps
        nonzero = amps[np.abs(amps) > 0]
        assert nonzero.size == 9
        np.testing.assert_allclose(nonzero, np.full(9, 1 / 3))

    def test_degenerate_classes_rejected(self):
        with pytest.raises(DegenerateMarkingError):
            reduced_basis(knn(4), BipartiteMarking.first(4, 0))
        with pytest.raises(DegenerateMarkingError):
            reduced_basis(knn(4), BipartiteMarking.first(4, 4))

    @pytest.mark.parametrize("n,k", NONDEGENERATE)
    def test_reduction_fidelity(self, n, k):
        assert verify_reduction(knn(n), BipartiteMarking.first(n, k)) < 1e-12

    def test_reduction_with_unequal_marking(self):
        assert verify_reduction(knn(4), BipartiteMarking.first(4, 1, k2=3)) < 1e-12

    @pytest.mark.parametrize("n,k1,k2", [(4, 1, 1), (4, 1, 3), (8, 3, 5)])
    def test_class_size_action(self, n, k1, k2):
        bm = BipartiteMarking.first(n, k1, k2=k2)
        np.testing.assert_allclose(reduced_action(bm), reduced_operator(WalkAngles.of(bm)).u_prime.real, atol=1e-12)

    def test_block_product_is_kronecker(self):
        t1, t2 = 0.7, 2.1
        np.testing.assert_allclose(block_operator(t1) @ block_operator(t2),
                                   np.kron(rotation(t1).T, rotation(t2)), atol=1e-14)

    @pytest.mark.parametrize("t1,t2", [(math.pi / 3, math.pi / 3), (0.4, 1.9), (2.5, 0.3), (1.2, 1.2)])
    def test_analytic_eigenpairs(self, t1, t2):
        system = reduced_operator(WalkAngles(t1, t2))
        u = system.u_prime
        np.testing.assert_allclose(u.conj().T @ u, np.eye(8), atol=1e-12)
        for pair in system.eigenpairs:
            assert np.linalg.norm(u @ pair.vector - pair.eigenvalue * pair.vector) < 1e-10
            assert np.linalg.norm(pair.vector) == pytest.approx(1.0)
            assert pair.eigenvalue == pytest.approx(np.exp(1j * pair.angle))
        match_multisets([p.eigenvalue for p in system.eigenpairs], np.linalg.eigvals(u), 1e-9)

    def test_balanced_marking_spectrum(self):
        angles = walk_angles(4, 1, 4, 1)
        S = angles.Sigma
        expected = [np.exp(1j * S), np.exp(-1j * S), -np.exp(1j * S), -np.exp(-1j * S), 1, 1, -1, -1]
        match_multisets(expected, [p.eigenvalue for p in reduced_operator(angles).eigenpairs], 1e-12)

    def test_labels(self):
        system = reduced_operator(walk_angles(4, 1, 4, 1))
        assert system.basis_labels == BASIS_LABELS
        assert [p.label for p in system.eigenpairs] == [label for label, *_ in eigen_table(system.angles)]


class TestEdgeSuperposition:

    def test_uniform(self):
        d = edge_superposition(knn(4))
        assert d.norm() == pytest.approx(1.0)
        np.testing.assert_allclose(d.amps, np.full(32, 1 / math.sqrt(32)))

    @pytest.mark.parametrize("n,k1,k2", [(4, 1, 1), (4, 2, 1), (8, 3, 3)])
    def test_reduced_decomposition(self, n, k1, k2):
        ws, bm = knn(n), BipartiteMarking.first(n, k1, k2=k2)
        coeffs = d_coefficients(ws, bm)
        basis = reduced_basis(ws, bm)
        rebuilt = sum(c * b.amps for c, b in zip(coeffs, basis))
        np.testing.assert_allclose(rebuilt, edge_superposition(ws, bm).amps, atol=1e-12)
        np.testing.assert_allclose(coeffs, d_coefficients_from_angles(WalkAngles.of(bm)), atol=1e-12)


class TestProjections:

    @pytest.mark.parametrize("t1,t2", [(math.pi / 3, math.pi / 3), (0.4, 1.9), (2.5, 0.3)])
    def test_closed_form_matches_overlaps(self, t1, t2):
        angles = WalkAngles(t1, t2)
        system = reduced_operator(angles)
        numeric = [abs(c) ** 2 for c in system.d_coeffs]
        closed = [prob for _, _, prob in projection_probabilities(angles)]
        np.testing.assert_allclose(numeric, closed, atol=1e-12)
        assert sum(numeric) == pytest.approx(1.0, abs=1e-12)

    def test_eigenvector_overlaps(self):
        angles = WalkAngles(0.4, 1.9)
        overlaps = {p.label: abs(c) ** 2 for p, c in zip(reduced_operator(angles).eigenpairs,
                                                          reduced_operator(angles).d_coeffs)}
        assert overlaps["+Sigma"] + overlaps["+(Sigma+pi)"] == pytest.approx(0.25)
        assert overlaps["+Delta"] == pytest.approx((1 + math.cos(angles.Sigma)) / 8, abs=1e-12)
        assert overlaps["+(Delta+pi)"] == pytest.approx((1 - math.cos(angles.Sigma)) / 8, abs=1e-12)

    def test_quarter_marking_table(self):
        probs = {label: prob for label, _, prob in projection_probabilities(walk_angles(4, 1, 4, 1))}
        assert probs["+Sigma"] == pytest.approx(0.25)
        assert probs["-Sigma"] == pytest.approx(0.25)
        assert probs["+(Sigma+pi)"] == 0.0
        assert probs["+Delta"] == pytest.approx(3 / 16)
        assert probs["-Delta"] == pytest.approx(3 / 16)
        assert probs["+(Delta+pi)"] == pytest.approx(1 / 16)
        assert probs["-(Delta+pi)"] == pytest.approx(1 / 16)

    def test_prediction_matches_simulation(self):
        ws, bm = knn(4), BipartiteMarking.first(4, 1)
        predicted = predicted_count_distribution(WalkAngles.of(bm), 5)
        np.testing.assert_allclose(predicted, count_distribution(ws, bm, 5), atol=1e-12)

    def test_large_spectrum(self):
        angles = walk_angles(40, 2, 40, 1)
        assert math.cos(angles.theta1) == pytest.approx(0.9)
        assert math.cos(angles.theta2) == pytest.approx(0.95)
        rows = eigen_table(angles)
        assert len(rows) == 8
        assert rows[0][1] == pytest.approx((math.acos(0.9) + math.acos(0.95)) / 2)
        assert all(r[2] ** 2 + r[3] ** 2 == pytest.approx(1.0) for r in rows)


class TestBounds:

    def test_error_bound_pair(self):
        loose, tight = bipartite_error_bound(8, 2, 16)
        first = 2 * math.pi * math.sqrt(12) / 16
        assert first == pytest.approx(1.360, abs=1e-3)
        assert loose == pytest.approx(first + 4.935, abs=1e-3)
        assert tight == pytest.approx(first + 0.308, abs=1e-3)

    def test_error_bound_peaks_at_half(self):
        loose = [bipartite_error_bound(16, k, 32)[0] for k in range(1, 16)]
        assert int(np.argmax(loose)) + 1 == 8

    def test_error_bound_needs_nondegenerate(self):
        with pytest.raises(DegenerateMarkingError):
            bipartite_error_bound(8, 0, 16)

    def test_success_probability(self):
        assert success_probability_bound(1) == pytest.approx(4 / math.pi ** 2)
        assert success_probability_bound(3) == pytest.approx(0.7092, abs=1e-4)
        assert success_probability_bound(60) == pytest.approx(8 / math.pi ** 2)
        with pytest.raises(DomainError):
            success_probability_bound(0)


class TestCounting:

    def test_fold(self):
        assert count_from_outcome(8, 24, 32) == pytest.approx(count_from_outcome(8, 8, 32))
        theta, k = count_from_outcome(8, 16, 32)
        assert theta == pytest.approx(math.pi)
        assert k == pytest.approx(8.0)

    def test_no_marked_vertices(self, rng):
        probes = []

        def probe(v: int) -> bool:
            probes.append(v)
            return False

        est = bipartite_count(knn(4), BipartiteMarking.first(4, 0), 4, 3, rng, probe)
        assert est.k_est == 0.0
        assert est.probed
        assert est.queries == 3 * 15 + 1
        assert len(probes) == 1

    def test_all_marked_vertices(self, rng):
        est = bipartite_count(knn(4), BipartiteMarking.first(4, 4), 4, 2, rng)
        assert est.k_est == 8.0
        assert est.probed
        assert est.queries == 2 * 15 + 1

    def test_nondegenerate_count(self):
        bm = BipartiteMarking.first(4, 1)
        estimates = [bipartite_count(knn(4), bm, 5, 3, Rng(5, stream=i)) for i in range(20)]
        for est in estimates:
            if est.probed:
                assert est.k_est in (0.0, 8.0)
                assert est.queries == 3 * 31 + 1
            else:
                assert est.raw_outcome not in (0, 16)
                assert est.queries in (31, 62, 93)
                assert 0.0 <= est.k_est <= 8.0
        assert not all(est.probed for est in estimates)

    def test_scope(self, rng):
        with pytest.raises(ScopeError):
            bipartite_count(knn(4), BipartiteMarking.first(4, 1, k2=2), 4, 3, rng)
        with pytest.raises(DomainError):
            bipartite_count(knn(4), BipartiteMarking.first(4, 1), 4, 0, rng)

    def test_monte_carlo_guarantee(self):
        metrics = monte_carlo_count(knn(4), BipartiteMarking.first(4, 1), p=5, t=3, trials=2000, seed=2024)
        assert metrics.trials == 2000
        assert metrics.required_probability == pytest.approx(success_probability_bound(3))
        assert metrics.success_frequency >= metrics.threshold
        assert metrics.passed
        assert {row[4] for row in metrics.rows} <= {31, 62, 93, 94}

    def test_monte_carlo_exact_case(self):
        metrics = monte_carlo_count(knn(4), BipartiteMarking.first(4, 0), p=4, t=2, trials=50, seed=1)
        assert metrics.success_frequency == 1.0
        assert metrics.exact_branches == 50
        assert metrics.k_mean == 0.0

    def test_monte_carlo_is_deterministic(self):
        args = dict(p=4, t=3, trials=100, seed=77)
        first = monte_carlo_count(knn(4), BipartiteMarking.first(4, 1), **args)
        second = monte_carlo_count(knn(4), BipartiteMarking.first(4, 1), **args)
        assert first.rows == second.rows
        assert first.to_dict() == second.to_dict()
