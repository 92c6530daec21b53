from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polybottleneck import generators, lower_bound
from polybottleneck.equilibria import (
    best_response,
    best_response_dynamics,
    enumerate_nash,
    enumerate_states,
    is_nash,
    optimal_profile,
    price_of_anarchy,
    rosenthal_potential,
)
from polybottleneck.errors import NonConvergenceError, StateSpaceTooLargeError
from polybottleneck.game_core import Game, bottleneck, congestion_of, player_cost

from conftest import (
    oracle_best_response,
    oracle_is_nash,
    oracle_nash_profiles,
    oracle_optimal,
    oracle_player_cost,
)


class TestBestResponse:
    def test_fixed_point_when_uniquely_optimal(self):
        game = Game.build(2, 1, [[[0], [1]], [[0]]])
        # player 0 shares resource 0 with player 1; resource 1 is free
        assert best_response(game, (1, 0), 0) == 1

    def test_family_direct_state_is_retained(self):
        inst = lower_bound.generate(4, 1)
        for i in range(4):
            # deviation cost equals current cost, so the tie keeps index 0
            assert best_response(inst.game, inst.state_all_direct, i) == 0

    def test_matches_bruteforce_argmin(self, rng):
        for _ in range(50):
            game = generators.random_game(rng)
            profile = tuple(int(rng.integers(0, len(s))) for s in game.strategies)
            for i in range(game.num_players):
                assert best_response(game, profile, i) == oracle_best_response(
                    game, profile, i
                )


class TestIsNash:
    def test_single_player_at_minimum(self):
        game = Game.build(2, 1, [[[0], [0, 1]]])
        assert is_nash(game, (0,))
        assert not is_nash(game, (1,))

    def test_family_direct_state(self):
        inst = lower_bound.generate(4, 1)
        assert is_nash(inst.game, inst.state_all_direct)

    @pytest.mark.parametrize("n,degree", [(2, 1), (4, 1), (2, 2), (3, 2)])
    def test_family_path_state_agrees_with_bruteforce(self, n, degree):
        inst = lower_bound.generate(n, degree)
        assert is_nash(inst.game, inst.state_all_paths) == oracle_is_nash(
            inst.game, inst.state_all_paths
        )

    def test_matches_oracle_on_random_games(self, rng):
        for _ in range(40):
            game = generators.random_game(rng)
            profile = tuple(int(rng.integers(0, len(s))) for s in game.strategies)
            assert is_nash(game, profile) == oracle_is_nash(game, profile)


class TestPotential:
    def test_empty_congestion(self):
        game = Game.build(2, 3, [[[0]]])
        # only one resource used once: potential is 1
        assert rosenthal_potential(game, (0,)) == 1

    def test_two_players_one_resource(self):
        game = Game.build(1, 2, [[[0]], [[0]]])
        assert rosenthal_potential(game, (0, 0)) == 1 + 4

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.data())
    def test_unilateral_move_shifts_potential_by_cost_delta(self, seed, data):
        rng = np.random.default_rng(seed)
        game = generators.random_game(rng)
        profile = list(
            data.draw(st.integers(0, len(s) - 1)) for s in game.strategies
        )
        player = data.draw(st.integers(0, game.num_players - 1))
        alt = data.draw(st.integers(0, len(game.strategies[player]) - 1))
        before_phi = rosenthal_potential(game, tuple(profile))
        before_cost = oracle_player_cost(game, tuple(profile), player)
        profile[player] = alt
        after_phi = rosenthal_potential(game, tuple(profile))
        after_cost = oracle_player_cost(game, tuple(profile), player)
        assert before_phi - after_phi == before_cost - after_cost


class TestDynamics:
    def test_already_stable_start(self):
        inst = lower_bound.generate(4, 1)
        report = best_response_dynamics(inst.game, inst.state_all_direct)
        assert report.profile == inst.state_all_direct
        assert report.moves == 0
        assert report.is_nash

    def test_converges_within_potential_budget(self, rng):
        for _ in range(60):
            game = generators.random_game(rng)
            start = tuple(int(rng.integers(0, len(s))) for s in game.strategies)
            budget = rosenthal_potential(game, start)
            report = best_response_dynamics(game, start, max_steps=budget + 1)
            assert report.moves <= budget
            assert oracle_is_nash(game, report.profile)

    def test_budget_exhaustion_raises(self):
        game = Game.build(2, 1, [[[0], [1]], [[0], [1]]])
        # (0, 0) is unstable; zero budget cannot reach equilibrium
        with pytest.raises(NonConvergenceError):
            best_response_dynamics(game, (0, 0), max_steps=0)


class TestEnumeration:
    def test_two_by_two_order(self):
        game = Game.build(2, 1, [[[0], [1]], [[0], [1]]])
        assert list(enumerate_states(game)) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_family_has_sixteen_states(self):
        inst = lower_bound.generate(4, 1)
        assert len(list(enumerate_states(inst.game))) == 16

    def test_count_is_product_of_sizes(self, rng):
        for _ in range(10):
            game = generators.random_game(rng)
            expected = 1
            for s in game.strategies:
                expected *= len(s)
            assert len(list(enumerate_states(game))) == expected

    def test_cap_is_enforced(self):
        game = Game.build(2, 1, [[[0], [1]]] * 10)
        with pytest.raises(StateSpaceTooLargeError):
            list(enumerate_states(game, cap=100))
        with pytest.raises(StateSpaceTooLargeError):
            optimal_profile(game, cap=100)
        with pytest.raises(StateSpaceTooLargeError):
            price_of_anarchy(game, cap=100)

    def test_cap_env_default(self, monkeypatch):
        game = Game.build(2, 1, [[[0], [1]]] * 10)
        monkeypatch.setenv("POLYBOTTLENECK_STATE_CAP", "100")
        with pytest.raises(StateSpaceTooLargeError):
            list(enumerate_states(game))
        monkeypatch.setenv("POLYBOTTLENECK_STATE_CAP", "2000")
        assert len(list(enumerate_states(game))) == 1024


class TestOptimal:
    def test_disjoint_singletons(self):
        game = Game.build(3, 1, [[[0]], [[1]], [[2]]])
        profile, c_star = optimal_profile(game)
        assert c_star == 1

    def test_family_optimum_value(self):
        inst = lower_bound.generate(4, 1)
        profile, c_star = optimal_profile(inst.game)
        assert c_star == 1
        assert bottleneck(congestion_of(inst.game, profile)) == 1
        # lexicographic tie-break: player 0 may stay direct since its detour
        # contains the shared resource anyway
        assert profile == (0, 1, 1, 1)

    def test_matches_full_scan(self, rng):
        for _ in range(30):
            game = generators.random_game(rng)
            profile, c_star = optimal_profile(game)
            _, expected = oracle_optimal(game)
            assert c_star == expected
            assert max(congestion_of(game, profile)) == expected


class TestNashEnumeration:
    def test_single_player_min_cost_strategies(self):
        game = Game.build(2, 1, [[[0], [1], [0, 1]]])
        assert enumerate_nash(game) == [(0,), (1,)]

    def test_family_contains_direct_state(self):
        inst = lower_bound.generate(4, 1)
        nash = enumerate_nash(inst.game)
        assert inst.state_all_direct in nash
        # with four players the all-path state is unstable (the shared
        # resource is cheap), so it must not be reported
        assert inst.state_all_paths not in nash

    def test_path_state_is_never_stable(self):
        # the player whose detour contains the shared resource can always
        # shortcut to the shared resource alone, so the all-path state is
        # unstable for every family size
        for n, degree in [(2, 1), (3, 1), (2, 2)]:
            inst = lower_bound.generate(n, degree)
            assert not is_nash(inst.game, inst.state_all_paths)
            assert inst.state_all_paths not in enumerate_nash(inst.game)

    def test_matches_oracle_and_existence(self, rng):
        for _ in range(30):
            game = generators.random_game(rng)
            nash = enumerate_nash(game)
            assert nash == oracle_nash_profiles(game)
            assert len(nash) >= 1

    def test_invariant_under_player_reordering(self, rng):
        for _ in range(10):
            game = generators.random_game(rng, max_players=3)
            order = list(range(game.num_players))
            rng.shuffle(order)
            permuted = Game.build(
                game.num_resources,
                game.degree,
                [list(map(list, game.strategies[i])) for i in order],
            )
            original = {tuple(p[order.index(i)] for i in range(game.num_players))
                        for p in enumerate_nash(permuted)}
            assert original == set(enumerate_nash(game))


class TestPriceOfAnarchy:
    def test_unique_state_game(self):
        game = Game.build(2, 1, [[[0]], [[1]]])
        report = price_of_anarchy(game)
        assert report.poa == 1
        assert report.nash_count == 1

    def test_family_degree_one(self):
        inst = lower_bound.generate(4, 1)
        report = price_of_anarchy(inst.game)
        assert report.poa == Fraction(4, 1)
        assert report.C == 4 and report.C_star == 1
        assert inst.num_resources ** (1 / 2) == pytest.approx(4.0)

    def test_family_degree_two(self):
        inst = lower_bound.generate(2, 2)
        report = price_of_anarchy(inst.game)
        assert report.poa == Fraction(2, 1)
        assert inst.num_resources == 8
        assert 8 ** (1 / 3) == pytest.approx(2.0)

    def test_report_dict_fields(self):
        inst = lower_bound.generate(2, 1)
        payload = price_of_anarchy(inst.game).to_dict()
        assert set(payload) == {
            "C", "C_star", "poa_num", "poa_den", "nash_count",
            "worst_nash_choice", "optimal_choice",
        }

    def test_worst_nash_is_actually_worst(self, rng):
        for _ in range(20):
            game = generators.random_game(rng)
            report = price_of_anarchy(game)
            worst = max(
                max(congestion_of(game, p)) for p in oracle_nash_profiles(game)
            )
            assert report.C == worst
            assert oracle_is_nash(game, report.worst_nash)
