import math

import pytest

import lpbfpath as lp

SQUARE = [(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)]
STRIP = [(0.0, 0.0), (0.45, 0.0), (0.45, 1e-9), (0.0, 1e-9)]


def test_sample_grid_counts():
    grid = lp.sample_grid(SQUARE, 0.05)
    assert grid.size == 11 * 11
    assert grid.hatch_mm == pytest.approx(0.05)


def test_formula_surface():
    assert lp.epsilon(0) == pytest.approx(1.0)
    assert lp.epsilon(200) == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert lp.reward_main(45.0, 0.1, 0.05) == pytest.approx(-0.5)
    assert lp.reward_main(90.0, 0.05, 0.05) == 0.0
    assert lp.collision_penalty(4) == 1
    assert lp.collision_penalty(3) == 0
    assert lp.isolated_penalty(True) == 1
    assert lp.bellman_target(0.5, [0.2, 1.0, -3.0], False) == pytest.approx(1.49)
    assert lp.turning_angle_deg((1, 0), (0, 1)) == pytest.approx(90.0)


def test_zigzag_covers_and_is_smooth():
    path = lp.zigzag(SQUARE, 0.05)
    assert len(path.moves) == 121
    assert path.sensitive_regions() == 0
    assert path.void_move_count() == 0
    seen = {m.point for m in path.moves}
    assert len(seen) == 121


def test_baselines_cover_everything():
    for gen in (lp.chessboard(SQUARE, 0.05, island_mm=0.25),
                lp.atg_greedy(SQUARE, 0.05)):
        seen = {m.point for m in gen.moves}
        assert len(seen) == len(gen.moves) == 121


def test_toolpath_json_roundtrip():
    path = lp.zigzag(SQUARE, 0.05)
    again = lp.Toolpath.from_json(path.to_json())
    assert again.to_json() == path.to_json()


def test_train_rollout_deterministic(tmp_path):
    policy = lp.train(STRIP, 0.05, episodes=5, seed=3)
    a = policy.rollout(STRIP, 0.05)
    b = policy.rollout(STRIP, 0.05)
    assert a.to_json() == b.to_json()
    assert len(a.moves) == 10

    model = tmp_path / "model.json"
    policy.save(str(model))
    loaded = lp.Policy.load(str(model))
    assert loaded.rollout(STRIP, 0.05).to_json() == a.to_json()

    obs = [0.0] * lp.OBSERVATION_DIM
    assert len(loaded.q_values(obs)) == 3


def test_simulate_depths():
    path = lp.zigzag([(0.0, 0.0), (0.3, 0.0), (0.3, 0.1), (0.0, 0.1)], 0.05)
    steps = lp.simulate_depths(path, absorptivity=0.7)
    assert len(steps) > 0
    assert all(d >= 0.0 for (_, _, _, d) in steps)


def test_gcode_text():
    path = lp.zigzag(SQUARE, 0.05)
    text = lp.gcode_text(path)
    assert text.startswith("G21\nG90\n")
    assert "G1 X" in text
