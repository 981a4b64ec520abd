import json
from dataclasses import replace

import numpy as np
import pytest

from esec import build_esec, project_sec
from esec.generator import ACTIONS, GenParams, GeometryError, generate_scene, generate_suite
from esec.predictor import ReferenceLibrary, predict
from esec.scene import parse_scene, serialize_scene
from esec.similarity import similarity_matrix

HIDE_SEC = ["UUUNUUUUUU", "TUUNUUTUUU", "TUUNUUNUUU", "TNUNTUNUTU", "TAUNAUTUAU", "NAUNAUTUAU"]


@pytest.mark.parametrize("action", ACTIONS)
def test_streams_are_valid_and_deterministic(action):
    p = GenParams(action, seed=11)
    data = serialize_scene(generate_scene(p))
    assert serialize_scene(generate_scene(p)) == data
    back = parse_scene(data)
    assert back.label == action and not back.y_down
    assert back.hand_id == "hand" and back.ground_id == "table"


@pytest.mark.parametrize("action", ACTIONS)
def test_distractors_do_not_change_the_chain(action):
    for seed in (3, 4):
        base = GenParams(action, seed=seed, distractor_count=0)
        plain = build_esec(generate_scene(base))
        busy_scene = generate_scene(replace(base, distractor_count=3))
        assert sum(o.object_id.startswith("distractor") for o in busy_scene.frames[0].objects) == 3
        assert build_esec(busy_scene) == plain


@pytest.mark.parametrize("seed", range(1, 9))
def test_hide_touch_pattern(seed):
    e = build_esec(generate_scene(GenParams("hide", seed=seed)))
    assert ["".join(col) for col in project_sec(e).symbols("tn")] == HIDE_SEC


def test_destroyed_target_flags():
    for action in ("cut", "chop"):
        s = generate_scene(GenParams(action, seed=2))
        intact = [o.intact for fr in s.frames for o in fr.objects if o.object_id == "block"]
        assert intact[0] and not intact[-1]
        flips = sum(a != b for a, b in zip(intact, intact[1:]))
        assert flips == 1


def test_parameter_errors():
    with pytest.raises(ValueError, match="unknown action"):
        GenParams("juggle")
    with pytest.raises(ValueError, match="distractor_count"):
        GenParams("hide", distractor_count=4)
    with pytest.raises(ValueError, match="positive"):
        GenParams("hide", speed_scale=0)
    with pytest.raises(GeometryError, match="infeasible geometry"):
        generate_scene(GenParams("hide", seed=1, distance_scale=4.0))


def test_duration_follows_the_configured_range():
    totals = []
    for seed in range(20):
        e = build_esec(generate_scene(GenParams("take_down", seed=seed)))
        totals.append(e.total_time)
    assert 11.7 - 2 * 2.9 - 0.5 <= min(totals) and max(totals) <= 11.7 + 2 * 2.9 + 0.5
    assert abs(np.mean(totals) - 11.7) < 2.0


def test_suite_layout(tmp_path):
    m = generate_suite(tmp_path / "one", actions=["push"], variants_per_action=1, seed=3)
    assert [f["file"] for f in m["files"]] == ["push_00.jsonl"]
    assert sorted(p.name for p in (tmp_path / "one").iterdir()) == ["manifest.json", "push_00.jsonl"]
    with pytest.raises(ValueError):
        generate_suite(tmp_path / "bad", variants_per_action=0)
    with pytest.raises(ValueError, match="unknown action"):
        generate_suite(tmp_path / "bad", actions=["fly"])


def test_suite_parallel_identical(tmp_path):
    a = generate_suite(tmp_path / "a", actions=["hide", "stir"], variants_per_action=3, seed=9, jobs=1)
    b = generate_suite(tmp_path / "b", actions=["hide", "stir"], variants_per_action=3, seed=9, jobs=2)
    assert a == b
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(names) == 7
    for n in names:
        assert (tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["master_seed"] == 9 and len({f["seed"] for f in manifest["files"]}) == 6


def test_full_suite_shape(suite_chains):
    assert len(suite_chains) == 300
    assert {c.label for c in suite_chains} == set(ACTIONS)


def test_class_separability(suite_chains):
    labels = np.array([c.label for c in suite_chains])
    sims = similarity_matrix(suite_chains[::2]).values
    labels = labels[::2]
    for a in ACTIONS:
        inside = labels == a
        within = sims[np.ix_(inside, inside)][~np.eye(inside.sum(), dtype=bool)].mean()
        across = sims[np.ix_(inside, ~inside)].mean()
        assert within > across, a


def test_every_class_is_recognised_mostly(suite_chains):
    lib = ReferenceLibrary.from_chains(suite_chains)
    for a in ACTIONS:
        members = [c for c in suite_chains if c.label == a][:6]
        hits = sum(predict(c, lib).predicted == a for c in members)
        assert hits >= 5, a
