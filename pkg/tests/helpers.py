"""Stream builders shared by the test modules."""

import time
from functools import lru_cache

from esec import build_esec
from esec.generator import ACTIONS, GenParams, generate_scene, variant_seed
from esec.scene import Aabb, FrameRecord, ObjectState, SceneStream


def box(lo, hi):
    return Aabb(tuple(lo), tuple(hi))


def cube(center, half=0.5):
    return Aabb.from_center(center, [half] * 3)


def obj(oid, aabb, **flags):
    return ObjectState(oid, aabb, **flags)


def stream(frames, fps=30.0, label=None, y_down=True):
    """``frames`` is a list of object lists; times are index / fps."""
    return SceneStream(
        tuple(FrameRecord(i, i / fps, tuple(objs)) for i, objs in enumerate(frames)), fps, label, y_down
    )


SUITE_TIMING = {}


@lru_cache(maxsize=1)
def generated_suite(variants=30, seed=0):
    t0 = time.perf_counter()
    chains = []
    for a in ACTIONS:
        for v in range(variants):
            s = generate_scene(GenParams(a, seed=variant_seed(seed, a, v)))
            chains.append(build_esec(s, name=f"{a}_{v:02d}"))
    SUITE_TIMING["build"] = time.perf_counter() - t0
    return tuple(chains)


ACCEPTANCE = {}


def report(n, ok, detail):
    """Record one acceptance line (printed in the terminal summary) and return ``ok``."""
    ok = bool(ok)
    ACCEPTANCE[n] = (ok, detail)
    return ok
