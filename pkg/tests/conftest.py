import functools
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fibre_forge.cocycle import (direct_sum, flat_circle_cocycle, make_clutching,  # noqa: E402
                                 torus_line_bundle, trivial_cocycle)
from fibre_forge.geometry import build_atlas, set_threads  # noqa: E402

set_threads(1)

SPHERE_RES = 200
CLUTCHING_DEGREES = (-2, -1, 0, 1, 2, 3)


@functools.lru_cache(maxsize=None)
def atlas(mid, res=None):
    res = res or {"sphere2": SPHERE_RES, "circle3": 96, "torus4": 64}[mid]
    return build_atlas(mid, res)


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def catalog_bundles():
    """(label, manifold, factory) for every catalog bundle used in the suite."""
    out = []
    for k in CLUTCHING_DEGREES:
        out.append((f"sphere-clutching{k:+d}", "sphere2",
                    lambda a, k=k: make_clutching(a, k)))
    out.append(("sphere-clutching+2-rank2", "sphere2", lambda a: make_clutching(a, 2, rank=2)))
    out.append(("sphere-sum(+1,-1)", "sphere2",
                lambda a: direct_sum(make_clutching(a, 1), make_clutching(a, -1))))
    out.append(("circle-flat-phase", "circle3",
                lambda a: flat_circle_cocycle(a, complex(math.cos(1.0), math.sin(1.0)))))
    out.append(("circle-flat-rotation", "circle3", lambda a: flat_circle_cocycle(a, _rotation(0.7))))
    out.append(("torus-line+1", "torus4", lambda a: torus_line_bundle(a, 1)))
    out.append(("torus-line-2", "torus4", lambda a: torus_line_bundle(a, -2)))
    out.append(("torus-trivial-rank2", "torus4", lambda a: trivial_cocycle(a, 2)))
    return out


BUNDLES = catalog_bundles()
BUNDLE_IDS = [b[0] for b in BUNDLES]


# ---------------------------------------------------------------------------
# acceptance summary
# ---------------------------------------------------------------------------

_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion and assert it."""

    def report(number, title, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 12):
        terminalreporter.write_line(_ACCEPTANCE.get(n, f"criterion {n:>2}: FAIL  (no result recorded)"))
