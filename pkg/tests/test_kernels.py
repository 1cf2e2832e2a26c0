import math

import numpy as np
import pytest

from ris_secrecy import _kernels
from ris_secrecy.channel import LinkBudget
from ris_secrecy.geometry import Scene, corner_distances, distance
from ris_secrecy.verify import random_scene

needs_ext = pytest.mark.skipif(_kernels.compiled is None, reason="compiled extension not built")


def _args(scene, z, anchor_far, tie_last, lb=LinkBudget(), step=0.1):
    dsi_max, did_max = corner_distances(scene)
    n = scene.normals
    return (float(z), scene.source, scene.destination, scene.eavesdropper,
            (scene.x_bounds, scene.y_bounds), tuple(n.beta1), tuple(n.beta2), scene.d_far,
            dsi_max, did_max, distance(scene.p_s, scene.p_d), step, lb.alpha_si, lb.alpha_id,
            anchor_far, tie_last)


def test_backend_selection_flag():
    assert _kernels.BACKEND in ("compiled", "python")
    assert (_kernels.BACKEND == "compiled") == (_kernels.compiled is not None)


def test_pure_python_env_forces_fallback():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "import ris_secrecy as r; print(r.BACKEND)"],
                         env={"RIS_SECRECY_PURE_PYTHON": "1", "PATH": ""},
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_ext
@pytest.mark.parametrize("anchor_far", [True, False])
@pytest.mark.parametrize("tie_last", [True, False])
@pytest.mark.parametrize("seed", range(4))
def test_inner_scan_backends_agree(anchor_far, tie_last, seed):
    g = np.random.default_rng(seed)
    sc = Scene.default() if seed == 0 else random_scene(g)
    for z in np.round(g.uniform(0, sc.z_bounds[1], 4), 1):
        a = _kernels.fallback.inner_scan(*_args(sc, z, anchor_far, tie_last))
        b = _kernels.compiled.inner_scan(*_args(sc, z, anchor_far, tie_last))
        assert a[0] == b[0] and a[4:] == b[4:]
        if a[0]:
            # the objective may differ in the last ulp between libm and numpy pow
            assert math.isclose(a[1], b[1], rel_tol=1e-13)
            assert (a[2], a[3]) == (b[2], b[3])


def _loop_enumerate(first_vals, vals, n, h_sid, h_sie, base, f2, f3):
    import itertools
    best, arg = -math.inf, None
    for idx in itertools.product(range(len(first_vals)), *[range(len(vals))] * (n - 1)):
        q = np.array([first_vals[idx[0]]] + [vals[i] for i in idx[1:]])
        F = (base + f2 * abs(q @ h_sid) ** 2) / (base + f3 * abs(q @ h_sie) ** 2)
        if F > best:
            best, arg = F, idx
    return best, arg


@pytest.mark.parametrize("n", [1, 2, 3])
def test_enumerate_q_matches_loops(n):
    g = np.random.default_rng(n)
    h1 = g.standard_normal(n) + 1j * g.standard_normal(n)
    h2 = g.standard_normal(n) + 1j * g.standard_normal(n)
    amps = np.linspace(0, 1, 3).astype(complex)
    vals = (np.linspace(0, 1, 3)[:, None] * np.exp(2j * np.pi * np.arange(5) / 5)).reshape(-1)
    want = _loop_enumerate(amps, vals, n, h1, h2, 0.7, 1.3, 0.9)
    for mod in filter(None, (_kernels.fallback, _kernels.compiled)):
        F, idx = mod.enumerate_q(amps, vals, n, h1, h2, 0.7, 1.3, 0.9)
        # rotations of an optimum tie up to rounding, so compare values only
        assert math.isclose(F, want[0], rel_tol=1e-12)
        q = np.array([amps[idx[0]]] + [vals[i] for i in idx[1:]])
        got = (0.7 + 1.3 * abs(q @ h1) ** 2) / (0.7 + 0.9 * abs(q @ h2) ** 2)
        assert math.isclose(got, F, rel_tol=1e-12)


def test_lattice_helpers():
    assert _kernels.lattice_size(0.0, 3.0, 0.1) == 31
    assert _kernels.lattice_size(0.5, 0.4, 0.1) == 0
    assert _kernels.first_index_at_least(0.5, 0.5, 0.1) == 0
    assert _kernels.first_index_at_least(0.5, 0.71, 0.1) == 3
    assert _kernels.first_index_at_least(0.5, 0.2, 0.1) == 0
