"""Smoke test for the gpred Python bindings."""

import math
import pathlib
import tempfile

import gpred_py as g


def main():
    w = g.RadialPotential.square_barrier(10.0)
    sol = w.solve(1e-3)
    exact = 1.0 - math.tanh(math.sqrt(5.0)) / math.sqrt(5.0)
    assert abs(sol.a - exact) < 1e-8, sol.a
    corr = sol.correction(0.9)
    assert 1.0 < corr.kappa < corr.kappa_upper()
    assert abs(corr.coupling_integral() - corr.kappa * 8 * math.pi * sol.a) < 1e-6 * corr.kappa * 8 * math.pi * sol.a

    mode = g.TransverseMode({"kind": "harmonic", "strength": 1.0}, 48, 14.0)
    assert abs(mode.e0 - 2.0) < 1e-6
    assert abs(mode.coupling_b(1.0) - 4.0) < 1e-6

    x, re, im, samples = g.evolve_1d(64, 10.0, 2.0, {"kind": "plane_wave", "mode": 1}, 0.5, 1e-3, stride=100)
    assert len(x) == len(re) == 64
    assert abs(samples[-1]["norm"] - samples[0]["norm"]) < 1e-12

    for n in (2, 3):
        assert abs(g.product_alpha(n, 0.2) - 0.5 * n ** -0.2) < 1e-12
    m = g.weights(100, 0.1)
    assert m[-1] == 1.0 and all(b >= a for a, b in zip(m, m[1:]))

    rep = g.admissibility([(n, 2.0 ** -n) for n in range(1, 41)], 0.3, 0.85, 0.86)
    assert rep["admissible"] and rep["window"]
    try:
        g.admissibility([(1, 0.5)], 0.5)
    except ValueError:
        pass
    else:
        raise AssertionError("delta = 0.5 accepted")

    root = pathlib.Path(__file__).resolve().parents[3]
    with tempfile.TemporaryDirectory() as out:
        summary = g.run(root / "scenarios" / "barrier.toml", out)
        assert summary["passed"], summary["assertions"]
        assert len(summary["reproducibility"]["config_hash"]) == 64

    print("python smoke test ok")


if __name__ == "__main__":
    main()
