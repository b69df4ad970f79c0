"""Smoke test for the Python bindings: python python/smoke_test.py"""

import math
import tempfile

import cascade_lab_py as cl


def main():
    times = [-1.0 + 0.05 * i for i in range(21)]
    run = cl.integrate_cascade(1.1, 15, -1.0, samples=21)
    exact = cl.closed_form_cascade(1.1, 15, times)
    err = max(abs(a / b - 1.0) for ra, rb in zip(run["x"], exact) for a, b in zip(ra, rb))
    assert err < 1e-8, err

    rho, phi = cl.Profile.bump(0.2), cl.Profile.phi(0.2)
    assert abs(rho.hilbert(0.0) + 0.5) < 1e-8
    assert abs(phi.hilbert(0.0) - 1.0) < 1e-8
    assert phi(-0.3) == -phi(0.3)

    consts = cl.interaction_constants(0.2, 0.05, 1.05)
    assert abs(consts["bootstrap_window"] - 0.102408) < 1e-6, consts["bootstrap_window"]

    assert abs(cl.stretching_rate(0.1) - 1.0) < 1e-8
    hw1 = cl.hw1_integral(0.1, 10.0, 1e-3, lambda_r=1.05, lambda_z=0.95)
    assert hw1["pass"], hw1

    closure = cl.closure_check(0.01, 200.0, 1e-4)
    assert math.isfinite(closure["c"])

    assert "cascade-lemmas" in cl.preset_names()
    with tempfile.TemporaryDirectory() as out:
        report = cl.run_preset("cascade", out=out, seed=7)
    assert report["status"] == "pass", report["status"]
    print("smoke test passed")


if __name__ == "__main__":
    main()
