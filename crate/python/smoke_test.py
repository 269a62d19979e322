"""Smoke test for the pyferrand extension module.

Build and install first:

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/pyferrand-*.whl
"""

import json
import math

import pyferrand


def close(a, b, tol):
    return abs(a - b) <= tol * abs(b)


def main():
    assert close(pyferrand.tau(1.0), 2.0, 1e-12)
    assert close(pyferrand.gamma(math.sqrt(2.0)), 4.0, 1e-12)
    assert close(pyferrand.tau_inv(pyferrand.tau(0.7)), 0.7, 1e-10)
    assert close(pyferrand.mu(0.5) * pyferrand.mu(math.sqrt(0.75)), math.pi**2 / 4, 1e-12)
    assert close(pyferrand.phi(2.0, 0.25), 0.8, 1e-12)

    lower, upper, exact = pyferrand.lambda_punctured_plane([1.0, 0.0], [2.0, 0.0])
    assert exact and lower == upper and close(lower, 2.0, 1e-12)
    lower, upper, exact = pyferrand.lambda_punctured_plane([1.0, 0.0], [0.3, 0.8], sandwich=True)
    assert not exact and lower < upper

    tau_form, psi_form, _ = pyferrand.profile_routes(0.01)
    assert tau_form <= 256 and close(psi_form, tau_form, 1e-8)

    spec = """
[frame]
kind = "log-polar"
center = [0.0, 0.0]

[plate_e]
id = "E"
primitives = [{ kind = "segment", a = [-1.0, 0.0], b = [0.0, 0.0] }]

[plate_f]
id = "F"
primitives = [{ kind = "ray", from = [1.0, 0.0], direction = [1.0, 0.0] }]
"""
    report = json.loads(pyferrand.oracle(spec))
    best = report["extrapolated"] or report["capacity"]
    assert close(best, 2.0, 0.02), best

    try:
        pyferrand.tau(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("tau(-1) should raise")

    print("pyferrand smoke test passed")


if __name__ == "__main__":
    main()
