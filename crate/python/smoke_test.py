"""Smoke test for the teichlab Python extension.

Build and install first, e.g. `maturin develop -m crates/py/Cargo.toml`.
"""

import math

import teichlab


def main():
    sigma = teichlab.FnPoint(1.0, 0.0)
    assert sigma.curve_length("1/0") == 1.0
    tau = teichlab.FnPoint(1.0, 3.0)
    d = teichlab.dl(sigma, tau)
    assert d.value > 0 and d.guarantee == "lower-bound-by-truncation"
    assert teichlab.dl(sigma, sigma, ["1/0", "0/1", "1/1"]).value == 0.0

    a = teichlab.AnnulusPoint(0.0, 1e-3)
    b = teichlab.AnnulusPoint(0.0, 1e-2)
    brute = teichlab.dla_bruteforce(a, b)
    est = teichlab.dla_estimate(a, b)
    assert abs(est.value - math.log(10.0)) < 1e-12
    assert abs(brute.value - est.value) < 1.0

    t1, t2 = teichlab.FlatTorus(0.0, 1.0), teichlab.FlatTorus(0.0, 2.0)
    assert abs(teichlab.flat_torus_dt(t1, t2).value - 0.5 * math.log(2.0)) < 1e-9

    s, t = teichlab.divergent_pair(4.0, 1.0)
    assert s.curve_length("1/0") == t.curve_length("1/0")

    names = [n for n, _, _ in teichlab.list_experiments()]
    assert len(names) == 9
    csv, summary, passed = teichlab.run_experiment("hexagon-selftest", ["samples=50"])
    assert passed and csv.startswith("kind,index"), summary
    print("smoke test passed:", summary)


if __name__ == "__main__":
    main()
