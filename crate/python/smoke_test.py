"""Smoke test for the clusterbus_py extension module."""

import clusterbus_py as cb


def main():
    assert len(cb.surface_qubits(2)) == 5
    assert len(cb.cluster_qubits(2, 3)) == 21

    surf = cb.Protocol.surface(3)
    assert surf.kind == "surface" and surf.R is None
    assert surf.outcome() == (0, 0)
    q = surf.qubits()[0]
    print(repr(surf), "single X on", q, "->", surf.outcome(x=[q]))
    assert surf.decode([False] * len(surf.measured_qubits())) == (False, False)

    stats = surf.run_trials("depolarizing:0.01", 2000, seed=1)
    assert sum(stats["counts"]) == 2000
    again = surf.run_trials("depolarizing:0.01", 2000, seed=1, threads=2)
    assert stats["counts"] == again["counts"]
    print("surface d=3 nu00_hat", stats["nu00_hat"], "ci", stats["ci"])

    bus = cb.Protocol.cluster(3, 5)
    assert bus.run_trials("bitflip:0.0", 10)["counts"] == [10, 0, 0, 0]

    assert abs(cb.closed_form_bound("max-R", 5, 1e-4, r=199) - 200.0) < 1e-9
    try:
        cb.closed_form_bound("surface-failure", 3, 0.5)
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("out-of-validity p accepted")

    conv = cb.converse(4, 51, 0.25, 200, seed=3)
    assert conv["pr_appr"] == 1.0
    assert cb.oracle_check("exhaustive-d2")
    print("smoke test passed")


if __name__ == "__main__":
    main()
