"""Smoke test for the haltkit_py extension.

Build it with `maturin develop -m crates/py/Cargo.toml`, or copy
target/release/libhaltkit_py.so to haltkit_py.so somewhere on sys.path.
"""

import haltkit_py as hk


def main():
    r = hk.run("000")
    assert r["status"] == "halted" and r["steps"] == 1, r
    assert hk.run("011101110", budget=50)["status"] == "budget_exhausted"
    assert hk.certify("011101110")["status"] == "diverges"

    truth = hk.GroundTruth(10)
    assert truth.counts()["unknown"] == 0
    h = truth.halting_by_length()
    cum = truth.cumulative_halting()
    assert cum == [0, 1, 2, 4, 14, 28, 56, 148, 294, 588, 1393], cum
    assert truth.sandwich_constant(4) is not None
    rows = truth.budget_errors(1_000_000)["rows"]
    assert all(row["eps_num"] == 0 for row in rows)

    window = hk.Machine.window(truth)
    events = window.left_total().events()
    assert len(events) == sum(h)
    seats = {}
    for _, program, _, _ in events:
        n = len(program)
        assert int(program or "0", 2) == seats.get(n, 0)
        seats[n] = seats.get(n, 0) + 1

    std = hk.Machine.standard(12, 1 << 12)
    assert len(std.events(limit=100)) == 100

    bij = hk.build_bijection(7, width=64, window=64)
    assert bij["report"]["failures"] == [], bij["report"]
    assert {l for l, _ in bij["pairs"]} >= set(range(64))

    sp = hk.sparse_spoiler({"0000": "1/2", "0101": "1/4"}, eps="1/4")
    assert sp["added"][0] == "0000"

    dens = hk.set_with_density([0, 0, 1, 2, 5])
    assert [s for s in dens if len(s) == 4] == ["0000", "0001", "0010", "0011", "0100"]
    print("smoke ok")


if __name__ == "__main__":
    main()
