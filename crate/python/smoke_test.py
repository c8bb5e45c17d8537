"""Smoke test for the sflab extension module.

Build and install first:

    pip install --no-build-isolation ./crates/python
    python python/smoke_test.py
"""

import json
import math
import sys

import sflab


def main() -> int:
    cs1 = sflab.Spec.cs1()
    assert cs1.dims() == (4, [2, 2]), cs1.dims()
    assert sflab.Spec.cs2().dims() == (8, [2, 4])
    assert not sflab.Spec([(1, 1, 2), (1, 1, 3)]).is_valid()
    try:
        sflab.Spec([(1, 1, 2), (1, 1, 3)]).dims()
    except ValueError as e:
        assert "SumNotOne" in str(e)
    else:
        raise AssertionError("invalid spec accepted")

    base = cs1.base_relations()
    assert base.all_pass(), base.to_text()

    tower = sflab.Tower(cs1, 3)
    assert (tower.depth, tower.d, tower.ambient_dim) == (3, 4, 64)
    assert tower.relations().status != "fail"
    assert tower.tensor_copies(2).all_pass()
    assert tower.trace_collapse(2, samples=20).all_pass()
    again = sflab.Tower.from_json(tower.to_json())
    assert again.to_json() == tower.to_json()
    assert json.loads(tower.to_json())["depth"] == 3

    try:
        sflab.Tower(cs1, 9)
    except sflab.CapacityError:
        pass
    else:
        raise AssertionError("capacity not enforced")

    rep, kappa = sflab.tl_report("1/5", m=4)
    assert rep.all_pass(), rep.to_text()
    assert math.isclose(kappa, 0.10625, abs_tol=1e-12)
    assert kappa < 0.2 * 0.8
    assert all(math.isclose(a, b) for a, b in zip(sflab.markov_weights("1/5"), [0.2, 0.2, 0.6]))
    try:
        sflab.kappa("1/4")
    except ValueError as e:
        assert "(4, ∞) ∩ ℚ" in str(e)
    else:
        raise AssertionError("lambda = 1/4 accepted")

    assert [t for t in range(20) if sflab.shift_set_member("S1", t)] == [1, 3, 6, 10, 15]
    assert sflab.stream_prefix(11) == [0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1]

    print(f"sflab {sflab.__version__}: smoke test passed (kappa(1/5) = {kappa:.6f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
