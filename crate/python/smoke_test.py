"""Smoke test for the pliable_py extension module.

Build and install first, e.g. from crates/py:
    maturin build --release -o dist && pip install dist/*.whl
"""

import csv
import io

import pliable_py as pl


def main():
    inst = pl.Instance(3, [[0], [1], [2], [0, 1], [0], [1], [0]])
    a, report = pl.bingreedy(inst)
    assert pl.is_valid_code(a, inst)
    assert report["rows_pruned"] == 3 and len(report["rounds"]) == 1
    assert pl.decodable_messages(a, inst, 3)

    # client 3 wants {0, 1} and knows message 2
    b = [1, 1, 0]
    x = a.encode(b)
    j, value = pl.decode_value(a, inst, 3, x, [b[2]])
    assert value == b[j]

    sat, records = pl.satisfied_set(a, inst)
    assert sat == list(range(7)) and records[0]["status"] == "satisfied"

    zero = pl.Matrix([[0, 0, 0], [0, 0, 0]])
    assert not pl.is_valid_code(zero, inst)
    assert pl.satisfied_set(zero, inst)[0] == []

    pairs = pl.Instance.all_pairs(4)
    ternary = pl.Matrix([[1, 1, 0, 1], [0, 1, 1, 2]], q=3)
    assert pl.is_valid_code(ternary, pairs)
    assert pl.optimal_code_length(pairs, q=2)[0] == 3
    k, witness = pl.optimal_code_length(pairs, q=3)
    assert k == 2 and pl.is_valid_code(witness, pairs)
    assert pl.minrank_fitted(pairs, q=3)[0] == 2
    assert pl.min_field_for_length2(4) == 3

    assert pl.rank([[1, 1], [1, 1]]) == 1
    assert pl.in_span([1, 0, 1], [[1, 0, 0], [0, 0, 1]])
    assert not pl.in_span([0, 1, 0], [[1, 0, 0], [0, 0, 1]])

    rnd = pl.Instance.random(80, 20, 0.3, seed=4)
    r1, _ = pl.randomized_code(rnd, seed=9)
    r2, _ = pl.randomized_code(rnd, seed=9)
    assert r1 == r2 and pl.is_valid_code(r1, rnd)
    assert pl.Instance.from_text(rnd.to_text()).requirements == rnd.requirements
    assert pl.Matrix.from_json(r1.to_json()) == r1

    text = pl.benchmark_csv([50, 100], instances=3, seed=2)
    assert text == pl.benchmark_csv([50, 100], instances=3, seed=2)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 12

    try:
        pl.Matrix([[2]], q=2)
    except pl.PliableError:
        pass
    else:
        raise AssertionError("entry outside F_2 accepted")

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
