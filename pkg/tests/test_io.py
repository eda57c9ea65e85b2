"""Canonical serialization: byte-stable JSON, 17-digit float round trips,
CSV for one and two dimensions, matrices, witnesses, reports."""
import math
from dataclasses import dataclass

import numpy as np
import pytest

from logcvx import (EXP, LOG, ConditionEntry, ConditionWitness,
                    GridValidationError, RelationEntry, RelationWitness,
                    SchemaError, SequenceGrid, WeightMatrix, canonical_json,
                    factorial_grid, fmt_float, notconvex_grid,
                    read_condition_witness, read_grid, read_matrix,
                    read_relation_witness, read_report, to_jsonable,
                    write_condition_witness, write_grid, write_matrix,
                    write_relation_witness, write_report)


# ----------------------------------------------------------- float format


def test_fmt_float_17_digits_round_trip():
    for x in [math.exp(3.0), 0.1, 1.0 / 3.0, 2.0 ** -52, -1234.5678e-12]:
        assert float(fmt_float(x)) == x
    assert fmt_float(math.exp(3.0)) == "20.085536923187668"
    assert fmt_float(0.1) == "0.10000000000000001"


def test_fmt_float_specials_and_signed_zero():
    assert fmt_float(math.inf) == "inf"
    assert fmt_float(-math.inf) == "-inf"
    assert fmt_float(math.nan) == "nan"
    assert fmt_float(-0.0) == "0"
    assert fmt_float(0.0) == "0"


# --------------------------------------------------------- canonical JSON


def test_canonical_json_sorts_keys_and_stays_compact():
    a = {"b": 1, "a": [True, None, "x"]}
    b = {"a": [True, None, "x"], "b": 1}
    text = canonical_json(a)
    assert text == canonical_json(b)
    assert text == '{"a":[true,null,"x"],"b":1}'


def test_canonical_json_quotes_special_floats():
    text = canonical_json({"v": [math.inf, -math.inf, math.nan, 2.5]})
    assert text == '{"v":["inf","-inf","nan",2.5]}'


def test_canonical_json_rejects_non_plain_data():
    with pytest.raises(TypeError):
        canonical_json({1: "non-string key"})
    with pytest.raises(TypeError):
        canonical_json({"x": object()})


def test_to_jsonable_unpacks_dataclasses_and_numpy():
    @dataclass
    class Point:
        xs: tuple
        n: int

    out = to_jsonable({"p": Point((1.0, 2.0), 3), "arr": np.array([1, 2]),
                       "s": {2, 1}, "f": np.float64(0.5), "i": np.int64(7)})
    assert out == {"p": {"xs": [1.0, 2.0], "n": 3}, "arr": [1, 2],
                   "s": [1, 2], "f": 0.5, "i": 7}


def test_report_round_trip_restores_specials_and_null():
    payload = {"vals": [1.5, math.inf, -math.inf], "gap": math.nan, "n": None}
    back = read_report(write_report(payload))
    assert back["vals"] == [1.5, math.inf, -math.inf]
    assert math.isnan(back["gap"])
    assert math.isnan(back["n"])
    with pytest.raises(SchemaError):
        read_report("{not json")


# -------------------------------------------------------------- grid JSON


def test_grid_json_round_trip_is_exact():
    g = notconvex_grid((2, 2))
    back = read_grid(write_grid(g))
    assert back.box == g.box and back.scale == g.scale
    assert np.array_equal(back.values, g.values)


def test_grid_json_round_trip_keeps_infinities():
    g = SequenceGrid((2,), [0.0, math.exp(3.0), math.inf], LOG)
    text = write_grid(g)
    assert '"inf"' in text
    assert "20.085536923187668" in text
    back = read_grid(text)
    assert np.array_equal(back.values, g.values)


def test_grid_json_write_is_byte_stable():
    g = factorial_grid(5)
    assert write_grid(g) == write_grid(factorial_grid(5))
    assert write_grid(g).count("\n") == 0


def test_read_grid_accepts_dict_bytes_and_sniffs_csv():
    g = factorial_grid(3)
    text = write_grid(g)
    assert np.array_equal(read_grid(text.encode()).values, g.values)
    import json
    assert np.array_equal(read_grid(json.loads(text)).values, g.values)
    csv_text = write_grid(g, fmt="csv")
    assert np.array_equal(read_grid(csv_text).values, g.values)
    with pytest.raises(SchemaError):
        read_grid(42)
    with pytest.raises(ValueError):
        read_grid(text, fmt="yaml")
    with pytest.raises(ValueError):
        write_grid(g, fmt="yaml")


def test_read_grid_schema_error_paths():
    good = {"box": [2], "dim": 1, "scale": "log", "values": [0.0, 1.0, 2.0]}
    cases = [
        ({**good, "box": [-1]}, "/box"),
        ({**good, "dim": 2}, "/dim"),
        ({**good, "scale": "linear"}, "/scale"),
        ({**good, "values": [0.0, 1.0]}, "/values"),
        ({**good, "values": [0.0, "big", 2.0]}, "/values/1"),
        ({k: v for k, v in good.items() if k != "values"}, "/values"),
    ]
    for obj, path in cases:
        with pytest.raises(SchemaError) as err:
            read_grid(obj)
        assert err.value.path == path


def test_read_grid_validates_semantics_unless_told_not_to():
    bad = {"box": [1], "dim": 1, "scale": "exp", "values": [1.0, -2.0]}
    with pytest.raises(GridValidationError):
        read_grid(bad)
    raw = read_grid(bad, validate=False)
    assert raw.value((1,)) == -2.0


def test_grid_json_normalizes_negative_zero():
    g = SequenceGrid((1,), [0.0, -0.0], LOG)
    text = write_grid(g)
    assert "-0" not in text
    assert read_grid(text).value((1,)) == 0.0


# --------------------------------------------------------------- grid CSV


def test_csv_round_trip_one_dimension():
    g = SequenceGrid((3,), [0.0, 2.0, math.inf, 6.0], LOG)
    text = write_grid(g, fmt="csv")
    assert text.startswith("# dim: 1\n# scale: log\nalpha,value\n")
    back = read_grid(text)
    assert back.box == (3,) and back.scale == LOG
    assert np.array_equal(back.values, g.values)


def test_csv_round_trip_two_dimensions():
    g = notconvex_grid((2, 2))
    text = write_grid(g, fmt="csv")
    lines = text.splitlines()
    assert lines[2] == ",0,1,2"
    assert lines[3].startswith("0,1,")
    back = read_grid(text)
    assert back.box == g.box and back.scale == EXP
    assert np.array_equal(back.values, g.values)


def test_csv_rejects_higher_dimensions():
    g3 = SequenceGrid((1, 1, 1), np.zeros(8), LOG)
    with pytest.raises(ValueError):
        write_grid(g3, fmt="csv")


def test_csv_schema_errors():
    with pytest.raises(SchemaError) as e1:
        read_grid("alpha,value\n0,1\n", fmt="csv")
    assert "scale" in e1.value.path
    with pytest.raises(SchemaError):
        read_grid("# scale: log\nalpha,value\n0,0\n", fmt="csv")  # no dim
    with pytest.raises(SchemaError):
        read_grid("# dim: 3\n# scale: log\n", fmt="csv")
    with pytest.raises(SchemaError):
        read_grid("# dim: 1\n# scale: log\nwrong,header\n0,0\n", fmt="csv")
    with pytest.raises(SchemaError):
        read_grid("# dim: 1\n# scale: log\nalpha,value\n0,0\n2,5\n", fmt="csv")
    with pytest.raises(SchemaError):
        read_grid("# dim: 2\n# scale: log\nx,0,1\n0,0,1\n", fmt="csv")
    with pytest.raises(SchemaError):
        read_grid("# dim: 2\n# scale: log\n,0,1\n1,0,1\n", fmt="csv")
    with pytest.raises(SchemaError):
        read_grid("# dim: 1\n# scale: log\nalpha,value\n0,zero\n", fmt="csv")


# ----------------------------------------------------------------- matrix


def test_matrix_round_trip():
    lad = WeightMatrix(
        (1.0, 2.0),
        (factorial_grid(4),
         SequenceGrid.from_function((4,), lambda a: math.factorial(a[0]) * 2.0 ** a[0], EXP)))
    back = read_matrix(write_matrix(lad))
    assert back.levels == lad.levels
    for g1, g2 in zip(back.grids, lad.grids):
        assert np.array_equal(g1.values, g2.values)


def test_matrix_reader_wraps_semantic_failures():
    f3 = {"box": [3], "dim": 1, "scale": "exp",
          "values": [1.0, 1.0, 2.0, 6.0]}
    halved = {**f3, "values": [1.0, 0.5, 1.0, 3.0]}
    with pytest.raises(SchemaError) as err:
        read_matrix({"levels": [1.0, 2.0], "grids": [f3, halved]})
    assert err.value.path == "/grids"
    assert "monotone" in err.value.found
    with pytest.raises(SchemaError):
        read_matrix({"levels": [1.0], "grids": []})
    with pytest.raises(SchemaError):
        read_matrix({"levels": [], "grids": []})
    with pytest.raises(SchemaError):
        read_matrix({"grids": []})
    with pytest.raises(SchemaError):
        read_matrix("[1,2]")


# -------------------------------------------------------------- witnesses


def test_relation_witness_round_trip():
    w = RelationWitness("triangle", (RelationEntry(1.0, 2.0, 64.0, 0.5),
                                     RelationEntry(2.0, 2.0, 8.0, 0.25)))
    text = write_relation_witness(w)
    assert read_relation_witness(text) == w
    plain = RelationWitness("roumieu", (RelationEntry(1.0, 1.0, 10.0),))
    back = read_relation_witness(write_relation_witness(plain))
    assert back == plain
    assert back.entries[0].h is None


def test_relation_witness_schema_errors():
    with pytest.raises(SchemaError) as err:
        read_relation_witness({"kind": "sideways", "entries": []})
    assert err.value.path == "/kind"
    with pytest.raises(SchemaError):
        read_relation_witness({"kind": "roumieu", "entries": [{"lambda": 1.0}]})
    with pytest.raises(SchemaError):
        read_relation_witness({"kind": "roumieu", "entries": "nope"})


def test_condition_witness_round_trips_every_shape():
    shapes = [
        ConditionWitness("L37R", (ConditionEntry(1.0, 1.0, A=2.0),)),
        ConditionWitness("L12R", (ConditionEntry(1.0, 2.0, B=1.0, C=3.0, H=0.5),)),
        ConditionWitness("L12B", (ConditionEntry(2.0, 1.0, H=1.0,
                                                 pairs=((1.0, 2.0), (4.0, 8.0))),)),
    ]
    for w in shapes:
        assert read_condition_witness(write_condition_witness(w)) == w


def test_condition_witness_schema_errors():
    with pytest.raises(SchemaError) as err:
        read_condition_witness({"condition": "L99X", "entries": []})
    assert err.value.path == "/condition"
    with pytest.raises(SchemaError):
        read_condition_witness({"condition": "L12B",
                                "entries": [{"lambda": 1.0, "kappa": 1.0,
                                             "H": 1.0, "pairs": [[1.0]]}]})
