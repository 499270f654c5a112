import json
import math

import numpy as np
import pytest

from suslab import formats
from suslab.config_sampler import MultiGraph
from suslab.degree_model import DegreeSequence
from suslab.errors import ParityError


def test_dist_specs():
    d = formats.dist_from_spec({"type": "explicit", "p": {"1": 0.5, "3": 0.5}})
    assert d.probs == {1: 0.5, 3: 0.5}
    d = formats.dist_from_spec({"type": "power_tail", "alpha": 0.5, "kmin": 1, "kmax": 1000, "p1_floor": 0.1})
    assert d.kmax == 1000 and d.tail_spec["alpha"] == 0.5
    d = formats.dist_from_spec({"type": "power_log_tail", "alpha": 2.0, "kmax": 1000})
    assert d.tail_spec["type"] == "power_log_tail"
    d = formats.dist_from_spec({"type": "lambda_mix", "h": {"type": "explicit", "p": {"3": 1}}, "lambda": 0.2})
    assert d.probs == pytest.approx({1: 0.8, 3: 0.2})
    with pytest.raises(ValueError):
        formats.dist_from_spec({"type": "nope"})


def test_sequence_file_roundtrip(tmp_path):
    path = tmp_path / "degs.txt"
    path.write_text("# comment\n1 4\n3 2  # trailing\n\n")
    seq = formats.read_sequence(path)
    assert seq.counts == {1: 4, 3: 2}
    formats.write_sequence(seq, tmp_path / "out.txt")
    assert formats.read_sequence(tmp_path / "out.txt").counts == seq.counts
    path.write_text("1 3\n")
    with pytest.raises(ParityError):
        formats.read_sequence(path)


def test_edge_list_roundtrip():
    g = MultiGraph(5, [[0, 1], [1, 1], [3, 4], [0, 1]])
    text = formats.format_edge_list(g, {"seed": 7})
    assert text.splitlines()[0].startswith("# suslab edge list n=5 m=4 seed=7")
    assert text.splitlines()[1] == "1 2"
    back = formats.parse_edge_list(text)
    assert back.n == 5 and np.array_equal(back.edges, g.edges)


def test_digest_depends_on_order():
    a = formats.sequence_digest(DegreeSequence([1, 3, 1, 3]))
    b = formats.sequence_digest(DegreeSequence([3, 1, 1, 3]))
    assert a != b and len(a) == 16


def test_infinity_encoding():
    obj = {"x": math.inf, "y": np.float64(2.5), "z": [np.int64(3)], 4: np.bool_(True)}
    assert json.loads(formats.dumps(obj)) == {"x": "inf", "y": 2.5, "z": [3], "4": True}
    csv = formats.rows_to_csv([{"a": math.inf, "b": 1.5, "c": 2}])
    assert csv == "a,b,c\n,1.5,2\n"
    assert formats.rows_to_csv([]) == ""
