import json
import struct

import numpy as np
import pytest

from hiertype.data import (
    DataError,
    DatasetRecord,
    VectorResolver,
    read_jsonl,
    read_vector_table,
    to_instances,
)
from hiertype.encoder import hashed_vector
from hiertype.model import (
    MAGIC,
    PARAM_NAMES,
    CheckpointError,
    HierTypingModel,
    OntologyMismatchError,
    load_checkpoint,
    read_checkpoint_header,
    save_checkpoint,
)
from hiertype.ontology import parse_ontology


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_jsonl_roundtrip_and_errors(tmp_path):
    p = _write(tmp_path / "d.jsonl", '{"tokens": ["a", "b"], "span": [1, 2], "labels": ["/x"]}\n\n')
    (rec,) = read_jsonl(p)
    assert rec.span == (1, 2) and rec.labels == ["/x"]
    bad = _write(tmp_path / "bad.jsonl", '{"tokens": ["a"], "span": [1, 1]}\n{oops\n')
    with pytest.raises(DataError, match="bad.jsonl:2"):
        read_jsonl(bad)
    span = _write(tmp_path / "span.jsonl", '{"tokens": ["a"], "span": [1, 2]}\n')
    with pytest.raises(DataError, match="span.jsonl:1"):
        read_jsonl(span)


def test_vector_table(tmp_path):
    p = _write(tmp_path / "v.tsv", "cat\t1\t2\ndog\t3\t4\n")
    table = read_vector_table(p)
    np.testing.assert_array_equal(table["dog"], [3.0, 4.0])
    with pytest.raises(DataError, match="v2.tsv:2"):
        read_vector_table(_write(tmp_path / "v2.tsv", "cat\t1\t2\ndog\t3\n"))


def test_resolver_priority():
    table = {"cat": np.array([1.0, 2.0])}
    inline = DatasetRecord(["cat"], (1, 1), vectors=[[9.0, 9.0]])
    plain = DatasetRecord(["cat", "zzz"], (1, 1))
    r = VectorResolver(table=table, hashed_dim=2)
    np.testing.assert_array_equal(r(inline), [[9.0, 9.0]])
    np.testing.assert_array_equal(r(plain), [[1.0, 2.0], [0.0, 0.0]])
    assert "1 OOV" in r.describe()
    h = VectorResolver(hashed_dim=3, hash_seed=5)
    np.testing.assert_array_equal(h(plain)[1], hashed_vector("zzz", 3, 5))
    with pytest.raises(DataError):
        VectorResolver()(plain)


def test_instances_validate_labels():
    t = parse_ontology(["/a/x"])
    r = VectorResolver(hashed_dim=2)
    (x,) = to_instances([DatasetRecord(["w"], (1, 1), ["/a/x"])], t, "undefined", r)
    assert x.gold == {t.index("/a"), t.index("/a/x")}
    with pytest.raises(DataError, match="unknown type"):
        to_instances([DatasetRecord(["w"], (1, 1), ["/nope"])], t, "undefined", r, "f")
    with pytest.raises(DataError):
        to_instances([DatasetRecord(["w"], (1, 1), [])], t, "undefined", r)


@pytest.fixture
def model():
    t = parse_ontology(["/a/x", "/b"])
    return HierTypingModel.init(t, d_w=3, d_t=4, d_h=5, dropout=0.2, seed=1)


def test_checkpoint_roundtrip(tmp_path, model):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, model, {"note": 1})
    loaded, header = load_checkpoint(path, model.tree)
    assert header["meta"] == {"note": 1} and header["num_nodes"] == len(model.tree)
    assert loaded.encoder.dropout == 0.2
    for name in PARAM_NAMES:
        np.testing.assert_array_equal(loaded.arrays()[name],
                                      model.arrays()[name].astype(np.float32))
    assert read_checkpoint_header(path)["dims"] == model.dims


def test_checkpoint_layout(tmp_path, model):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, model)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC
    version, n = struct.unpack("<IQ", raw[8:20])
    header = json.loads(raw[20:20 + n])
    assert version == 1
    assert [a[0] for a in header["arrays"]] == list(PARAM_NAMES)
    total = sum(int(np.prod(s)) for _, s in header["arrays"])
    assert len(raw) == 20 + n + 4 * total


def test_checkpoint_mismatch_and_corruption(tmp_path, model):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, model)
    with pytest.raises(OntologyMismatchError):
        load_checkpoint(path, parse_ontology(["/a/x", "/c"]))
    path.write_bytes(path.read_bytes()[:-4])
    with pytest.raises(CheckpointError, match="truncated"):
        load_checkpoint(path, model.tree)
    (tmp_path / "junk").write_bytes(b"notackpt" + bytes(12))
    with pytest.raises(CheckpointError, match="magic"):
        read_checkpoint_header(tmp_path / "junk")


def test_init_rejects_odd_type_dim():
    with pytest.raises(ValueError):
        HierTypingModel.init(parse_ontology(["/a"]), d_w=2, d_t=3)
