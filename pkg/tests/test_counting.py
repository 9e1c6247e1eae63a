import json

import pytest

from hypercount import kernels
from hypercount.counting import (
    CSV_COLUMNS,
    CountRecord,
    ShardLedger,
    brute_force_count,
    check_xstrip_count,
    checkpoint_path,
    midform_count_xstrip,
    projective_count,
    records_to_csv,
    run_sharded,
    stratified_count_xstrip,
)
from hypercount.errors import (
    BudgetExceeded,
    CorruptCheckpoint,
    InvariantViolation,
    NotACone,
    SchemeMismatch,
)
from hypercount.ffield import FieldSpec, make_field
from hypercount.graphcore import cycle_graph, format_graph, ws_graph, xstrip_graph
from hypercount.matteval import ws_terms
from hypercount.motive import predicted_count, ws_class


class Stop(Exception):
    pass


def test_brute_examples():
    assert brute_force_count(cycle_graph(3), 2).count == 4
    assert brute_force_count("xstrip", 2).count == 12128
    assert brute_force_count("ws:3", 2).count == 36


def test_brute_budget():
    with pytest.raises(BudgetExceeded):
        brute_force_count("xstrip", 5)


@pytest.mark.parametrize("g", [cycle_graph(3), ws_graph(3), ws_graph(4)], ids=str)
@pytest.mark.parametrize("q", [2, 3])
def test_tree_sum_and_det_paths_agree(g, q):
    assert brute_force_count(g, q).count == brute_force_count(g, q, evaluator="trees").count


def test_graph_and_matrix_counts_agree_xstrip():
    # the substitution between edge variables and (A, B) is unimodular
    assert brute_force_count(xstrip_graph(), 2).count == brute_force_count("xstrip", 2).count == 12128


def test_file_source(tmp_path):
    path = tmp_path / "k4.txt"
    path.write_text(format_graph(ws_graph(3)))
    rec = brute_force_count(f"file:{path}", 2)
    assert rec.count == 36 and rec.graph == "file:k4.txt"


def test_f4_modulus_is_unique():
    # x^2 + x + 1 is the only monic irreducible quadratic over F_2, so F_4 has no alternative
    cands = []
    for c0 in range(2):
        for c1 in range(2):
            try:
                FieldSpec(2, 2, (c0, c1, 1))
                cands.append((c0, c1, 1))
            except ValueError:
                pass
    assert cands == [make_field(4).modulus]


@pytest.mark.parametrize("q,alt", [(8, (1, 1, 0, 1)), (9, (2, 1, 1)), (16, (1, 1, 0, 0, 1))])
def test_counts_independent_of_modulus(q, alt):
    std = make_field(q)
    other = FieldSpec(std.p, std.k, alt)
    assert other.modulus != std.modulus
    assert kernels.count_pencil_zeros(3, 6, ws_terms(3), std) == kernels.count_pencil_zeros(3, 6, ws_terms(3), other)


def test_projective_count():
    assert projective_count(36, 2) == 35
    assert projective_count(1, 7) == 0
    assert projective_count(4, 2) == 3
    with pytest.raises(NotACone):
        projective_count(6, 3)
    with pytest.raises(NotACone):
        projective_count(0, 3)


@pytest.mark.parametrize("q", [2, 3])
def test_modes_agree(q):
    base = stratified_count_xstrip(q, "baseline")
    acc = stratified_count_xstrip(q, "accelerated")
    assert (base.count, base.n_y, base.n_z) == (acc.count, acc.n_y, acc.n_z)
    assert base.count == predicted_count(q)
    assert base.method == "stratified" and acc.method == "stratified-accelerated"


def test_q4_extension_field():
    assert stratified_count_xstrip(4, "accelerated").count == predicted_count(4) == 80286208


@pytest.mark.parametrize("q", [2, 3])
def test_midform(q):
    count, n_v5, n_w = midform_count_xstrip(q)
    assert count == predicted_count(q)


def test_record_invariants():
    CountRecord("xstrip", 2, 2, 1, "brute", 12128)
    with pytest.raises(InvariantViolation):
        CountRecord("xstrip", 2, 2, 1, "brute", 12127)
    with pytest.raises(InvariantViolation):
        CountRecord("xstrip", 2, 2, 1, "stratified", 12128, 1024, 1003)
    with pytest.raises(InvariantViolation):
        CountRecord("ws:3", 2, 2, 1, "brute", 64, n_vars=6)
    with pytest.raises(InvariantViolation):
        check_xstrip_count(2, 6)
    with pytest.raises(InvariantViolation):
        check_xstrip_count(17, 17 * 17)


def test_record_serialization():
    rec = stratified_count_xstrip(2, "accelerated")
    data = json.loads(rec.dumps())
    assert list(data) == list(CSV_COLUMNS)
    assert data["count"] == "12128"
    assert CountRecord.from_json(data).count == rec.count
    lines = records_to_csv([rec]).splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1].startswith("xstrip,2,2,1,stratified-accelerated,12128,1024,1004,")


def test_big_counts_stay_exact():
    q = 31  # q^13 overflows 64 bits
    rec = CountRecord("xstrip", q, q, 1, "brute", predicted_count(q))
    assert json.loads(rec.dumps())["count"] == str(predicted_count(q))


def test_parallel_matches_serial():
    one = run_sharded(3, "accelerated", workers=1)
    many = run_sharded(3, "accelerated", workers=4)
    assert (one.count, one.n_y, one.n_z) == (many.count, many.n_y, many.n_z)


def test_shard_tallies_sum(tmp_path):
    seen = []
    rec = run_sharded(3, "baseline", checkpoint=tmp_path / "c", on_shard=lambda i, y, z: seen.append((i, y, z)))
    assert sorted(i for i, _, _ in seen) == list(range(9))
    assert all(y >= 0 and z >= 0 for _, y, z in seen)
    assert sum(y for _, y, _ in seen) == rec.n_y and sum(z for _, _, z in seen) == rec.n_z


def test_kill_and_resume(tmp_path):
    ckpt = tmp_path / "run.ckpt"
    first = []

    def die_after_four(i, y, z):
        first.append(i)
        if len(first) == 4:
            raise Stop

    with pytest.raises(Stop):
        run_sharded(3, "accelerated", checkpoint=ckpt, on_shard=die_after_four)
    text = ckpt.read_text()
    assert text.startswith("hypercount-ckpt v1\ngraph xstrip\nq 3\nmode accelerated\n")
    assert "total" not in text
    again = []
    rec = run_sharded(3, "accelerated", checkpoint=ckpt, on_shard=lambda i, y, z: again.append(i))
    assert rec.count == predicted_count(3)
    assert len(again) == 5 and not set(again) & set(first)
    assert ckpt.read_text().endswith(f"total {rec.count}\n")
    # a finished checkpoint replays without recomputation
    third = []
    assert run_sharded(3, "accelerated", checkpoint=ckpt, on_shard=lambda *a: third.append(a)).count == rec.count
    assert third == []


def test_truncated_line_is_dropped(tmp_path):
    ckpt = tmp_path / "c"
    ckpt.write_text("hypercount-ckpt v1\ngraph xstrip\nq 2\nmode baseline\nshard 0 1")
    led = ShardLedger(2, "baseline", ckpt)
    assert led.done == {}
    assert ckpt.read_text().endswith("mode baseline\n")


@pytest.mark.parametrize(
    "body",
    [
        "garbage\n",
        "hypercount-ckpt v1\ngraph xstrip\nq 2\nmode baseline\nshard 9 1 1\n",
        "hypercount-ckpt v1\ngraph xstrip\nq 2\nmode baseline\nshard 0 x 1\n",
        "hypercount-ckpt v1\ngraph xstrip\nq 2\nmode baseline\nshard 0 1 1\nshard 0 2 1\n",
        "hypercount-ckpt v1\ngraph xstrip\nq 2\nmode baseline\nshard 0 1 1\ntotal 5\n",
    ],
)
def test_corrupt_checkpoint(tmp_path, body):
    ckpt = tmp_path / "c"
    ckpt.write_text(body)
    with pytest.raises(CorruptCheckpoint):
        run_sharded(2, "baseline", checkpoint=ckpt)


def test_scheme_mismatch(tmp_path):
    ckpt = tmp_path / "c"
    run_sharded(2, "baseline", checkpoint=ckpt)
    with pytest.raises(SchemeMismatch):
        run_sharded(2, "accelerated", checkpoint=ckpt)
    with pytest.raises(SchemeMismatch):
        run_sharded(3, "baseline", checkpoint=ckpt)


def test_checkpoint_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERCOUNT_CHECKPOINT_DIR", str(tmp_path))
    assert checkpoint_path(3, "baseline", None) == tmp_path / "xstrip-q3-baseline.ckpt"
    assert checkpoint_path(3, "baseline", "x.ckpt") == tmp_path / "x.ckpt"
    assert checkpoint_path(3, "baseline", "/abs/x") == type(tmp_path)("/abs/x")
    run_sharded(2, "accelerated")
    assert (tmp_path / "xstrip-q2-accelerated.ckpt").exists()
    monkeypatch.delenv("HYPERCOUNT_CHECKPOINT_DIR")
    assert checkpoint_path(3, "baseline", None) is None


@pytest.mark.parametrize("m,q", [(3, 2), (3, 3), (4, 2)])
def test_ws_cone_relation(m, q):
    assert brute_force_count(f"ws:{m}", q).count == 1 + (q - 1) * ws_class(m)(q)
