import json
import random

import pytest

from toc.errors import EmptyInputError, UnknownTopicError
from toc.ingest import Dataset, ObjectCatalog, RatingRecord
from toc.metrics import purq
from toc.pipeline import (CLASSICAL, TOPIC_ORIENTED, ComparisonTable, FrameworkReport,
                          PipelineParams, compare, emit_report, load_json, run_classical,
                          run_topic_oriented)

from oracles import random_dataset

FAST = PipelineParams(runs=3, seed=7)
BETAS = (0.5, 0.75, 1, 1.5, 2)


def summary(framework, q, p):
    return FrameworkReport(framework, [], q, p, p, 0.0)


def dataset(pairs, catalog):
    return Dataset(tuple(RatingRecord(u, o, 1.0) for u, o in pairs), ObjectCatalog(catalog))


def test_topic_oriented_on_random_data():
    ds = random_dataset(random.Random(2), 25, 30)
    rep = run_topic_oriented(ds, None, ["T0", "T1", "T2"], FAST)
    assert rep.framework == TOPIC_ORIENTED
    assert rep.purity == 1 and rep.purity_mean == 1
    assert [c.topic for c in rep.clusters] == ["T0", "T1", "T2"]
    for row in rep.clusters:
        assert len(row.q_runs) == 3
        assert row.mean_q == pytest.approx(sum(row.q_runs) / 3)
    expected = sum(c.weight / rep.weight_t * c.mean_q for c in rep.clusters)
    assert rep.total_modularity == pytest.approx(expected, abs=1e-15)


def test_single_topic_equals_classical():
    ds = random_dataset(random.Random(4), 20, 25, n_topics=1)
    topic = run_topic_oriented(ds, None, ["T0"], FAST)
    classical = run_classical(ds, None, ["T0"], FAST)
    assert topic.weight_t == topic.clusters[0].weight
    assert topic.total_modularity == pytest.approx(classical.total_modularity, abs=1e-15)


def test_empty_ratings_error():
    ds = dataset([], {"o1": ["T"]})
    with pytest.raises(EmptyInputError, match="no rated objects for requested topics"):
        run_topic_oriented(ds, None, ["T"], FAST)
    with pytest.raises(EmptyInputError):
        run_classical(ds, None, ["T"], FAST)


def test_unknown_topic():
    ds = dataset([("u", "o1")], {"o1": ["T"]})
    with pytest.raises(UnknownTopicError):
        run_classical(ds, None, ["Nope"], FAST)


def test_classical_topic_disconnected_purity_one():
    pairs = [(f"a{i}", f"x{j}") for i in range(4) for j in range(3)]
    pairs += [(f"b{i}", f"y{j}") for i in range(4) for j in range(3)]
    cat = {**{f"x{j}": ["X"] for j in range(3)}, **{f"y{j}": ["Y"] for j in range(3)}}
    rep = run_classical(dataset(pairs, cat), None, ["X", "Y"], FAST)
    assert rep.framework == CLASSICAL
    assert rep.purity == 1
    assert rep.clusters[0].n_communities == 2


def test_classical_single_user():
    rep = run_classical(dataset([("u", "o1")], {"o1": ["T"]}), None, ["T"], FAST)
    assert rep.clusters[0].n_communities == 1
    assert rep.total_modularity == 0
    assert rep.purity == 1


def test_classical_mixed_purity_below_one():
    ds = random_dataset(random.Random(9), 30, 40, density=0.3)
    rep = run_classical(ds, None, ["T0", "T1", "T2"], FAST)
    assert 0 < rep.purity <= 1
    assert 0 < rep.purity_mean <= 1


def test_compare_book_crossing_cells():
    table = compare(summary(TOPIC_ORIENTED, 0.8469, 1), summary(CLASSICAL, 0.8375, 0.9050), BETAS)
    topic_row = table.rows[1]
    assert topic_row.framework == TOPIC_ORIENTED
    assert topic_row.purq == pytest.approx([0.9651, 0.9389, 0.9171, 0.8888, 0.8737], abs=1e-4)
    assert table.rows[0].purq == pytest.approx([0.8906, 0.8795, 0.8699, 0.8572, 0.8502], abs=1e-4)


def test_compare_identical_and_beta_zero():
    rep = summary("x", 0.3, 0.8)
    table = compare(rep, rep, [0, 1])
    assert table.rows[0].purq == table.rows[1].purq
    assert table.rows[0].purq[0] == pytest.approx(0.8, abs=1e-15)


def test_compare_undefined_cells():
    table = compare(summary(TOPIC_ORIENTED, -0.5, 0.1), summary(CLASSICAL, 0.2, 0.9), [1, 3])
    assert table.rows[1].purq[0] is None
    assert table.rows[1].purq[1] is not None
    assert table.has_undefined
    assert b"undefined" in emit_report(table, "tsv")


def test_emit_comparison_tsv_layout():
    table = compare(summary(TOPIC_ORIENTED, 0.1244, 1), summary(CLASSICAL, 0.1086, 0.9777), BETAS)
    lines = emit_report(table, "tsv").decode().splitlines()
    assert lines[0] == "framework\tQ\tpurity\tpurq_0.5\tpurq_0.75\tpurq_1\tpurq_1.5\tpurq_2"
    assert lines[1] == "classical\t0.1086\t0.9777\t0.3760\t0.2519\t0.1955\t0.1495\t0.1321"
    # recomputed from the rounded Q; the printed table has 0.4154 and 0.1509
    assert lines[2] == "topic-oriented\t0.1244\t1.0000\t0.4153\t0.2830\t0.2213\t0.1703\t0.1508"


def test_emit_json_roundtrip_full_precision():
    ds = random_dataset(random.Random(3), 20, 20)
    rep = run_topic_oriented(ds, None, ["T0", "T1"], FAST)
    assert load_json(emit_report(rep, "json")) == rep
    table = compare(rep, run_classical(ds, None, ["T0", "T1"], FAST))
    back = load_json(emit_report(table, "json"))
    assert isinstance(back, ComparisonTable) and back == table


def test_emit_empty_report_header_only():
    rep = summary(TOPIC_ORIENTED, 0, 1)
    assert emit_report(rep, "tsv").decode().count("\n") == 1
    assert emit_report(ComparisonTable([0.5], []), "tsv") == b"framework\tQ\tpurity\tpurq_0.5\n"
    with pytest.raises(ValueError):
        emit_report(rep, "xml")


def test_table_cells_self_consistent():
    rng = random.Random(8)
    for _ in range(20):
        a = summary(TOPIC_ORIENTED, rng.random(), rng.uniform(0.1, 1))
        b = summary(CLASSICAL, rng.random(), rng.uniform(0.1, 1))
        table = compare(a, b, BETAS)
        for row in table.rows:
            for beta, cell in zip(table.betas, row.purq):
                assert abs(cell - purq(row.purity, row.q, beta)) <= 1e-12


def test_pipeline_deterministic():
    ds = random_dataset(random.Random(6), 25, 30)
    one = emit_report(run_classical(ds, None, ["T0", "T1"], FAST), "json")
    two = emit_report(run_classical(ds, None, ["T0", "T1"], FAST), "json")
    assert one == two
    assert json.loads(one)["params"]["seed"] == 7
