import numpy as np
import pytest

from localcut import graph as gr
from localcut.graph import GraphFormatError, conductance, parse_edge_list, stationary, write_edge_list


def test_single_edge():
    g = parse_edge_list("0 1")
    assert g.n == 2
    assert g.degree.tolist() == [1, 1]
    assert g.total_volume == 2


def test_four_cycle_text():
    g = parse_edge_list("0 1\n1 2\n2 3\n3 0")
    assert g.degree.tolist() == [2, 2, 2, 2]
    assert g.total_volume == 8
    assert g == gr.cycle(4)


def test_weighted_edge():
    g = parse_edge_list("0 1 2.5")
    assert g.degree.tolist() == [2.5, 2.5]
    assert g.total_volume == 5


def test_comments_blank_lines_and_crlf():
    g = parse_edge_list(b"# header\r\n\r\n0 1  # trailing\r\n1 2\r\n")
    assert g.n == 3 and g.edge_count == 2


def test_sparse_ids_are_compacted_and_labels_kept():
    g = parse_edge_list("10 30\n30 20\n")
    assert g.n == 3
    assert g.labels.tolist() == [10, 20, 30]
    assert g.index_of(30) == 2
    with pytest.raises(KeyError):
        g.index_of(5)


@pytest.mark.parametrize(
    "text, msg",
    [
        ("0 1\n1 1\n", "self-loop"),
        ("0 1\n1 0\n", "duplicate"),
        ("0 1 -1\n", "weight"),
        ("0 1 0\n", "weight"),
        ("0 1 nan\n", "weight"),
        ("0\n", "expected"),
        ("0 1 2 3\n", "expected"),
        ("a b\n", "integers"),
        ("-1 2\n", "negative"),
        ("# nothing\n", "empty"),
    ],
)
def test_malformed_inputs(text, msg):
    with pytest.raises(GraphFormatError, match=msg):
        parse_edge_list(text)


def test_error_reports_line_number():
    with pytest.raises(GraphFormatError) as info:
        parse_edge_list("0 1\n1 2\n2 2\n")
    assert info.value.line == 3


def test_canonical_writer_round_trip():
    g = gr.ring_of_cliques(3, 4, bridge_weight=0.25)
    text = write_edge_list(g)
    assert text.endswith("\n")
    assert parse_edge_list(text) == g
    assert write_edge_list(parse_edge_list(text)) == text


def test_digest_tracks_content():
    assert gr.cycle(5).digest() == parse_edge_list(write_edge_list(gr.cycle(5))).digest()
    assert gr.cycle(5).digest() != gr.cycle(6).digest()


def test_generators():
    assert gr.cycle(4) == parse_edge_list("0 1\n1 2\n2 3\n0 3")
    assert set(gr.complete(4).degree.tolist()) == {3}
    d = gr.dumbbell(5)
    assert conductance(d, range(5)) == (21, 1, 1 / 21)
    r = gr.ring_of_cliques(8, 5)
    assert r.n == 40 and r.edge_count == 8 * 10 + 8
    assert len(gr.components(gr.disjoint_cliques(8, 4))) == 8


@pytest.mark.parametrize("kind, args", [("cycle", (2,)), ("complete", (1,)), ("dumbbell", (1,)), ("ring_of_cliques", (1, 3))])
def test_generator_preconditions(kind, args):
    with pytest.raises(ValueError):
        gr.generate(kind, *args)


def test_conductance_examples(c4):
    assert conductance(c4, [0]) == (2, 2, 1.0)
    assert conductance(c4, [0, 1]) == (4, 2, 0.5)
    assert conductance(c4, range(4))[2] == 0.0
    with pytest.raises(ValueError):
        conductance(c4, [])


def test_stationary_examples(c4, db5):
    assert np.allclose(stationary(c4), 0.25)
    assert np.allclose(stationary(c4, [0, 1]), [0.5, 0.5, 0, 0])
    pi = stationary(db5, range(5))
    assert np.allclose(pi[:5], [4 / 21] * 4 + [5 / 21])
    assert np.all(pi[5:] == 0)
