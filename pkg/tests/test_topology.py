import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphs import random_connected
from pmuplace.topology import (FIXTURES, Network, NetworkParseError, build_connectivity,
                               load_network, parse_network, renumber, renumber_permutation)

# closed neighbourhoods of the IEEE 14-bus rows, 1-based
IEEE14_ROWS = {
    1: {1, 2, 5}, 2: {1, 2, 3, 4, 5}, 3: {2, 3, 4}, 4: {2, 3, 4, 5, 7, 9},
    5: {1, 2, 4, 5, 6}, 6: {5, 6, 11, 12, 13}, 7: {4, 7, 8, 9}, 8: {7, 8},
    9: {4, 7, 9, 10, 14}, 10: {9, 10, 11}, 11: {6, 10, 11}, 12: {6, 12, 13},
    13: {6, 12, 13, 14}, 14: {9, 13, 14},
}


def test_parse_smallest():
    net = parse_network("2 1\n1 2")
    assert net.n == 2
    assert net.branches == ((0, 1),)
    assert net.labels == (1, 2)


def test_parse_comments_and_blank_lines():
    net = parse_network("# header\n\n3 2  # n m\n1 2\n\n2 3 # tail\n")
    assert net.branches == ((0, 1), (1, 2))


def test_parallel_branches_collapse():
    net = parse_network("3 3\n1 2\n2 1\n2 3")
    assert net.branches == ((0, 1), (1, 2))
    assert net.n_lines == 3


@pytest.mark.parametrize("text, line, fragment", [
    ("2 1\n1 x", 2, "non-integer"),
    ("2 1\n1 2 3", 2, "expected branch"),
    ("2 1\n1 3", 2, "undeclared bus 3"),
    ("2 1\n2 2", 2, "self-loop"),
    ("0 0", 1, "empty system"),
    ("3 1 4\n1 2", 1, "header"),
    ("2 1\nbus 1 2\nbus 2\n1 2", 3, "declared twice"),
])
def test_parse_errors_carry_line_number(text, line, fragment):
    with pytest.raises(NetworkParseError) as exc:
        parse_network(text)
    assert exc.value.line == line
    assert fragment in str(exc.value)


def test_parse_errors_without_line():
    with pytest.raises(NetworkParseError, match="empty system"):
        parse_network("# nothing here\n")
    with pytest.raises(NetworkParseError, match="declares 2 branches"):
        parse_network("3 2\n1 2")


def test_disconnected_network_warns():
    with pytest.warns(UserWarning, match="not connected"):
        net = parse_network("4 2\n1 2\n3 4")
    assert net.n == 4


def test_bus_declarations():
    net = parse_network("3 2\nbus 10 40 20\n10 40\n20 40")
    assert net.labels == (10, 40, 20)
    assert net.branches == ((0, 1), (1, 2))


def test_renumber_identity():
    net = parse_network("3 2\n1 2\n2 3")
    assert renumber(net) == net


def test_renumber_ascending_labels():
    with pytest.warns(UserWarning):
        net = parse_network("3 1\nbus 10 40 20\n10 40", name="t")
    r = renumber(net)
    assert r.labels == (10, 20, 40)
    assert r.branches == ((0, 2),)  # {10, 40} becomes {1, 3} in 1-based terms


@pytest.mark.parametrize("name, n, lines", [
    ("ieee14", 14, 20), ("ieee30", 30, 41), ("ieee57", 57, 80),
    ("ieee118", 118, 186), ("ieee300", 300, 411),
])
def test_fixture_sizes(name, n, lines):
    net = load_network(name)
    assert net.n == n
    assert net.n_lines == lines
    assert net.is_connected()


def test_fixture_list_complete():
    for name in FIXTURES:
        load_network(name)


def test_ieee300_renumbered_dense():
    raw = load_network("ieee300", renumbered=False)
    net = load_network("ieee300")
    assert max(raw.labels) > 300
    assert list(net.labels) == sorted(raw.labels)
    assert len(net.branches) == len(raw.branches)


def test_ieee14_rows(ieee14):
    _, A = ieee14
    for bus, support in IEEE14_ROWS.items():
        assert set(np.flatnonzero(A[bus - 1]) + 1) == support


def test_connectivity_single_bus():
    assert build_connectivity(Network(1, (), (1,))).tolist() == [[1]]


def test_data_dir_override(tmp_path, monkeypatch):
    (tmp_path / "tiny.txt").write_text("2 1\n1 2\n")
    monkeypatch.setenv("PMUPLACE_DATA", str(tmp_path))
    assert load_network("tiny").n == 2


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(0, 10_000))
def test_connectivity_properties(n, seed):
    rng = np.random.default_rng(seed)
    net = random_connected(n, rng)
    A = build_connectivity(net)
    assert np.array_equal(A, A.T)
    assert np.all(np.diag(A) == 1)
    adj = net.neighbors()
    for i in range(n):
        assert set(np.flatnonzero(A[i])) == {i, *adj[i]}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10_000))
def test_renumber_is_permutation(n, seed):
    rng = np.random.default_rng(seed)
    base = random_connected(n, rng)
    labels = rng.choice(1000, size=n, replace=False) + 1
    net = Network(n, base.branches, tuple(int(l) for l in labels))
    r = renumber(net)
    P = np.eye(n, dtype=int)[renumber_permutation(net)]
    assert np.array_equal(build_connectivity(r), P @ build_connectivity(net) @ P.T)
    assert list(r.labels) == sorted(net.labels)
