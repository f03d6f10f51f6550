import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import best_matches_bruteforce
from sdsc.errors import ValidationError
from sdsc.metrics import accuracy, bestmap, connectivity, evaluate, nmi

labelings = st.integers(1, 5).flatmap(
    lambda k: st.lists(st.integers(0, k - 1), min_size=1, max_size=30))


def test_bestmap_relabels():
    assert bestmap([1, 1, 0, 0], [0, 0, 1, 1]) == {1: 0, 0: 1}


def test_bestmap_extra_predicted_label_unmatched():
    m = bestmap([0, 0, 1, 2], [5, 5, 6, 6])
    assert m[0] == 5 and sorted(v for v in m.values() if v is not None) == [5, 6]
    assert list(m.values()).count(None) == 1


def test_accuracy_examples():
    assert accuracy([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0
    assert accuracy([0, 0, 0, 1], [0, 0, 1, 1]) == 0.75
    assert accuracy([3] * 5, [0, 1, 2, 3, 4]) == pytest.approx(1 / 5)


def test_bruteforce_agreement():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = int(rng.integers(1, 16))
        kp, kt = rng.integers(1, 7, size=2)
        pred = rng.integers(0, kp, n).tolist()
        truth = rng.integers(0, kt, n).tolist()
        assert accuracy(pred, truth) * n == pytest.approx(best_matches_bruteforce(pred, truth))
        m = bestmap(pred, truth)
        assert sum(m[p] == t for p, t in zip(pred, truth)) == best_matches_bruteforce(pred, truth)


def test_nmi_examples():
    assert nmi([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert nmi([0, 1, 0, 1], [0, 0, 1, 1]) == pytest.approx(0.0, abs=1e-12)
    assert nmi([0, 0, 0], [1, 1, 1]) == 1.0


def test_nmi_hand_value():
    # U = {0,0,1}, V = {0,1,1}
    p = np.array([[1, 0], [1, 1]]) / 3
    pu, pv = p.sum(1), p.sum(0)
    mi = sum(p[i, j] * math.log(p[i, j] / (pu[i] * pv[j]))
             for i in range(2) for j in range(2) if p[i, j] > 0)
    h = -sum(q * math.log(q) for q in pu) - sum(q * math.log(q) for q in pv)
    assert nmi([0, 0, 1], [0, 1, 1]) == pytest.approx(2 * mi / h, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_nmi_properties(data):
    a = data.draw(labelings)
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    v = nmi(a, b)
    assert 0.0 <= v <= 1.0
    assert v == pytest.approx(nmi(b, a), abs=1e-12)
    assert 0.0 <= accuracy(a, b) <= 1.0


def test_label_count_mismatch():
    with pytest.raises(ValidationError):
        accuracy([0, 1], [0])


def test_connectivity_values():
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = W[2, 3] = W[3, 2] = 1.0
    assert connectivity(W) <= 1e-8
    K3 = np.ones((3, 3)) - np.eye(3)
    assert connectivity(K3) == pytest.approx(1.5)
    assert connectivity(np.array([[0.0, 0.3], [0.3, 0.0]])) == pytest.approx(2.0)


def test_connectivity_permutation_invariant(rng):
    A = rng.uniform(0, 1, (15, 15))
    W = np.triu(A, 1)
    W = W + W.T
    p = rng.permutation(15)
    assert connectivity(W[np.ix_(p, p)]) == pytest.approx(connectivity(W), abs=1e-10)


def test_evaluate_report():
    rep = evaluate([0, 0, 0, 1], [0, 0, 1, 1]).to_dict()
    assert rep["acc"] == 0.75 and "conn" not in rep
    assert rep["permutation"] == {"0": 0, "1": 1}
    K3 = np.ones((3, 3)) - np.eye(3)
    assert evaluate([0, 0, 0], [0, 0, 0], K3).to_dict()["conn"] == pytest.approx(1.5)
