import pytest
from hypothesis import given

from pdeglab.boolfn import ArityError, addressing_function, constant, dictator, or_function, parity
from pdeglab.dtree import (DecisionTree, Leaf, Node, decision_tree_depth, is_reduced, min_depth_tree,
                           reduced_tree)

import oracles
from expected import ADDR2_DEPTH
from strategies import functions


def test_addressing_depth():
    assert decision_tree_depth(addressing_function(2)) == ADDR2_DEPTH
    assert oracles.decision_depth(oracles.table_of(addressing_function(2)), 6) == ADDR2_DEPTH


def test_simple_depths():
    assert decision_tree_depth(constant(3, 1)) == 0
    assert decision_tree_depth(dictator(3, 1)) == 1
    assert decision_tree_depth(parity(3)) == 3
    assert decision_tree_depth(or_function(4)) == 4


@given(functions())
def test_min_depth_tree_matches_oracle(f):
    tree = min_depth_tree(f)
    assert tree.to_function() == f
    assert tree.depth == decision_tree_depth(f) == oracles.decision_depth(oracles.table_of(f), f.arity)


@given(functions())
def test_reduction_preserves_function(f):
    tree = reduced_tree(min_depth_tree(f))
    assert is_reduced(tree)
    assert tree.to_function() == f


def test_reduction_collapses_redundant_query():
    t = DecisionTree(2, Node(0, Node(1, Leaf(0), Leaf(1)), Node(1, Leaf(0), Leaf(1))))
    assert not is_reduced(t)
    r = reduced_tree(t)
    assert r.root == Node(1, Leaf(0), Leaf(1))


def test_tree_rejects_repeated_query():
    with pytest.raises(ValueError):
        DecisionTree(2, Node(0, Node(0, Leaf(0), Leaf(1)), Leaf(1)))


def test_json_round_trip_and_path():
    tree = min_depth_tree(addressing_function(2))
    again = DecisionTree.from_json(tree.to_json())
    assert again == tree
    a = 0b000110
    assert tree.evaluate(a) == addressing_function(2)(a)
    assert len(tree.path(a)) <= tree.depth


def test_depth_cap():
    with pytest.raises(ArityError):
        decision_tree_depth(constant(13, 0))
