import math

import numpy as np
import pytest
from hypothesis import given, settings

from pdeglab.boolfn import (Projection, addressing_function, dictator, is_truly_n_variate, parity, project)
from pdeglab.dtree import DecisionTree, Leaf, Node, decision_tree_depth, min_depth_tree, reduced_tree
from pdeglab.projection import (PseudoaddressingCertificate, addressing_points, check_paths, conflict_graph,
                                example_tree, extract_pseudoaddressing, independent_set, path_pairs, project_tree,
                                random_restriction_F, sample_projection, tree_matches_projection,
                                verify_certificate)

import oracles
from expected import ADDR2_DEPTH, ADDR2_PROJECTION_R, EXAMPLE_TREE_R
from strategies import nonconstant_functions


@pytest.fixture(scope="module")
def addr2_cert():
    return extract_pseudoaddressing(addressing_function(2), seed=0)


def test_path_pairs_diverge_and_agree_elsewhere():
    tree = reduced_tree(min_depth_tree(addressing_function(2)))
    pairs = path_pairs(tree)
    assert sorted(pairs) == list(range(6))
    for v, pp in pairs.items():
        assert pp.consistent()
        assert pp.path0[:len(pp.prefix)] == pp.prefix == pp.path1[:len(pp.prefix)]
        assert dict(pp.path0)[v] != dict(pp.path1)[v]


def test_addressed_pairs_only_see_address_bits():
    tree = reduced_tree(min_depth_tree(addressing_function(2)))
    pairs = path_pairs(tree)
    for v in range(2, 6):
        assert pairs[v].others <= {0, 1}


def test_paths_end_in_the_right_leaves():
    tree = reduced_tree(example_tree())
    f = tree.to_function()
    for pp in path_pairs(tree).values():
        a0 = sum(b << v for v, b in pp.path0)
        a1 = sum(b << v for v, b in pp.path1)
        assert f(a0) == 0 and f(a1) == 1
        assert tree.path(a0) == pp.path0 and tree.path(a1) == pp.path1


def test_unreduced_tree_rejected():
    tree = DecisionTree(2, Node(0, Node(1, Leaf(0), Leaf(1)), Node(1, Leaf(0), Leaf(1))))
    with pytest.raises(ValueError):
        path_pairs(tree)


def test_star_conflict_graph():
    # the root variable conflicts with every leaf-level variable
    tree = DecisionTree(4, Node(0, Node(1, Leaf(0), Leaf(1)), Node(2, Node(3, Leaf(0), Leaf(1)), Leaf(1))))
    pairs = path_pairs(tree)
    adj = conflict_graph(pairs, 4)
    assert adj[0] >= {1, 2}
    indep = independent_set(pairs, 4, tree.depth)
    assert all(not (adj[u] & set(indep)) for u in indep)
    assert len(indep) * (4 * tree.depth + 1) >= 4


def test_independent_set_with_no_conflicts():
    tree = DecisionTree(1, Node(0, Leaf(0), Leaf(1)))
    assert independent_set(path_pairs(tree), 1, 1) == (0,)


def test_project_tree_identity():
    tree = example_tree()
    same = project_tree(tree, Projection(tuple(range(10)), 10))
    assert same == tree


def test_project_tree_prunes_inconsistent_branches():
    tree = example_tree()
    nu = Projection((0, 1, 2, 2, 2, 5, 6, 7, 8, 9), 10)
    projected = project_tree(tree, nu)
    assert 9 not in projected.variables() and 3 not in projected.variables()
    assert np.array_equal(projected.to_function().table, project(tree.to_function(), nu).table)


def test_example_tree_shape():
    tree = example_tree()
    assert tree.depth == 4 and tree.arity == 10
    assert is_truly_n_variate(tree.to_function())
    assert decision_tree_depth(tree.to_function()) == 4


def test_addr2_certificate(addr2_cert):
    cert = addr2_cert
    assert cert.source_depth == ADDR2_DEPTH
    assert cert.r == 10 * ADDR2_DEPTH ** 2 == ADDR2_PROJECTION_R
    assert cert.t >= math.ceil(len(cert.independent) / 2)
    assert verify_certificate(cert)
    assert tree_matches_projection(cert)


def test_example_tree_certificate():
    tree = example_tree()
    cert = extract_pseudoaddressing(tree.to_function(), seed=3, tree=tree)
    assert cert.r == EXAMPLE_TREE_R
    assert cert.t >= math.ceil(len(cert.independent) / 2)
    assert verify_certificate(cert)


def test_certificate_json_round_trip(addr2_cert):
    back = PseudoaddressingCertificate.from_json(addr2_cert.to_json())
    assert back == addr2_cert
    assert verify_certificate(back)


def _flip_first_leaf(node):
    if isinstance(node, Leaf):
        return Leaf(1 - node.value)
    return Node(node.var, _flip_first_leaf(node.lo), node.hi)


def test_tampered_tree_fails(addr2_cert):
    data = addr2_cert.to_json()
    bad = PseudoaddressingCertificate.from_json(data)
    bad = PseudoaddressingCertificate(bad.source, bad.source_depth, bad.r, bad.t,
                                      DecisionTree(bad.tree.arity, _flip_first_leaf(bad.tree.root)), bad.paths,
                                      bad.nu, bad.good, bad.independent, bad.attempts)
    assert not tree_matches_projection(bad)
    assert not verify_certificate(bad)


def test_tampered_path_fails(addr2_cert):
    data = addr2_cert.to_json()
    v, b = data["paths"][0]["path0"][0]
    data["paths"][0]["path0"][0] = [v, 1 - b]
    bad = PseudoaddressingCertificate.from_json(data)
    assert not check_paths(bad, 0)
    assert not verify_certificate(bad)


def test_dictator_gives_one_addressed_variable():
    cert = extract_pseudoaddressing(dictator(1, 0), seed=0)
    assert (cert.r, cert.t) == (10, 1)
    assert verify_certificate(cert)


def test_rejects_non_truly_variate():
    with pytest.raises(ValueError):
        extract_pseudoaddressing(dictator(3, 1), seed=0)


def test_sampling_is_seeded():
    f = parity(3)
    tree = reduced_tree(min_depth_tree(f))
    pairs = path_pairs(tree)
    indep = independent_set(pairs, 3, tree.depth)
    a = sample_projection(indep, pairs, 3, tree.depth, seed=5)
    assert a == sample_projection(indep, pairs, 3, tree.depth, seed=5)
    assert a.nu.target_arity == a.r + a.t


@settings(max_examples=30)
@given(nonconstant_functions(min_arity=1, max_arity=4).filter(is_truly_n_variate))
def test_pipeline_on_small_functions(f):
    cert = extract_pseudoaddressing(f, seed=1)
    d = oracles.decision_depth(oracles.table_of(f), f.arity)
    assert cert.source_depth == d
    assert cert.r == 10 * d * d
    assert len(cert.independent) * (4 * d + 1) >= f.arity
    assert cert.t >= math.ceil(len(cert.independent) / 2)
    assert verify_certificate(cert)


def test_addressing_points_are_consistent(addr2_cert):
    points, polarity = addressing_points(addr2_cert)
    assert len(points) == addr2_cert.t
    assert all(p >> addr2_cert.r == 0 for p in points)
    for j, (p0, _) in enumerate(addr2_cert.paths):
        assert dict(p0)[addr2_cert.r + j] == polarity[j]


def test_random_restriction_reads_the_assignment(addr2_cert):
    for seed in range(40):
        F = random_restriction_F(addr2_cert, seed)
        assert F.tree.variables() <= set(range(addr2_cert.r))
        assert F.values() == tuple(b ^ p for b, p in zip(F.assignment, F.polarity))


def test_random_restriction_marginals(addr2_cert):
    trials = 2000
    vals = np.array([random_restriction_F(addr2_cert, s).values() for s in range(trials)])
    assert np.all(np.abs(vals.mean(axis=0) - 0.5) < 0.05)
