import pytest
from hypothesis import given, strategies as st

from pdeglab.boolfn import (STAR, ArityError, BooleanFunction, Projection, Restriction, addressing_function,
                            addressing_variable, all_functions, and_function, bitstring, block_sensitivity,
                            complement, constant, dictator, fourier_support_degree, influential_variables,
                            is_truly_n_variate, majority, or_function, parity, parse_bitstring, parse_function,
                            project, read_table_file, restrict, sensitivity, sensitivity_at, write_table_file,
                            xor_shift)
from pdeglab.polynomial import exact_degree

import oracles
from expected import ADDR2_SENSITIVITY, ADDR_DEGREE
from strategies import functions, restrictions


def test_bit_order_is_little_endian():
    f = dictator(3, 2)
    assert f((0, 0, 1)) == 1
    assert f(4) == 1
    assert f(1) == 0
    assert bitstring(1, 3) == "100"
    assert parse_bitstring("001") == 4


def test_named_families():
    assert or_function(3)(0) == 0 and or_function(3)(5) == 1
    assert and_function(3)(7) == 1 and and_function(3)(6) == 0
    assert majority(3)((1, 1, 0)) == 1 and majority(3)((1, 0, 0)) == 0
    assert parity(3)((1, 1, 1)) == 1
    assert constant(2, 1).is_constant


def test_addressing_layout():
    f = addressing_function(2)
    assert f.arity == 6
    # address bits (x0, x1) = (1, 0) select address 1, variable 3
    assert addressing_variable(2, 1) == 3
    a = (1, 0, 0, 1, 0, 0)
    assert f(a) == 1
    assert f((1, 0, 1, 0, 1, 1)) == 0


@pytest.mark.parametrize("r", [1, 2, 3])
def test_addressing_degree(r):
    f = addressing_function(r)
    assert exact_degree(f) == ADDR_DEGREE[r] == r + 1


def test_addressing_degree_by_fourier_oracle():
    f = addressing_function(2)
    assert oracles.degree_by_fourier(oracles.table_of(f), 6) == ADDR_DEGREE[2]


def test_sensitivity_examples():
    assert sensitivity(or_function(5))[0] == 5
    assert sensitivity(or_function(5))[1] == 0
    s, a = sensitivity(addressing_function(2))
    assert s == ADDR2_SENSITIVITY
    assert sensitivity_at(addressing_function(2), a) == s
    assert sensitivity(parity(4))[0] == 4


def test_block_sensitivity_examples():
    assert block_sensitivity(or_function(4)) == 4
    assert block_sensitivity(addressing_function(2)) == 3
    with pytest.raises(ArityError):
        block_sensitivity(constant(11, 0))


@given(functions())
def test_measures_match_oracles(f):
    t = oracles.table_of(f)
    assert sensitivity(f)[0] == oracles.sensitivity(t, f.arity)
    assert block_sensitivity(f) == oracles.block_sensitivity(t, f.arity)
    assert fourier_support_degree(f) == oracles.degree_by_fourier(t, f.arity)


@given(functions())
def test_measure_chain(f):
    assert sensitivity(f)[0] <= block_sensitivity(f)


def test_hex_round_trip_and_file(tmp_path):
    f = addressing_function(2)
    assert BooleanFunction.from_hex(6, f.to_hex()) == f
    path = tmp_path / "addr.tt"
    write_table_file(f, path)
    assert read_table_file(path) == f
    assert parse_function(str(path)) == f
    assert parse_function("xor:3") == parity(3)
    with pytest.raises(ValueError):
        parse_function("nonsense")


@given(functions(1, 4), st.data())
def test_restrict_matches_pointwise(f, data):
    rho = Restriction(data.draw(restrictions(f.arity)))
    g = restrict(f, rho)
    free = rho.free
    for y in range(1 << len(free)):
        x = sum(1 << i for i, v in enumerate(rho.values) if v == 1)
        for k, pos in enumerate(free):
            x |= ((y >> k) & 1) << pos
        assert g(y) == f(x)


@given(functions(1, 4), st.data())
def test_project_and_shift_pointwise(f, data):
    m = data.draw(st.integers(1, 4))
    mapping = tuple(data.draw(st.integers(0, m - 1)) for _ in range(f.arity))
    nu = Projection(mapping, m)
    g = project(f, nu)
    for y in range(1 << m):
        assert g(y) == f(tuple((y >> mapping[i]) & 1 for i in range(f.arity)))
    shift = data.draw(st.integers(0, (1 << f.arity) - 1))
    h = xor_shift(f, shift)
    assert all(h(x) == f(x ^ shift) for x in range(1 << f.arity))
    assert complement(complement(f)) == f


def test_restriction_compose_and_parse():
    rho = Restriction.parse("1**0")
    assert rho.free == (1, 2)
    assert str(rho.then(Restriction((STAR, 1)))) == "1*10"


def test_permutation_projection():
    nu = Projection.permutation((2, 0, 1))
    f = dictator(3, 2)
    assert project(f, nu) == dictator(3, 0)


def test_truly_n_variate():
    assert is_truly_n_variate(addressing_function(2))
    assert not is_truly_n_variate(dictator(3, 1))
    assert influential_variables(dictator(3, 1)) == {1}


def test_all_functions_count():
    assert sum(1 for _ in all_functions(2)) == 16
