"""Frozen reference values; each one is re-derived by an oracle in the tests that use it."""
from fractions import Fraction

ADDR_DEGREE = {1: 2, 2: 3, 3: 4}
ADDR2_DEPTH = 3
ADDR2_SENSITIVITY = 3

OR_REPETITIONS = {Fraction(1, 10): 12}
OR8_DEGREE_BOUND = 48

XOR8_FAMILY_SIZE = 48
XOR8_OUTER_DEGREE = 84
XOR8_DEGREE_BOUND = 672

UBD_SIZES = {(1, 1): 5, (2, 2): 25, (3, 3): 537}
LINEARITY_POLY = {0b000: 1, 0b001: -1, 0b010: -1, 0b100: -1, 0b011: 2, 0b101: 2, 0b110: 2, 0b111: -4}

MAJ3_TAIL_AT_3_10 = Fraction(216, 1000)

ADDR2_PROJECTION_R = 90
EXAMPLE_TREE_R = 160

XOR2_MAX_AGREEMENT_D1 = 3
CUBE3_BAD_FRACTION_D0 = Fraction(2, 256)
