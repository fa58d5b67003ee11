import logging
from fractions import Fraction
from itertools import product

import numpy as np

from treealg.axioms.data import compositions, split
from treealg.axioms.report import Report
from treealg.connalg import to_sympy

'''
Checks of a pre-tree functor: the composition isomorphisms are invertible and
graded, the coassociativity squares commute and the modules of the unit
patterns have the expected ranks.
'''

logger = logging.getLogger(__name__)


def _small_degrees(data, key, partition, support):
    "Degree of every column of the decomposition of key along partition"
    inputs, infinity = key
    blocks = split(inputs, partition)
    degrees = []
    for mu in support:
        inner = [data.module(b, m).connection.basis_degrees for b, m in zip(blocks, mu)]
        outer = data.module(mu, infinity).connection.basis_degrees
        for combo in product(*inner, outer):
            degrees.append(sum(combo, Fraction(0)))
    return degrees


def check_decomposition(data, decomposition, report):
    key, partition = decomposition.key, decomposition.partition
    name = f"composition isomorphism {partition}"
    if not decomposition.is_constant:
        report.unverified(name, "depends on the points; invertibility is checked on the gauged side", key)
        return
    big = data.module(*key)
    matrix = decomposition.matrix
    columns = data.columns(key, partition, decomposition.support)
    if not report.record(name, matrix.shape == (big.rank, len(columns)),
                         f"shape {matrix.shape}, expected {(big.rank, len(columns))}", key):
        return
    if not report.record(name + " invertible", big.rank == len(columns) and to_sympy(matrix).det() != 0,
                         "singular or not square", key):
        return
    big_degrees = big.connection.basis_degrees
    small_degrees = _small_degrees(data, key, partition, decomposition.support)
    graded = all(not matrix[b, c] or big_degrees[b] == small_degrees[c]
                 for b in range(matrix.shape[0]) for c in range(matrix.shape[1]))
    report.record(name + " graded", graded, "an entry connects basis elements of different degrees", key)


def _column_index(data, decomposition):
    labels = data.columns(decomposition.key, decomposition.partition, decomposition.support)
    return {label: c for c, label in enumerate(labels)}


def _leaves_inner_first(data, key, partition, grouping):
    "Big-basis coordinates of every leaf, splitting along partition first"
    inputs, infinity = key
    first = data.decompositions[(key, partition)]
    index = _column_index(data, first)
    leaves = {}
    for mu in first.support:
        second = data.decompositions.get(((mu, infinity), grouping))
        if second is None:
            return None
        blocks = split(inputs, partition)
        inner_ranges = [range(data.rank(b, m)) for b, m in zip(blocks, mu)]
        for c, (nu, h, outer) in enumerate(data.columns((mu, infinity), grouping, second.support)):
            for f in product(*inner_ranges):
                vector = sum((second.matrix[o, c] * first.matrix[:, index[(mu, f, o)]]
                              for o in range(data.rank(mu, infinity)) if second.matrix[o, c]),
                             np.full(first.matrix.shape[0], Fraction(0), dtype=object))
                leaves[(mu, nu, f, h, outer)] = vector
    return leaves


def _group_leaves(data, block, sizes, nu):
    '''
    Leaves (mu_g, f_g, h_g) of the module (block, nu) split along sizes, with their
    coordinates in that module; a single block is its own leaf.
    '''
    if len(sizes) == 1:
        rank = data.rank(block, nu)
        unit = np.eye(rank, dtype=int).astype(object)
        return {((nu,), (f,), 0): unit[:, f] for f in range(rank)}
    decomposition = data.decompositions.get(((block, nu), tuple(sizes)))
    if decomposition is None:
        return None
    labels = data.columns((block, nu), tuple(sizes), decomposition.support)
    return {label: decomposition.matrix[:, c] for c, label in enumerate(labels)}


def _leaves_outer_first(data, key, partition, grouping):
    "Big-basis coordinates of every leaf, splitting along the merged groups first"
    inputs, infinity = key
    group_sizes = []
    start = 0
    for size in grouping:
        group_sizes.append(partition[start:start + size])
        start += size
    merged = tuple(sum(sizes) for sizes in group_sizes)
    first = data.decompositions.get((key, merged))
    if first is None:
        return None
    index = _column_index(data, first)
    groups = split(inputs, merged)
    leaves = {}
    for nu in first.support:
        per_group = [_group_leaves(data, g, sizes, n) for g, sizes, n in zip(groups, group_sizes, nu)]
        if any(p is None for p in per_group):
            return None
        for outer in range(data.rank(nu, infinity)):
            for choice in product(*(p.items() for p in per_group)):
                mu, f, h = (), (), ()
                vector = np.full(first.matrix.shape[0], Fraction(0), dtype=object)
                for (mu_g, f_g, h_g), _ in choice:
                    mu, f, h = mu + tuple(mu_g), f + tuple(f_g), h + (h_g,)
                for inner in product(*(range(len(v)) for _, v in choice)):
                    weight = Fraction(1)
                    for (_, v), i in zip(choice, inner):
                        weight *= v[i]
                    if weight:
                        vector = vector + weight * first.matrix[:, index[(nu, inner, outer)]]
                leaves[(mu, nu, f, h, outer)] = vector
    return leaves


def check_square(data, key, partition, grouping, report):
    name = f"coassociativity {partition} / {grouping}"
    if not all(d.is_constant for d in data.decompositions.values() if d.key == key):
        report.unverified(name, "composition isomorphisms depend on the points", key)
        return
    inner_first = _leaves_inner_first(data, key, partition, grouping)
    outer_first = _leaves_outer_first(data, key, partition, grouping)
    if inner_first is None or outer_first is None:
        report.unverified(name, "a decomposition needed by the square is not stored", key)
        return
    same = inner_first.keys() == outer_first.keys() and all(
        np.all(inner_first[leaf] == outer_first[leaf]) for leaf in inner_first)
    report.record(name, same, "the two routes disagree", key)


def check_units(data, report):
    "Unit patterns: M(; inf) and M(lambda; inf) have rank one exactly on the unit and on the diagonal"
    for key in data.keys(arity=0):
        _, infinity = key
        report.record("unit module", data.rank(*key) == (1 if infinity == data.unit else 0),
                      f"rank {data.rank(*key)}", key)
    for key in data.keys(arity=1):
        (label,), infinity = key
        report.record("one-point module", data.rank(*key) == (1 if infinity == label else 0),
                      f"rank {data.rank(*key)}", key)
    for (key, position), gauge in data.unit_gauges.items():
        inputs, infinity = key
        smaller = data.module(inputs[:position] + inputs[position + 1:], infinity)
        ok = gauge is not None and gauge.rank == smaller.rank == data.rank(*key) and gauge.determinant.is_constant \
            and gauge.determinant.constant_value != 0
        report.record("unit isomorphism", ok, f"position {position} does not give an isomorphism", key)


def verify_pretree(data, order=2):
    '''
    Check the pre-tree functor axioms on every stored tuple.
    @order: truncation order of the comparison (constant isomorphisms are exact at every order)
    '''
    report = Report("pre-tree functor", order=order)
    for decomposition in data.decompositions.values():
        data.module(*decomposition.key)
        check_decomposition(data, decomposition, report)
    for key in data.keys():
        if not data.rank(*key):
            continue
        n = len(key[0])
        for partition in compositions(n, min_parts=3):
            if (key, partition) not in data.decompositions:
                continue
            for grouping in compositions(len(partition)):
                if len(grouping) < len(partition):
                    check_square(data, key, partition, grouping, report)
    check_units(data, report)
    logger.info("pre-tree functor check: %d passed, %d failed", report.count("PASS"), report.count("FAIL"))
    return report
