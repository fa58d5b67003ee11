import logging

import numpy as np

from treealg.axioms.data import split, swap
from treealg.axioms.report import Report
from treealg.connalg import (Coaugmentation, GaugeMap, Permutation, StructureMap, conn_degree,
                             direct_sum_conn, identity, pushforward_conn, same_monodromy, tensor_conn)
from treealg.cooperad import TruncMatrix
from treealg.errors import TreealgError

'''
Tree functor axioms on top of a pre-tree functor: flat connections of the
right degree, equivariance, unit insertion, factorization along the structure
map and the one-point condition.
'''

logger = logging.getLogger(__name__)


def check_degree(data, key, report):
    module = data.module(*key)
    if not module.rank:
        return
    try:
        degree = conn_degree(module.connection)
    except TreealgError as error:
        report.record("flat homogeneous connection", False, str(error), key)
        return
    expected = data.expected_degree(key)
    report.record("connection degree", degree == expected, f"degree {degree}, expected {expected}", key)


def check_equivariance(data, key, report):
    "Axiom 1: the connection of a swapped tuple is the relabeled one, up to the stored permutation"
    inputs, infinity = key
    module = data.module(*key)
    if not module.rank:
        return
    for i in range(len(inputs) - 1):
        perm = swap(len(inputs), i)
        permuted = data.module(tuple(inputs[p] for p in perm), infinity)
        gauge = data.permutations.get((key, i))
        if gauge is None:
            report.unverified("axiom 1", f"no permutation isomorphism for slots {i}, {i + 1}", key)
            continue
        pushed = pushforward_conn(module.connection, Permutation(perm))
        report.record("axiom 1", same_monodromy(permuted.connection, pushed, gauge),
                      f"swapping slots {i}, {i + 1} does not conjugate the connection", key)


def check_unit_insertion(data, key, report):
    "Axiom 2: inserting the unit label pushes the smaller connection forward"
    inputs, infinity = key
    module = data.module(*key)
    n = len(inputs)
    for position, label in enumerate(inputs):
        if label != data.unit:
            continue
        smaller = data.module(inputs[:position] + inputs[position + 1:], infinity)
        if smaller.rank != module.rank:
            report.record("axiom 2", False, f"ranks {module.rank} and {smaller.rank} differ", key)
            continue
        if not module.rank:
            continue
        positions = [k for k in range(n) if k != position]
        pushed = pushforward_conn(smaller.connection, Coaugmentation(positions, n))
        gauge = data.unit_gauges.get((key, position))
        if gauge is None:
            gauge = GaugeMap(identity(module.rank, n), 0, n)
            if not same_monodromy(module.connection, pushed, gauge):
                report.unverified("axiom 2", f"no gauge certificate for the unit at position {position}", key)
                continue
        report.record("axiom 2", same_monodromy(module.connection, pushed, gauge),
                      f"unit at position {position} does not give the pushed connection", key)


def assembled_connection(data, decomposition):
    "Direct sum over the support of inner connections tensored with the outer one"
    inputs, infinity = decomposition.key
    blocks = split(inputs, decomposition.partition)
    summands = []
    for mu in decomposition.support:
        inner = [data.module(b, m).connection for b, m in zip(blocks, mu)]
        summands.append(tensor_conn(inner + [data.module(mu, infinity).connection]))
    return direct_sum_conn(summands)


def check_factorization(data, decomposition, order, report):
    '''
    Axiom 3: E_T pushed along the structure map, composed with the decomposition,
    equals the decomposition composed with the assembled connection. A component
    is compared when its t-degree plus one for a dt is below order.
    '''
    key, partition = decomposition.key, decomposition.partition
    name = f"axiom 3 {partition}"
    if not decomposition.is_constant:
        report.unverified(name, "the composition isomorphism depends on the points", key)
        return
    module = data.module(*key)
    if not module.rank:
        return
    pushed = pushforward_conn(module.connection, StructureMap(partition, order))
    assembled = assembled_connection(data, decomposition)
    phi = TruncMatrix.from_constant(partition, order, decomposition.matrix)
    n_inner = sum(partition)
    for k, coefficient in enumerate(pushed.coefficients):
        bound = order - 2 if k < n_inner else order - 1
        left = coefficient @ decomposition.matrix
        right = phi @ TruncMatrix(partition, order, assembled[k])
        bound = min(bound, left.order, right.order)
        difference = left.first_difference(right, bound)
        if difference is not None:
            where, residual = difference
            kind = f"dt_{k}" if k < n_inner else f"dz_{k - n_inner}"
            report.record(name, False, f"{kind} entry {where} differs by {residual} up to t-degree {bound}", key)
            return
    report.record(name, True, key=key)


def check_one_point(data, key, report):
    "Axiom 4: on M(1) the connection is the trivial one"
    module = data.module(*key)
    zero = all(not entry for matrix in module.connection for entry in np.ravel(matrix))
    report.record("axiom 4", zero, "nonzero connection on a one-point tuple", key)


def verify_treefunctor(data, order=1):
    '''
    Check the tree functor axioms on every stored tuple.
    @order: truncation order of the structure-map comparison
    '''
    report = Report("tree functor", order=order)
    for key in data.keys():
        check_degree(data, key, report)
        check_equivariance(data, key, report)
        check_unit_insertion(data, key, report)
        if len(key[0]) == 1:
            check_one_point(data, key, report)
    for decomposition in data.decompositions.values():
        check_factorization(data, decomposition, order, report)
    logger.info("tree functor check at order %d: %d passed, %d failed", order,
                report.count("PASS"), report.count("FAIL"))
    return report
