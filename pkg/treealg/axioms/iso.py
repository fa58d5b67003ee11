import logging
from fractions import Fraction

import numpy as np

from treealg import settings
from treealg.axioms.data import Decomposition, Module, split
from treealg.axioms.report import Report
from treealg.connalg import GaugeMap, from_sympy, gauge_transform, identity, kron, same_monodromy, to_sympy
from treealg.cooperad import TruncMatrix, cocompose
from treealg.errors import IncompleteDataError, ShapeMismatchError
from treealg.ratfield import RatFunc

'''
Isomorphisms of tree functors given by a gauge per tuple: F_T - E_T = g^-1 dg
(through gauge_transform), the degree bookkeeping of the gauges, and the
compatibility of the gauges with the composition isomorphisms.

Also builds the gauged data set from a gauge family, and single-entry
mutations of a data set for soundness checks of the verifiers.
'''

logger = logging.getLogger(__name__)


def constant_matrix(gauge):
    "Exact Fraction matrix of a constant gauge, None otherwise"
    if not all(e.is_constant for e in gauge.matrix.flat):
        return None
    return np.vectorize(lambda e: e.constant_value, otypes=[object])(gauge.matrix).reshape(gauge.matrix.shape)


def scalar_gauges(data, factor):
    '''
    Gauge family f_T * Id for every stored module of positive rank.
    @factor: callable key -> (RatFunc or exact constant, degree), or None for the identity
    '''
    gauges = {}
    for key, module in data.modules.items():
        if not module.rank:
            continue
        n = len(key[0])
        chosen = factor(key)
        f, degree = chosen if chosen is not None else (1, 0)
        if not isinstance(f, RatFunc):
            f = RatFunc.constant(n, f)
        gauges[key] = GaugeMap.scalar(n, module.rank, f, degree)
    return gauges


def degree_shift(data_a, beta, key):
    "Degree the gauge of key must have when the shifts change from data_a.alpha to beta"
    inputs, infinity = key
    alpha = data_a.alpha
    change = (beta[infinity] - alpha[infinity]) - sum(beta[m] - alpha[m] for m in inputs)
    return settings.ANALYTIC_DEGREE_SIGN * change


def _gauge(gauges, key):
    try:
        return gauges[key]
    except KeyError:
        raise IncompleteDataError(f"no gauge for {key}") from None


def assembled_gauge(data, gauges, decomposition, order):
    '''
    Direct sum over the support of the inner gauges tensored with the outer one,
    over the combined [t, z] variables, as a TruncMatrix.
    '''
    inputs, infinity = decomposition.key
    partition = decomposition.partition
    blocks = split(inputs, partition)
    n_total = sum(partition) + len(partition)
    pieces = []
    for mu in decomposition.support:
        factors = [_gauge(gauges, (b, m)).matrix for b, m in zip(blocks, mu)]
        factors.append(_gauge(gauges, (mu, infinity)).matrix)
        offset = 0
        result = identity(1, n_total)
        for factor in factors:
            n = factor.flat[0].n_vars
            moved = np.empty(factor.shape, dtype=object)
            for index, entry in np.ndenumerate(factor):
                moved[index] = entry.relabel([offset + k for k in range(n)], n_total)
            result = kron(result, moved, n_total)
            offset += n
        pieces.append(result)
    size = sum(p.shape[0] for p in pieces)
    grid = np.empty((size, size), dtype=object)
    grid[...] = RatFunc.zero(n_total)
    start = 0
    for piece in pieces:
        grid[start:start + piece.shape[0], start:start + piece.shape[0]] = piece
        start += piece.shape[0]
    return TruncMatrix(partition, order, grid)


def pushed_gauge(matrix, partition, order):
    "Entrywise structure-map image of a matrix over M(n)"
    grid = np.empty(matrix.shape, dtype=object)
    for index, entry in np.ndenumerate(matrix):
        grid[index] = cocompose(entry, partition, order).func
    return TruncMatrix(partition, order, grid)


def _transformed(matrix, gauge_from, gauge_to):
    "gauge_from^-1 matrix gauge_to for constant gauges, None otherwise"
    a, b = constant_matrix(gauge_from), constant_matrix(gauge_to)
    if a is None or b is None:
        return None
    return from_sympy(to_sympy(a).inv() * to_sympy(matrix) * to_sympy(b))


def gauge_tree_functor(data, gauges, order=2, beta=None):
    '''
    The data set F obtained from data through a gauge family: F_T = g_T^-1 E_T g_T + g_T^-1 dg_T
    and composition isomorphisms push(g_T^-1) Phi_T (+) (x) g, truncated at order
    when some gauge depends on the points.
    @beta: degree shifts of the gauged data, default the old ones
    '''
    gauged = data.copy()
    gauged.alpha = dict(beta) if beta is not None else dict(data.alpha)
    gauged.metadata["gauged"] = True
    for key, module in data.modules.items():
        if module.rank:
            connection = gauge_transform(module.connection, _gauge(gauges, key))
            gauged.modules[key] = Module(*key, connection)

    for (key, partition), decomposition in data.decompositions.items():
        if not data.rank(*key):
            continue
        big = _gauge(gauges, key)
        assembled = assembled_gauge(data, gauges, decomposition, order)
        constant_big = constant_matrix(big)
        if constant_big is not None and decomposition.is_constant and all(
                e.is_constant for e in (assembled.entry(i, j) for i in range(assembled.shape[0])
                                        for j in range(assembled.shape[1]))):
            small = np.vectorize(lambda e: e.constant_value, otypes=[object])(
                np.array([[assembled.entry(i, j) for j in range(assembled.shape[1])]
                          for i in range(assembled.shape[0])], dtype=object))
            matrix = from_sympy(to_sympy(constant_big).inv() * to_sympy(decomposition.matrix) * to_sympy(small))
        else:
            matrix = pushed_gauge(big.inverse_matrix, partition, order) @ decomposition.matrix @ assembled
        gauged.decompositions[(key, partition)] = Decomposition(key, partition, decomposition.support, matrix)

    for (key, position), unit in data.unit_gauges.items():
        inputs, infinity = key
        smaller = (inputs[:position] + inputs[position + 1:], infinity)
        transformed = None if unit is None else _transformed(constant_matrix(unit), gauges[key], gauges[smaller])
        if transformed is None:
            del gauged.unit_gauges[(key, position)]
        else:
            gauged.unit_gauges[(key, position)] = GaugeMap(transformed, 0, len(inputs))

    for (key, i), perm in data.permutations.items():
        inputs, infinity = key
        swapped = (inputs[:i] + (inputs[i + 1], inputs[i]) + inputs[i + 2:], infinity)
        transformed = _transformed(constant_matrix(perm), gauges[swapped], gauges[key]) \
            if data.rank(*key) else None
        if transformed is None:
            del gauged.permutations[(key, i)]
        else:
            gauged.permutations[(key, i)] = GaugeMap(transformed, 0, len(inputs))
    logger.info("gauged %d modules and %d decompositions", len(gauges), len(gauged.decompositions))
    return gauged


def check_compatibility(data_a, data_b, gauges, key, partition, order, report):
    "push(g_T) Phi^B = Phi^A (+) (x) g at order"
    name = f"gauge compatibility {partition}"
    phi_a = data_a.decompositions[(key, partition)]
    phi_b = data_b.decompositions.get((key, partition))
    if phi_b is None:
        report.unverified(name, "the second data set stores no such decomposition", key)
        return
    assembled = assembled_gauge(data_a, gauges, phi_a, order)
    left = pushed_gauge(gauges[key].matrix, partition, order) @ phi_b.matrix
    right = TruncMatrix(partition, order, phi_a.matrix) @ assembled if phi_a.is_constant else phi_a.matrix @ assembled
    common = min(left.order, right.order)
    difference = left.first_difference(right, common)
    report.record(name, difference is None,
                  "" if difference is None else f"entry {difference[0]} differs by {difference[1]} at order {common}",
                  key)


def verify_iso(data_a, data_b, gauges, order=2):
    '''
    Check that gauges define an isomorphism from data_a to data_b.
    @gauges: map key -> GaugeMap from the basis of data_a to the basis of data_b
    @order: truncation order of the decomposition compatibility
    '''
    if sorted(data_a.labels) != sorted(data_b.labels):
        raise ShapeMismatchError(f"label sets {data_a.labels} and {data_b.labels} differ")
    for key in data_a.keys():
        if data_a.rank(*key) != data_b.rank(*key):
            raise ShapeMismatchError(f"ranks of {key} differ: {data_a.rank(*key)} and {data_b.rank(*key)}")
    report = Report("tree functor isomorphism", order=order)
    for key in data_a.keys():
        conn_a, conn_b = data_a.module(*key).connection, data_b.module(*key).connection
        if not conn_a.rank:
            continue
        gauge = gauges.get(key)
        if not report.record("gauge present", gauge is not None, "no gauge", key):
            continue
        report.record("gauge homogeneous", gauge.is_homogeneous(conn_a.basis_degrees),
                      f"not homogeneous of degree {gauge.degree}", key)
        expected = degree_shift(data_a, data_b.alpha, key)
        report.record("gauge degree", gauge.degree == expected, f"degree {gauge.degree}, expected {expected}", key)
        report.record("same monodromy", same_monodromy(conn_a, conn_b, gauge),
                      "the connections do not differ by the gauge", key)
    for key, partition in data_a.decompositions:
        if data_a.rank(*key):
            check_compatibility(data_a, data_b, gauges, key, partition, order, report)
    logger.info("isomorphism check: %d passed, %d failed", report.count("PASS"), report.count("FAIL"))
    return report


def mutations(data, count=20, seed=settings.DEFAULT_SEED):
    '''
    Single-entry corruptions of data: a nonzero connection entry doubled, or a
    column of a constant composition isomorphism cleared.
    Return a list of (description, mutated copy), at most count of them.
    '''
    candidates = []
    for key, module in sorted(data.modules.items()):
        for i, matrix in enumerate(module.connection):
            for (r, c), entry in np.ndenumerate(matrix):
                if entry:
                    candidates.append(("connection", key, i, r, c))
    for (key, partition), decomposition in sorted(data.decompositions.items()):
        if decomposition.is_constant:
            for c in range(decomposition.matrix.shape[1]):
                candidates.append(("decomposition", key, partition, c))
    rng = np.random.default_rng(seed)
    chosen = rng.permutation(len(candidates))[:count] if candidates else []
    result = []
    for index in chosen:
        kind, key, *where = candidates[index]
        mutated = data.copy()
        if kind == "connection":
            i, r, c = where
            matrix = mutated.modules[key].connection.matrices[i]
            matrix[r, c] = matrix[r, c] * 2
            result.append((f"E_{i}[{r}, {c}] of {key} doubled", mutated))
        else:
            partition, c = where
            mutated.decompositions[(key, partition)].matrix[:, c] = Fraction(0)
            result.append((f"column {c} of the {partition} decomposition of {key} cleared", mutated))
    return result
