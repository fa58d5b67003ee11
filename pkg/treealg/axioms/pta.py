import logging
from fractions import Fraction

import numpy as np

from treealg.axioms.data import permutation_operator, split, swap
from treealg.axioms.report import Report
from treealg.ratfield import RatFunc

'''
Pre-tree algebra checks: the maps phi are compatible with the composition
isomorphisms, send the one-point basis element to the identity and commute
with the permutation isomorphisms.
'''

logger = logging.getLogger(__name__)


def _is_constant(matrix):
    return all(not isinstance(e, RatFunc) or e.is_constant for e in np.ravel(matrix))


def _exact(matrix):
    "Constant matrix with plain Fraction entries"
    return np.vectorize(lambda e: e.constant_value if isinstance(e, RatFunc) else Fraction(e),
                        otypes=[object])(np.array(matrix, dtype=object))


def _source_dim(alg, inputs):
    return int(np.prod([alg.spaces[m] for m in inputs])) if inputs else 1


def _kron(matrices):
    result = np.array([[Fraction(1)]], dtype=object)
    for m in matrices:
        result = np.kron(result, m)
    return result


def check_shapes(alg, key, report):
    inputs, infinity = key
    expected = (alg.spaces[infinity], _source_dim(alg, inputs))
    images = alg.images(key)
    if len(images) != alg.functor.rank(*key):
        return report.record("algebra map", False,
                             f"{len(images)} images for a module of rank {alg.functor.rank(*key)}", key)
    for b, image in enumerate(images):
        shape = np.shape(image)
        if shape != expected:
            return report.record("algebra map", False,
                                 f"image {b} has shape {shape}, expected {expected}; "
                                 f"the graded window {alg.window} does not hold the images", key)
    return True


def check_square(alg, decomposition, report):
    "phi of every composed basis element equals the composite of the phi's"
    data = alg.functor
    key, partition = decomposition.key, decomposition.partition
    name = f"composition square {partition}"
    if not decomposition.is_constant:
        report.unverified(name, "the composition isomorphism depends on the points", key)
        return
    inputs, infinity = key
    blocks = split(inputs, partition)
    big = alg.images(key)
    if not all(_is_constant(image) for image in big):
        report.unverified(name, "phi depends on the points", key)
        return
    big = [_exact(image) for image in big]
    for c, (mu, f, o) in enumerate(data.columns(key, partition, decomposition.support)):
        composed = sum((decomposition.matrix[k, c] * big[k] for k in range(len(big)) if decomposition.matrix[k, c]),
                       np.full(big[0].shape, Fraction(0), dtype=object))
        inner = [_exact(alg.images((b, m))[i]) for b, m, i in zip(blocks, mu, f)]
        outer = _exact(alg.images((mu, infinity))[o])
        if not np.all(composed == outer @ _kron(inner)):
            report.record(name, False, f"channel {mu}, inner {f}, outer {o}", key)
            return
    report.record(name, True, key=key)


def check_unitality(alg, key, report):
    (label,), infinity = key
    if label != infinity or not alg.functor.rank(*key):
        return
    images = alg.images(key)
    ok = len(images) == 1 and _is_constant(images[0]) and np.all(
        _exact(images[0]) == np.eye(alg.spaces[label], dtype=int))
    report.record("unitality", ok, "the one-point basis element is not sent to the identity", key)


def check_equivariance(alg, key, report):
    "sum_b P[b, a] phi_{sigma T}(b) = phi_T(a) o tau for the stored swaps"
    data = alg.functor
    inputs, infinity = key
    dims = [alg.spaces[m] for m in inputs]
    for i in range(len(inputs) - 1):
        gauge = data.permutations.get((key, i))
        if gauge is None or not data.rank(*key):
            continue
        perm = swap(len(inputs), i)
        permuted = alg.images((tuple(inputs[p] for p in perm), infinity))
        mine = alg.images(key)
        tau = permutation_operator(dims, perm)
        p = _exact(gauge.matrix)
        for a, image in enumerate(mine):
            left = sum((p[b, a] * _exact(permuted[b]) for b in range(len(permuted)) if p[b, a]),
                       np.full(np.shape(image), Fraction(0), dtype=object))
            if not np.all(left == _exact(image) @ tau):
                report.record("equivariance", False, f"swap of slots {i}, {i + 1} on basis element {a}", key)
                break
        else:
            report.record("equivariance", True, key=key)


def verify_pta(alg, order=1):
    '''
    Check the pre-tree algebra axioms on the stored graded window.
    @alg: PreTreeAlgebraData
    @order: truncation order, recorded in the report (constant maps are exact at every order)
    '''
    data = alg.functor
    report = Report("pre-tree algebra", order=order, window=alg.window)
    shaped = {key for key in data.keys() if check_shapes(alg, key, report)}
    for decomposition in data.decompositions.values():
        inputs, infinity = decomposition.key
        blocks = split(inputs, decomposition.partition)
        needed = {decomposition.key} | {(mu, infinity) for mu in decomposition.support}
        needed |= {(b, m) for mu in decomposition.support for b, m in zip(blocks, mu)}
        if needed <= shaped:
            check_square(alg, decomposition, report)
    for key in data.keys(arity=1):
        if key in shaped:
            check_unitality(alg, key, report)
    for key in data.keys():
        if key in shaped:
            check_equivariance(alg, key, report)
    logger.info("pre-tree algebra check: %d passed, %d failed", report.count("PASS"), report.count("FAIL"))
    return report
