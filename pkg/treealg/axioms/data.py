import copy
import logging
from fractions import Fraction
from itertools import accumulate, product

import numpy as np

from treealg import settings
from treealg.errors import IncompleteDataError, PartitionError

'''
Finite data of a (pre-)tree functor and of a pre-tree algebra.

A tuple key is (inputs, infinity): a tuple of input labels and the output
label. Every key owns a free graded M(n)-module given by its rank, its flat
connection and, for data built from invariant maps, the maps spanning it.
Decompositions hold the composition isomorphisms, one per (key, partition),
with columns ordered by support tuple and then by itertools.product over
(inner bases..., outer basis).
'''

logger = logging.getLogger(__name__)


def split(inputs, partition):
    "Consecutive blocks of inputs with the given sizes"
    if sum(partition) != len(inputs):
        raise PartitionError(f"partition {partition} does not split {len(inputs)} inputs")
    ends = list(accumulate(partition))
    return [tuple(inputs[end - size:end]) for size, end in zip(partition, ends)]


def compositions(n, min_parts=2):
    "Ordered partitions of n into positive parts, at least min_parts of them"
    if n == 0:
        return []
    result = []
    for cuts in product((False, True), repeat=n - 1):
        parts, size = [], 1
        for cut in cuts:
            if cut:
                parts.append(size)
                size = 1
            else:
                size += 1
        parts.append(size)
        if len(parts) >= min_parts:
            result.append(tuple(parts))
    return sorted(result)


class Module():
    '''
    @inputs: labels lambda_1..lambda_n
    @infinity: label lambda_infinity
    @connection: flat Connection over M(n) on the module's basis
    @basis: invariant maps spanning the module, when known
    '''

    def __init__(self, inputs, infinity, connection, basis=None):
        self.inputs = tuple(inputs)
        self.infinity = infinity
        self.connection = connection
        self.basis = basis

    @property
    def key(self):
        return (self.inputs, self.infinity)

    @property
    def rank(self):
        return self.connection.rank

    @property
    def arity(self):
        return len(self.inputs)

    def __repr__(self):
        return f"Module({self.inputs} -> {self.infinity}, rank={self.rank})"


class Decomposition():
    '''
    Composition isomorphism of the module `key` along `partition`: the columns
    express the composed basis elements in the basis of the big module.
    @support: intermediate label tuples (mu_1..mu_k) with nonzero summands
    @matrix: numpy object array of Fraction, or a TruncMatrix when it depends on the points
    '''

    def __init__(self, key, partition, support, matrix):
        self.key = key
        self.partition = tuple(partition)
        self.support = [tuple(mu) for mu in support]
        self.matrix = matrix

    @property
    def is_constant(self):
        return isinstance(self.matrix, np.ndarray)


class TreeFunctorData():
    '''
    @labels: the label set, unit included
    @unit: the distinguished label 1
    @alpha: map label -> exact degree shift
    @modules: map key -> Module
    @decompositions: map (key, partition) -> Decomposition
    @unit_gauges: map (key, position of a unit label) -> GaugeMap certificate or None
    @permutations: map (key, i) -> GaugeMap for swapping the inputs i and i + 1
    @metadata: free-form description of how the data was built
    '''

    def __init__(self, labels, unit, alpha, modules=None, decompositions=None, unit_gauges=None,
                 permutations=None, metadata=None):
        self.labels = list(labels)
        self.unit = unit
        self.alpha = {label: Fraction(a) for label, a in alpha.items()}
        self.modules = dict(modules or {})
        self.decompositions = dict(decompositions or {})
        self.unit_gauges = dict(unit_gauges or {})
        self.permutations = dict(permutations or {})
        self.metadata = dict(metadata or {})

    def add(self, module):
        self.modules[module.key] = module

    def module(self, inputs, infinity):
        try:
            return self.modules[(tuple(inputs), infinity)]
        except KeyError:
            raise IncompleteDataError(f"no module stored for {tuple(inputs)} -> {infinity}") from None

    def rank(self, inputs, infinity):
        return self.module(inputs, infinity).rank

    def columns(self, key, partition, support):
        "Column labels (mu, inner indices, outer index) in storage order"
        inputs, infinity = key
        blocks = split(inputs, partition)
        labels = []
        for mu in support:
            inner = [range(self.rank(block, m)) for block, m in zip(blocks, mu)]
            for combo in product(*inner, range(self.rank(mu, infinity))):
                labels.append((tuple(mu), combo[:-1], combo[-1]))
        return labels

    def expected_degree(self, key):
        "Degree the connection of key must have: alpha_inf - sum alpha_i, through the analytic sign"
        inputs, infinity = key
        return settings.ANALYTIC_DEGREE_SIGN * (self.alpha[infinity] - sum(self.alpha[m] for m in inputs))

    def keys(self, arity=None):
        return sorted(k for k in self.modules if arity is None or len(k[0]) == arity)

    def copy(self):
        return copy.deepcopy(self)

    def __repr__(self):
        return f"TreeFunctorData({len(self.labels)} labels, {len(self.modules)} modules)"


class PreTreeAlgebraData():
    '''
    @functor: TreeFunctorData
    @spaces: map label -> dimension of V_lambda inside the graded window
    @phi: map key -> list of images phi(b), one matrix Hom(V_inputs, V_infinity) per basis element
    @window: number of graded pieces of every V_lambda kept
    '''

    def __init__(self, functor, spaces, phi, window=1):
        self.functor = functor
        self.spaces = dict(spaces)
        self.phi = dict(phi)
        self.window = window

    def images(self, key):
        try:
            return self.phi[key]
        except KeyError:
            raise IncompleteDataError(f"no algebra map stored for {key}") from None

    def copy(self):
        return copy.deepcopy(self)


def swap(n, i):
    "The transposition of i and i + 1 as a list"
    perm = list(range(n))
    perm[i], perm[i + 1] = perm[i + 1], perm[i]
    return perm


def permutation_operator(dims, perm):
    '''
    tau: V_{sigma T} -> V_T as an exact matrix, for the tuple sigma T whose slot
    perm[i] carries the factor of slot i of T.
    '''
    permuted_dims = [0] * len(dims)
    for i, p in enumerate(perm):
        permuted_dims[p] = dims[i]
    size = int(np.prod(dims)) if dims else 1
    tau = np.full((size, size), Fraction(0), dtype=object)
    for source in product(*(range(d) for d in permuted_dims)):
        target = tuple(source[perm[i]] for i in range(len(dims)))
        tau[np.ravel_multi_index(target, dims), np.ravel_multi_index(source, permuted_dims)] = Fraction(1)
    return tau
